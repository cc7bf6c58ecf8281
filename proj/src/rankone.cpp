#include "tenscert/rankone.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "tenscert/parallel.hpp"
#include "tenscert/rng.hpp"

namespace tenscert {

double vec_norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void vec_normalize(std::vector<double>& v) {
  const double n = vec_norm(v);
  if (n == 0) throw PreconditionViolation("cannot normalize a zero vector");
  for (double& x : v) x /= n;
}

namespace {

std::vector<std::vector<double>> others(const std::vector<std::vector<double>>& vecs, int skip) {
  std::vector<std::vector<double>> out;
  out.reserve(vecs.size() - 1);
  for (int j = 0; j < static_cast<int>(vecs.size()); ++j)
    if (j != skip) out.push_back(vecs[static_cast<std::size_t>(j)]);
  return out;
}

double pair_residual(const DenseTensor<double>& t, double lambda,
                     const std::vector<std::vector<double>>& vecs) {
  double worst = 0;
  for (int i = 0; i < t.order(); ++i) {
    const auto c = contract_except(t, i, others(vecs, i));
    double s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double d = c[k] - lambda * vecs[static_cast<std::size_t>(i)][k];
      s += d * d;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

}  // namespace

double kkt_check_rank_one(const DenseTensor<double>& t, const SingularPair& pair) {
  return pair_residual(t, pair.lambda, pair.vectors);
}

SingularPair hopm(const DenseTensor<double>& t, std::vector<std::vector<double>> init,
                  double tol, int max_sweeps) {
  const int d = t.order();
  if (static_cast<int>(init.size()) != d)
    throw PreconditionViolation("hopm needs one init vector per mode");
  const double scale = hs_norm(t);
  if (scale == 0) throw PreconditionViolation("hopm needs a nonzero tensor");
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(init[static_cast<std::size_t>(i)].size()) != t.dim(i))
      throw PreconditionViolation("hopm init vector length mismatch");
    vec_normalize(init[static_cast<std::size_t>(i)]);
  }

  SingularPair pair;
  pair.vectors = std::move(init);
  double value = std::abs(rayleigh(t, pair.vectors));
  const double degenerate_floor = 1e-14 * scale;

  auto one_sweep = [&]() -> bool {  // false on degenerate contraction
    for (int i = 0; i < d; ++i) {
      auto w = contract_except(t, i, others(pair.vectors, i));
      const double nw = vec_norm(w);
      if (nw <= degenerate_floor) return false;
      for (double& x : w) x /= nw;
      pair.vectors[static_cast<std::size_t>(i)] = std::move(w);
      value = nw;  // rayleigh at the updated tuple
    }
    pair.sweep_values.push_back(value);
    ++pair.sweeps;
    return true;
  };
  auto bail_degenerate = [&]() {
    pair.status = SolveStatus::degenerate;
    pair.lambda = rayleigh(t, pair.vectors);
    pair.residual = pair_residual(t, pair.lambda, pair.vectors);
  };

  bool value_settled = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (!one_sweep()) {
      bail_degenerate();
      return pair;
    }
    const double lambda = rayleigh(t, pair.vectors);
    const double res = pair_residual(t, lambda, pair.vectors);
    const double prev = pair.sweep_values.size() >= 2
                            ? pair.sweep_values[pair.sweep_values.size() - 2]
                            : -std::numeric_limits<double>::infinity();
    if (res <= tol) {
      pair.lambda = lambda;
      pair.residual = res;
      pair.status = SolveStatus::converged;
      return pair;
    }
    if (std::abs(value - prev) <= tol * std::max(1.0, std::abs(value))) {
      value_settled = true;
      break;
    }
  }

  if (value_settled) {
    // The value criterion leaves vector accuracy near sqrt(tol); chase the
    // residual criterion while sweeps still pay off so classes separate
    // cleanly at the dedup tolerance.
    double res = pair_residual(t, rayleigh(t, pair.vectors), pair.vectors);
    for (int extra = 0; extra < 80 && res > tol; ++extra) {
      if (!one_sweep()) {
        bail_degenerate();
        return pair;
      }
      const double next = pair_residual(t, rayleigh(t, pair.vectors), pair.vectors);
      const bool progress = next <= 0.97 * res;
      res = next;
      if (!progress) break;
    }
    pair.lambda = rayleigh(t, pair.vectors);
    pair.residual = res;
    pair.status = SolveStatus::converged;
    return pair;
  }

  pair.lambda = rayleigh(t, pair.vectors);
  pair.residual = pair_residual(t, pair.lambda, pair.vectors);
  pair.status = SolveStatus::max_sweeps_reached;
  return pair;
}

void canonicalize_singular(double& lambda, std::vector<std::vector<double>>& vectors) {
  for (auto& v : vectors) {
    double peak = 0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    // first entry that is solidly nonzero; an exact-zero coordinate perturbed
    // at rounding level must not decide the sign
    double lead = 0;
    for (double x : v) {
      if (std::abs(x) > 1e-7 * peak) {
        lead = x;
        break;
      }
    }
    if (lead < 0) {
      for (double& x : v) x = -x;
      lambda = -lambda;
    }
  }
}

bool same_singular_class(double lambda_a, const std::vector<std::vector<double>>& a,
                         double lambda_b, const std::vector<std::vector<double>>& b,
                         double tol) {
  if (a.size() != b.size()) return false;
  const int d = static_cast<int>(a.size());
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    const int flips = __builtin_popcount(mask);
    const double lam = (flips % 2 == 0) ? lambda_a : -lambda_a;
    if (std::abs(lam - lambda_b) > tol) continue;
    bool ok = true;
    for (int i = 0; ok && i < d; ++i) {
      const double sgn = (mask & (1u << i)) ? -1.0 : 1.0;
      double worst = 0;
      for (std::size_t k = 0; k < a[static_cast<std::size_t>(i)].size(); ++k)
        worst = std::max(worst, std::abs(sgn * a[static_cast<std::size_t>(i)][k] -
                                         b[static_cast<std::size_t>(i)][k]));
      ok = worst <= tol;
    }
    if (ok) return true;
  }
  return false;
}

namespace {

constexpr double kClassTol = 1e-6;  // dedup tolerance, well under basin separation

std::vector<std::vector<double>> svd_init(const DenseTensor<double>& t) {
  const int d = t.order();
  std::vector<std::vector<double>> init(static_cast<std::size_t>(d));
  Index idx(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < d; ++i) {
    const int rows = t.dim(i);
    const int cols = static_cast<int>(t.size()) / rows;
    Eigen::MatrixXd m(rows, cols);
    std::fill(idx.begin(), idx.end(), 0);
    std::size_t f = 0;
    do {
      // column index: remaining modes in row-major order
      int col = 0;
      for (int j = 0; j < d; ++j)
        if (j != i) col = col * t.dim(j) + idx[static_cast<std::size_t>(j)];
      m(idx[static_cast<std::size_t>(i)], col) = t.data()[f++];
    } while (next_index(idx, t.shape()));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    init[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) init[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] = svd.matrixU()(r, 0);
  }
  return init;
}

std::vector<std::vector<double>> random_unit_init(const Index& shape, std::uint64_t seed) {
  DeterministicRng rng(seed);
  std::vector<std::vector<double>> init(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    auto& v = init[i];
    v.resize(static_cast<std::size_t>(shape[i]));
    double n = 0;
    do {
      for (double& x : v) x = rng.normal();
      n = vec_norm(v);
    } while (n < 1e-150);
    for (double& x : v) x /= n;
  }
  return init;
}

ApproxResult result_from_pair(const DenseTensor<double>& t, double lambda,
                              std::vector<std::vector<double>> vectors) {
  if (lambda < 0) {
    lambda = -lambda;
    for (double& x : vectors[0]) x = -x;
  }
  ApproxResult res;
  res.scale = lambda;
  res.value = rayleigh(t, vectors);
  res.residual = hs_norm(t - outer(vectors) * lambda);
  res.vectors = std::move(vectors);
  return res;
}

}  // namespace

RankOneSummary best_rank_one(const DenseTensor<double>& t, int restarts, std::uint64_t seed,
                             double tol) {
  if (restarts < 1) throw PreconditionViolation("best_rank_one needs restarts >= 1");
  if (hs_norm(t) == 0) throw PreconditionViolation("best_rank_one needs a nonzero tensor");

  std::vector<SingularPair> runs(static_cast<std::size_t>(restarts));
  parallel_for(restarts, [&](int k) {
    auto init = (k == 0) ? svd_init(t) : random_unit_init(t.shape(), mix_seed(seed, static_cast<std::uint64_t>(k)));
    SingularPair p = hopm(t, std::move(init), tol, 500);
    // degenerate runs retry with a fresh seed, still charged to this slot
    for (int attempt = 1; p.status == SolveStatus::degenerate && attempt <= 3; ++attempt) {
      auto fresh = random_unit_init(
          t.shape(), mix_seed(seed, static_cast<std::uint64_t>(k) * 1000 + static_cast<std::uint64_t>(attempt)));
      p = hopm(t, std::move(fresh), tol, 500);
    }
    runs[static_cast<std::size_t>(k)] = std::move(p);
  });

  RankOneSummary summary;
  summary.restarts = restarts;
  for (auto& run : runs) {
    if (run.status != SolveStatus::converged) {
      ++summary.failed_restarts;
      continue;
    }
    double lam = run.lambda;
    auto vecs = run.vectors;
    canonicalize_singular(lam, vecs);
    bool merged = false;
    for (auto& cls : summary.classes) {
      if (same_singular_class(lam, vecs, cls.lambda, cls.vectors, kClassTol)) {
        ++cls.hits;
        if (run.residual < cls.residual) {
          cls.lambda = lam;
          cls.vectors = vecs;
          cls.residual = run.residual;
          cls.value = std::abs(lam);
        }
        merged = true;
        break;
      }
    }
    if (!merged)
      summary.classes.push_back({lam, std::move(vecs), std::abs(lam), run.residual, 1});
  }
  if (summary.classes.empty())
    throw SolverError("all restarts failed to converge");

  std::stable_sort(summary.classes.begin(), summary.classes.end(),
                   [](const PairClass& x, const PairClass& y) { return x.value > y.value; });
  const double best_value = summary.classes.front().value;
  for (const auto& cls : summary.classes)
    if (cls.value >= best_value - std::max(tol, 1e-12)) ++summary.tied_classes;

  summary.best = result_from_pair(t, summary.classes.front().lambda,
                                  summary.classes.front().vectors);
  return summary;
}

RankOneSummary nonneg_best_rank_one(const NonnegTensor<double>& t, int restarts,
                                    std::uint64_t seed, double tol) {
  RankOneSummary summary = best_rank_one(t.tensor(), restarts, seed, tol);
  auto vecs = summary.best.vectors;
  for (auto& v : vecs)
    for (double& x : v) x = std::abs(x);
  SingularPair polished = hopm(t.tensor(), std::move(vecs), tol, 500);
  // for nonnegative input the contractions keep nonnegative iterates nonnegative
  for (auto& v : polished.vectors)
    for (double& x : v) x = std::max(x, 0.0);
  summary.best = result_from_pair(t.tensor(), polished.lambda, std::move(polished.vectors));
  return summary;
}

SingularPair perron_fixed_point(const DenseTensor<double>& t, double tol, int max_iters) {
  if (!is_entrywise_positive(t))
    throw PreconditionViolation("perron_fixed_point needs a strictly positive tensor");
  const int d = t.order();
  const double scale = hs_norm(t);

  // l1-normalized tuple: sum_i |u_i|_1 = 1
  std::vector<std::vector<double>> q(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    q[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(t.dim(i)),
                                          1.0 / (d * t.dim(i)));

  SingularPair pair;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<std::vector<double>> w(static_cast<std::size_t>(d));
    double total = 0;
    for (int i = 0; i < d; ++i) {
      w[static_cast<std::size_t>(i)] = contract_except(t, i, others(q, i));
      for (double x : w[static_cast<std::size_t>(i)]) total += std::abs(x);
    }
    if (total <= 0) throw SolverError("perron map vanished on a positive tensor");
    for (auto& wi : w)
      for (double& x : wi) x /= total;
    q = std::move(w);

    // l2-normalized view for the convergence check
    auto u = q;
    for (auto& ui : u) vec_normalize(ui);
    const double lambda = rayleigh(t, u);
    const double res = pair_residual(t, lambda, u);
    if (res <= tol * std::max(1.0, scale)) {
      pair.lambda = lambda;
      pair.vectors = std::move(u);
      pair.residual = res;
      pair.status = SolveStatus::converged;
      pair.sweeps = iter + 1;
      return pair;
    }
  }
  auto u = q;
  for (auto& ui : u) vec_normalize(ui);
  pair.lambda = rayleigh(t, u);
  pair.residual = pair_residual(t, pair.lambda, u);
  pair.vectors = std::move(u);
  pair.status = SolveStatus::max_sweeps_reached;
  pair.sweeps = max_iters;
  return pair;
}

}  // namespace tenscert
