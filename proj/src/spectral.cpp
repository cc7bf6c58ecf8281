#include "tenscert/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>

#include "tenscert/parallel.hpp"

namespace tenscert {

namespace {

// Acklam's rational approximation of the standard normal quantile.
double inv_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    const double q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

double frac(double x) { return x - std::floor(x); }

constexpr double kGoldenConjugate = 0.6180339887498948482;
constexpr double kSqrtPrimes[] = {1.4142135623730951, 1.7320508075688772, 2.23606797749979,
                                  2.6457513110645907, 3.3166247903554, 3.605551275463989,
                                  4.123105625617661, 4.358898943540674, 4.795831523312719,
                                  5.385164807134504};

}  // namespace

std::vector<double> sphere_sequence_point(int n, long k) {
  if (n == 1) return {1.0};
  if (n == 2) {
    const double theta = 3.14159265358979323846 * frac((static_cast<double>(k) + 1.0) * kGoldenConjugate);
    return {std::cos(theta), std::sin(theta)};
  }
  std::vector<double> v(static_cast<std::size_t>(n));
  double norm2 = 0;
  for (int j = 0; j < n; ++j) {
    const double alpha = frac(kSqrtPrimes[static_cast<std::size_t>(j % 10)] + 0.1 * (j / 10));
    const double x = std::clamp(frac((static_cast<double>(k) + 1.0) * alpha), 1e-12, 1 - 1e-12);
    v[static_cast<std::size_t>(j)] = inv_normal_cdf(x);
    norm2 += v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
  }
  if (norm2 < 1e-200) {
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = 1.0;
    return v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::vector<double>> drop_mode(const std::vector<std::vector<double>>& vecs, int skip) {
  std::vector<std::vector<double>> out;
  out.reserve(vecs.size() - 1);
  for (int j = 0; j < static_cast<int>(vecs.size()); ++j)
    if (j != skip) out.push_back(vecs[static_cast<std::size_t>(j)]);
  return out;
}

// Matrix of the bilinear form obtained by contracting T in every mode except
// i (rows) and j (cols) with the current vectors.
MatrixXd pair_mode_matrix(const DenseTensor<double>& t, int mode_i, int mode_j,
                          const std::vector<std::vector<double>>& u) {
  MatrixXd m = MatrixXd::Zero(t.dim(mode_i), t.dim(mode_j));
  Index idx(static_cast<std::size_t>(t.order()), 0);
  std::size_t f = 0;
  do {
    double w = t.data()[f++];
    for (int k = 0; k < t.order(); ++k) {
      if (k == mode_i || k == mode_j) continue;
      w *= u[static_cast<std::size_t>(k)][static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
    }
    m(idx[static_cast<std::size_t>(mode_i)], idx[static_cast<std::size_t>(mode_j)]) += w;
  } while (next_index(idx, t.shape()));
  return m;
}

struct NewtonOutcome {
  bool accepted = false;
  double lambda = 0;
  std::vector<std::vector<double>> vectors;
  double residual = 0;
};

double singular_pair_residual(const DenseTensor<double>& t, double lambda,
                              const std::vector<std::vector<double>>& u) {
  double worst = 0;
  for (int i = 0; i < t.order(); ++i) {
    const auto c = contract_except(t, i, drop_mode(u, i));
    double s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double dd = c[k] - lambda * u[static_cast<std::size_t>(i)][k];
      s += dd * dd;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

// Damped Newton on the square stationarity system with one multiplier per
// mode (the multipliers coincide with the rayleigh value at any solution).
NewtonOutcome newton_singular(const DenseTensor<double>& t,
                              std::vector<std::vector<double>> u, double tol) {
  const int d = t.order();
  const double scale = std::max(1.0, max_abs(t));
  int total_dim = 0;
  for (int i = 0; i < d; ++i) total_dim += t.dim(i);
  const int n_all = total_dim + d;

  std::vector<double> lambdas(static_cast<std::size_t>(d), rayleigh(t, u));

  auto build_residual = [&](const std::vector<std::vector<double>>& uu,
                            const std::vector<double>& ll) {
    VectorXd f(n_all);
    int row = 0;
    for (int i = 0; i < d; ++i) {
      const auto c = contract_except(t, i, drop_mode(uu, i));
      for (int a = 0; a < t.dim(i); ++a)
        f(row++) = c[static_cast<std::size_t>(a)] -
                   ll[static_cast<std::size_t>(i)] * uu[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
    }
    for (int i = 0; i < d; ++i) {
      f(row++) = 0.5 * (vec_dot(uu[static_cast<std::size_t>(i)], uu[static_cast<std::size_t>(i)]) - 1.0);
    }
    return f;
  };

  VectorXd f = build_residual(u, lambdas);
  for (int iter = 0; iter < 80; ++iter) {
    if (f.lpNorm<Eigen::Infinity>() <= 1e-13 * scale) break;
    MatrixXd jac = MatrixXd::Zero(n_all, n_all);
    int row = 0;
    std::vector<int> offsets(static_cast<std::size_t>(d), 0);
    for (int i = 1; i < d; ++i)
      offsets[static_cast<std::size_t>(i)] = offsets[static_cast<std::size_t>(i - 1)] + t.dim(i - 1);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (j == i) {
          for (int a = 0; a < t.dim(i); ++a)
            jac(row + a, offsets[static_cast<std::size_t>(i)] + a) -= lambdas[static_cast<std::size_t>(i)];
        } else {
          jac.block(row, offsets[static_cast<std::size_t>(j)], t.dim(i), t.dim(j)) =
              pair_mode_matrix(t, i, j, u);
        }
      }
      for (int a = 0; a < t.dim(i); ++a)
        jac(row + a, total_dim + i) = -u[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
      row += t.dim(i);
    }
    for (int i = 0; i < d; ++i) {
      for (int a = 0; a < t.dim(i); ++a)
        jac(row, offsets[static_cast<std::size_t>(i)] + a) = u[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
      ++row;
    }

    const VectorXd step = Eigen::ColPivHouseholderQR<MatrixXd>(jac).solve(-f);
    if (!step.allFinite()) break;

    const double f0 = f.squaredNorm();
    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      auto u_try = u;
      auto l_try = lambdas;
      int pos = 0;
      for (int i = 0; i < d; ++i)
        for (int a = 0; a < t.dim(i); ++a)
          u_try[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] += alpha * step(pos++);
      for (int i = 0; i < d; ++i) l_try[static_cast<std::size_t>(i)] += alpha * step(total_dim + i);
      const VectorXd f_try = build_residual(u_try, l_try);
      if (f_try.squaredNorm() <= f0 * (1.0 - 1e-4 * alpha)) {
        u = std::move(u_try);
        lambdas = std::move(l_try);
        f = f_try;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }

  NewtonOutcome out;
  for (auto& ui : u) {
    const double n = vec_norm(ui);
    if (n < 1e-8) return out;  // collapsed iterate
    for (double& x : ui) x /= n;
  }
  out.lambda = rayleigh(t, u);
  out.residual = singular_pair_residual(t, out.lambda, u);
  out.vectors = std::move(u);
  out.accepted = out.residual <= tol;
  return out;
}

NewtonOutcome newton_eigen(const DenseTensor<double>& t, std::vector<double> u, double tol) {
  const int d = t.order();
  const int n = t.dim(0);
  const double scale = std::max(1.0, max_abs(t));

  auto contraction = [&](const std::vector<double>& uu) {
    std::vector<std::vector<double>> reps(static_cast<std::size_t>(d - 1), uu);
    return contract_except(t, 0, reps);
  };
  double lambda = 0;
  {
    const auto c = contraction(u);
    lambda = vec_dot(c, u);
  }

  auto build_residual = [&](const std::vector<double>& uu, double ll) {
    VectorXd f(n + 1);
    const auto c = contraction(uu);
    for (int a = 0; a < n; ++a)
      f(a) = c[static_cast<std::size_t>(a)] - ll * uu[static_cast<std::size_t>(a)];
    f(n) = 0.5 * (vec_dot(uu, uu) - 1.0);
    return f;
  };

  VectorXd f = build_residual(u, lambda);
  for (int iter = 0; iter < 80; ++iter) {
    if (f.lpNorm<Eigen::Infinity>() <= 1e-13 * scale) break;
    // d(contraction)/du = (d-1) * (contraction in all but the first two modes)
    std::vector<std::vector<double>> vecs(static_cast<std::size_t>(d), u);
    MatrixXd a_mat = pair_mode_matrix(t, 0, 1, vecs);
    MatrixXd jac = MatrixXd::Zero(n + 1, n + 1);
    jac.topLeftCorner(n, n) = (d - 1) * a_mat;
    for (int k = 0; k < n; ++k) {
      jac(k, k) -= lambda;
      jac(k, n) = -u[static_cast<std::size_t>(k)];
      jac(n, k) = u[static_cast<std::size_t>(k)];
    }
    const VectorXd step = Eigen::ColPivHouseholderQR<MatrixXd>(jac).solve(-f);
    if (!step.allFinite()) break;

    const double f0 = f.squaredNorm();
    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      auto u_try = u;
      for (int k = 0; k < n; ++k) u_try[static_cast<std::size_t>(k)] += alpha * step(k);
      const double l_try = lambda + alpha * step(n);
      const VectorXd f_try = build_residual(u_try, l_try);
      if (f_try.squaredNorm() <= f0 * (1.0 - 1e-4 * alpha)) {
        u = std::move(u_try);
        lambda = l_try;
        f = f_try;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }

  NewtonOutcome out;
  const double nrm = vec_norm(u);
  if (nrm < 1e-8) return out;
  for (double& x : u) x /= nrm;
  const auto c = contraction(u);
  out.lambda = vec_dot(c, u);
  double s = 0;
  for (int a = 0; a < n; ++a) {
    const double dd = c[static_cast<std::size_t>(a)] - out.lambda * u[static_cast<std::size_t>(a)];
    s += dd * dd;
  }
  out.residual = std::sqrt(s);
  out.vectors.push_back(std::move(u));
  out.accepted = out.residual <= tol;
  return out;
}

void canonicalize_eigen(int order, double& lambda, std::vector<double>& u) {
  if (order % 2 == 1 && std::abs(lambda) > 1e-9) {
    if (lambda < 0) {
      lambda = -lambda;
      for (double& x : u) x = -x;
    }
    return;
  }
  double peak = 0;
  for (double x : u) peak = std::max(peak, std::abs(x));
  for (double x : u) {
    if (std::abs(x) > 1e-7 * peak) {
      if (x < 0) {
        if (order % 2 == 1) lambda = -lambda;
        for (double& y : u) y = -y;
      }
      break;
    }
  }
}

bool same_eigen_class(int order, double la, const std::vector<double>& a, double lb,
                      const std::vector<double>& b, double tol) {
  auto close = [&](const std::vector<double>& x, const std::vector<double>& y, double sgn) {
    double worst = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
      worst = std::max(worst, std::abs(sgn * x[k] - y[k]));
    return worst <= tol;
  };
  if (std::abs(la - lb) <= tol && close(a, b, 1.0)) return true;
  const double la_flip = (order % 2 == 0) ? la : -la;
  return std::abs(la_flip - lb) <= tol && close(a, b, -1.0);
}

}  // namespace

PairInventory<SingularPair> enumerate_singular_pairs(const DenseTensor<double>& t,
                                                     int grid_density, double tol) {
  if (hs_norm(t) == 0) throw PreconditionViolation("cannot enumerate pairs of the zero tensor");
  if (t.size() > 256)
    throw PreconditionViolation("enumeration is limited to desk-scale shapes (<= 256 entries)");
  if (grid_density < 1) throw PreconditionViolation("grid density must be >= 1");

  const int d = t.order();
  std::vector<long> per_mode(static_cast<std::size_t>(d));
  long total = 1;
  for (int i = 0; i < d; ++i) {
    per_mode[static_cast<std::size_t>(i)] = (t.dim(i) == 1) ? 1 : grid_density;
    total *= per_mode[static_cast<std::size_t>(i)];
  }

  std::vector<NewtonOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(static_cast<int>(total), [&](int seed_idx) {
    long rest = seed_idx;
    std::vector<std::vector<double>> u(static_cast<std::size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
      const long g = per_mode[static_cast<std::size_t>(i)];
      u[static_cast<std::size_t>(i)] = sphere_sequence_point(t.dim(i), rest % g);
      rest /= g;
    }
    outcomes[static_cast<std::size_t>(seed_idx)] = newton_singular(t, std::move(u), tol);
  });

  PairInventory<SingularPair> inv;
  inv.order = d;
  inv.grid_density = grid_density;
  inv.tolerance = tol;
  inv.total_seeds = total;
  for (auto& oc : outcomes) {
    if (!oc.accepted) {
      ++inv.dropped_seeds;
      continue;
    }
    double lam = oc.lambda;
    auto vecs = oc.vectors;
    canonicalize_singular(lam, vecs);
    bool merged = false;
    for (std::size_t c = 0; c < inv.classes.size(); ++c) {
      if (same_singular_class(lam, vecs, inv.classes[c].lambda, inv.classes[c].vectors, 1e-6)) {
        ++inv.hits[c];
        if (oc.residual < inv.classes[c].residual) {
          inv.classes[c].lambda = lam;
          inv.classes[c].vectors = vecs;
          inv.classes[c].residual = oc.residual;
        }
        merged = true;
        break;
      }
    }
    if (!merged) {
      SingularPair p;
      p.lambda = lam;
      p.vectors = std::move(vecs);
      p.residual = oc.residual;
      p.status = SolveStatus::converged;
      inv.classes.push_back(std::move(p));
      inv.hits.push_back(1);
    }
  }

  std::vector<std::size_t> perm(inv.classes.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(inv.classes[x].lambda), ay = std::abs(inv.classes[y].lambda);
    if (ax != ay) return ax > ay;
    return inv.classes[x].lambda > inv.classes[y].lambda;
  });
  PairInventory<SingularPair> sorted = inv;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    sorted.classes[k] = inv.classes[perm[k]];
    sorted.hits[k] = inv.hits[perm[k]];
  }
  return sorted;
}

PairInventory<EigenPair> enumerate_eigenpairs(const SymTensor<double>& s, int grid_density,
                                              double tol) {
  const DenseTensor<double>& t = s.tensor();
  if (hs_norm(t) == 0)
    throw PreconditionViolation("zero tensor has a continuum of eigenvectors");
  if (t.size() > 256)
    throw PreconditionViolation("enumeration is limited to desk-scale shapes (<= 256 entries)");
  if (grid_density < 1) throw PreconditionViolation("grid density must be >= 1");

  const int d = t.order();
  const int n = t.dim(0);
  const long total = (n == 1) ? 1 : grid_density;

  std::vector<NewtonOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(static_cast<int>(total), [&](int k) {
    outcomes[static_cast<std::size_t>(k)] = newton_eigen(t, sphere_sequence_point(n, k), tol);
  });

  PairInventory<EigenPair> inv;
  inv.order = d;
  inv.grid_density = grid_density;
  inv.tolerance = tol;
  inv.total_seeds = total;
  for (auto& oc : outcomes) {
    if (!oc.accepted) {
      ++inv.dropped_seeds;
      continue;
    }
    double lam = oc.lambda;
    auto u = oc.vectors[0];
    canonicalize_eigen(d, lam, u);
    bool merged = false;
    for (std::size_t c = 0; c < inv.classes.size(); ++c) {
      if (same_eigen_class(d, lam, u, inv.classes[c].lambda, inv.classes[c].vector, 1e-6)) {
        ++inv.hits[c];
        if (oc.residual < inv.classes[c].residual) {
          inv.classes[c].lambda = lam;
          inv.classes[c].vector = u;
          inv.classes[c].residual = oc.residual;
        }
        merged = true;
        break;
      }
    }
    if (!merged) {
      inv.classes.push_back({lam, std::move(u), oc.residual});
      inv.hits.push_back(1);
    }
  }

  std::vector<std::size_t> perm(inv.classes.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(inv.classes[x].lambda), ay = std::abs(inv.classes[y].lambda);
    if (ax != ay) return ax > ay;
    return inv.classes[x].lambda > inv.classes[y].lambda;
  });
  PairInventory<EigenPair> sorted = inv;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    sorted.classes[k] = inv.classes[perm[k]];
    sorted.hits[k] = inv.hits[perm[k]];
  }
  return sorted;
}

Sigma2Result sigma2_condition(const SymTensor<double>& s, const std::vector<double>& u,
                              double tol) {
  if (s.order() != 3) throw PreconditionViolation("sigma2 condition is defined for order 3");
  const DenseTensor<double>& t = s.tensor();
  if (!is_entrywise_positive(t))
    throw PreconditionViolation("sigma2 condition requires an entrywise positive tensor");
  const int n = s.dim();
  if (static_cast<int>(u.size()) != n) throw PreconditionViolation("eigenvector length mismatch");

  std::vector<double> uu = u;
  vec_normalize(uu);
  const auto c = contract_except(t, 0, {uu, uu});
  const double rho = vec_dot(c, uu);
  double defect = 0;
  for (int a = 0; a < n; ++a)
    defect = std::max(defect, std::abs(c[static_cast<std::size_t>(a)] - rho * uu[static_cast<std::size_t>(a)]));
  if (defect > tol)
    throw PreconditionViolation("vector is not an eigenvector at the stated tolerance");

  // A[j][k] = <S, u x e_j x e_k>; restricted to the complement of u, sigma2 is
  // the distance of the form's range from zero.
  Eigen::MatrixXd a_mat = Eigen::MatrixXd::Zero(n, n);
  Index idx(3, 0);
  std::size_t f = 0;
  do {
    a_mat(idx[1], idx[2]) += t.data()[f++] * uu[static_cast<std::size_t>(idx[0])];
  } while (next_index(idx, t.shape()));

  Eigen::VectorXd uvec(n);
  for (int k = 0; k < n; ++k) uvec(k) = uu[static_cast<std::size_t>(k)];
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(uvec).householderQ();
  Eigen::MatrixXd comp = q.rightCols(n - 1);
  Eigen::MatrixXd b = comp.transpose() * a_mat * comp;
  b = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();

  Sigma2Result out;
  out.rho = rho;
  out.sigma2 = (lo <= 0.0 && 0.0 <= hi) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  out.certified = out.sigma2 >= rho / 2.0;
  return out;
}

}  // namespace tenscert
