// tenscert: best rank-one / nonnegative rank-r tensor approximation with
// algebraic uniqueness certificates and the deflation experiment.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tenscert/charpoly.hpp"
#include "tenscert/nnapprox.hpp"
#include "tenscert/rankone.hpp"
#include "tenscert/spectral.hpp"
#include "tenscert/tensor_io.hpp"

using nlohmann::json;
using namespace tenscert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitShape = 4;
constexpr int kExitPrecondition = 5;

std::string fnv1a_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  std::ostringstream hex;
  hex << "fnv1a64:" << std::hex << h;
  return hex.str();
}

json vectors_json(const std::vector<std::vector<double>>& vecs) {
  json arr = json::array();
  for (const auto& v : vecs) arr.push_back(v);
  return arr;
}

struct ReportWriter {
  std::string command;
  std::string input_path;
  json parameters = json::object();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  int emit(const json& results, const std::string& out_path) const {
    json report;
    report["command"] = command;
    report["inputs"] = {{input_path, fnv1a_digest(input_path)}};
    report["parameters"] = parameters;
    report["results"] = results;
    report["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      if (!out) throw ParseError("cannot write " + out_path);
      out << text;
    }
    return kExitOk;
  }
};

json kkt_json(const KKTReport& rep) {
  json j;
  j["max_equality_violation"] = rep.max_equality_violation;
  j["max_inequality_violation"] = rep.max_inequality_violation;
  if (rep.has_witness)
    j["witness"] = {{"mode", rep.witness.mode}, {"term", rep.witness.term}, {"coord", rep.witness.coord}};
  return j;
}

int run_approx(const std::string& input, int rank, bool nonneg, int restarts,
               std::uint64_t seed, double tol, const std::string& out) {
  ReportWriter rw{"approx", input};
  rw.parameters = {{"rank", rank}, {"nonneg", nonneg}, {"restarts", restarts},
                   {"seed", seed}, {"tol", tol}};
  const LoadedTensor lt = load_tensor(input);
  const DenseTensor<double> t = lt.as_double();
  json results;

  auto as_nonneg = [&]() -> NonnegTensor<double> {
    try {
      return NonnegTensor<double>(t);
    } catch (const std::invalid_argument& e) {
      throw PreconditionViolation(e.what());
    }
  };

  if (rank == 1) {
    RankOneSummary summary;
    if (nonneg)
      summary = nonneg_best_rank_one(as_nonneg(), restarts, seed, tol);
    else
      summary = best_rank_one(t, restarts, seed, tol);
    results["value"] = summary.best.value;
    results["scale"] = summary.best.scale;
    results["residual"] = summary.best.residual;
    results["factors"] = vectors_json(summary.best.vectors);
    results["tied_classes"] = summary.tied_classes;
    results["failed_restarts"] = summary.failed_restarts;
    json classes = json::array();
    for (const auto& cls : summary.classes)
      classes.push_back({{"lambda", cls.lambda}, {"value", cls.value},
                         {"residual", cls.residual}, {"hits", cls.hits}});
    results["classes"] = classes;
    SingularPair as_pair;
    as_pair.lambda = summary.best.scale;
    as_pair.vectors = summary.best.vectors;
    results["stationarity_violation"] = kkt_check_rank_one(t, as_pair);
    if (nonneg) {
      NNFactors f = NNFactors::from_terms(
          t.shape(), {[&] {
            auto vecs = summary.best.vectors;
            for (double& x : vecs[0]) x *= summary.best.scale;
            return vecs;
          }()});
      results["kkt"] = kkt_json(kkt_verify(t, f));
    }
  } else {
    const AnlsResult res = anls(as_nonneg(), rank, restarts, seed, tol);
    results["residual"] = res.residual;
    results["converged"] = res.converged;
    results["term_count"] = static_cast<int>(res.best.terms.size());
    json terms = json::array();
    for (const auto& term : res.best.terms) terms.push_back(vectors_json(term));
    results["terms"] = terms;
    results["kkt"] = kkt_json(kkt_verify(t, res.best));
    results["exact_rank"] = exact_rank_check(t, res.best, 1e-9);
    if (auto w = residual_positive_witness(t, res.best))
      results["positive_residual_witness"] = {{"index", w->index}, {"value", w->value}};
  }
  return rw.emit(results, out);
}

int run_certify(const std::string& input, bool /*symmetric_flag*/, const std::string& backend,
                const std::string& out, bool psi_only) {
  ReportWriter rw{psi_only ? "charpoly" : "certify", input};
  rw.parameters = {{"backend", backend}};
  const LoadedTensor lt = load_tensor(input);

  const bool use_rational = backend == "rational" || (backend == "auto" && lt.exact);
  json results;
  if (use_rational) {
    SymTensor<Rational> s = [&] {
      try {
        return SymTensor<Rational>(lt.as_rational());
      } catch (const std::invalid_argument& e) {
        throw ShapeUnsupported(e.what());
      }
    }();
    if (psi_only) {
      const auto psi = salmon_char_poly(s);
      json coeffs = json::array();
      if (psi.is_zero()) {
        coeffs.push_back("0");
      } else {
        for (const auto& c : psi.coeffs()) coeffs.push_back(rational_to_string(c));
      }
      results["psi"] = coeffs;
      results["backend"] = "rational";
    } else {
      const Certificate cert = certify_unique(s);
      results["psi"] = cert.psi;
      results["discriminant"] = cert.discriminant;
      results["verdict"] = verdict_name(cert.verdict);
      results["backend"] = cert.backend;
      results["symmetric"] = cert.symmetric;
      results["nonneg"] = cert.nonneg;
    }
  } else {
    SymTensor<double> s = [&] {
      try {
        return SymTensor<double>(lt.as_double());
      } catch (const std::invalid_argument& e) {
        throw ShapeUnsupported(e.what());
      }
    }();
    if (psi_only) {
      const auto psi = salmon_char_poly(s);
      json coeffs = json::array();
      if (psi.is_zero()) {
        coeffs.push_back("0");
      } else {
        for (double c : psi.coeffs()) coeffs.push_back(double_to_string(c));
      }
      results["psi"] = coeffs;
      results["backend"] = "float";
    } else {
      const Certificate cert = certify_unique(s);
      results["psi"] = cert.psi;
      results["discriminant"] = cert.discriminant;
      results["error_bound"] = double_to_string(cert.error_bound);
      results["verdict"] = verdict_name(cert.verdict);
      results["backend"] = cert.backend;
      results["symmetric"] = cert.symmetric;
      results["nonneg"] = cert.nonneg;
    }
  }
  return rw.emit(results, out);
}

int run_pairs(const std::string& input, const std::string& mode, int grid, double tol,
              const std::string& out) {
  ReportWriter rw{"pairs", input};
  rw.parameters = {{"mode", mode}, {"grid", grid}, {"tol", tol}};
  const LoadedTensor lt = load_tensor(input);
  const DenseTensor<double> t = lt.as_double();
  json results;
  results["mode"] = mode;
  json classes = json::array();
  if (mode == "eigen") {
    SymTensor<double> s = [&] {
      try {
        return SymTensor<double>(t);
      } catch (const std::invalid_argument& e) {
        throw PreconditionViolation(e.what());
      }
    }();
    const auto inv = enumerate_eigenpairs(s, grid, tol);
    for (std::size_t k = 0; k < inv.classes.size(); ++k)
      classes.push_back({{"lambda", inv.classes[k].lambda},
                         {"vector", inv.classes[k].vector},
                         {"residual", inv.classes[k].residual},
                         {"hits", inv.hits[k]}});
    results["total_seeds"] = inv.total_seeds;
    results["dropped_seeds"] = inv.dropped_seeds;
  } else {
    const auto inv = enumerate_singular_pairs(t, grid, tol);
    for (std::size_t k = 0; k < inv.classes.size(); ++k)
      classes.push_back({{"lambda", inv.classes[k].lambda},
                         {"vectors", vectors_json(inv.classes[k].vectors)},
                         {"residual", inv.classes[k].residual},
                         {"hits", inv.hits[k]}});
    results["total_seeds"] = inv.total_seeds;
    results["dropped_seeds"] = inv.dropped_seeds;
  }
  results["classes"] = classes;
  return rw.emit(results, out);
}

int run_deflate(const std::string& input, int restarts, std::uint64_t seed,
                const std::string& out) {
  ReportWriter rw{"deflate", input};
  rw.parameters = {{"restarts", restarts}, {"seed", seed}};
  const LoadedTensor lt = load_tensor(input);
  const DeflationReport rep = compare_deflation(lt.as_double(), restarts, seed);
  json results;
  results["sequential_residual"] = rep.sequential_residual;
  results["sequential_residual_unclipped"] = rep.sequential_residual_unclipped;
  results["joint_residual"] = rep.joint_residual;
  results["gap"] = rep.gap;
  results["overlap"] = rep.overlap;
  results["restarts"] = rep.restarts;
  results["seed"] = rep.seed;
  return rw.emit(results, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"best nonnegative tensor approximation with uniqueness certificates"};
  app.require_subcommand(1);

  std::string input, out, backend = "auto", mode = "singular";
  int rank = 1, restarts = 64, grid = 20;
  std::uint64_t seed = 0;
  double tol = 1e-12, pairs_tol = 1e-10;
  bool nonneg = false, symmetric_flag = false;

  auto* approx = app.add_subcommand("approx", "best rank-r approximation of a tensor file");
  approx->add_option("input", input)->required();
  approx->add_option("--rank", rank, "number of rank-one terms")->check(CLI::PositiveNumber);
  approx->add_flag("--nonneg", nonneg, "constrain factors to be nonnegative");
  approx->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  approx->add_option("--seed", seed);
  approx->add_option("--tol", tol);
  approx->add_option("--out", out);

  auto* certify = app.add_subcommand("certify", "uniqueness certificate via the eigen discriminant");
  certify->add_option("input", input)->required();
  certify->add_flag("--symmetric", symmetric_flag, "assert symmetric input");
  certify->add_option("--backend", backend)->check(CLI::IsMember({"auto", "rational", "float"}));
  certify->add_option("--out", out);

  auto* pairs = app.add_subcommand("pairs", "enumerate singular pairs or eigenpairs");
  pairs->add_option("input", input)->required();
  pairs->add_option("--mode", mode)->check(CLI::IsMember({"singular", "eigen"}));
  pairs->add_option("--grid", grid)->check(CLI::PositiveNumber);
  pairs->add_option("--tol", pairs_tol);
  pairs->add_option("--out", out);

  auto* deflate = app.add_subcommand("deflate", "deflation versus joint rank-2 experiment");
  deflate->add_option("input", input)->required();
  deflate->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  deflate->add_option("--seed", seed);
  deflate->add_option("--out", out);

  auto* charpoly = app.add_subcommand("charpoly", "characteristic polynomial of a symmetric 2x2x2 tensor");
  charpoly->add_option("input", input)->required();
  charpoly->add_option("--backend", backend)->check(CLI::IsMember({"auto", "rational", "float"}));
  charpoly->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (approx->parsed()) return run_approx(input, rank, nonneg, restarts, seed, tol, out);
    if (certify->parsed()) return run_certify(input, symmetric_flag, backend, out, false);
    if (pairs->parsed()) return run_pairs(input, mode, grid, pairs_tol, out);
    if (deflate->parsed()) return run_deflate(input, restarts, seed, out);
    if (charpoly->parsed()) return run_certify(input, false, backend, out, true);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ShapeUnsupported& e) {
    std::cerr << "unsupported shape: " << e.what() << "\n";
    return kExitShape;
  } catch (const PreconditionViolation& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
