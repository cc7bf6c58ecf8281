#pragma once

#include <cstdint>
#include <vector>

#include "tenscert/errors.hpp"
#include "tenscert/tensor.hpp"

namespace tenscert {

enum class SolveStatus { converged, max_sweeps_reached, degenerate };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_sweeps_reached: return "max-sweeps-reached";
    default: return "degenerate";
  }
}

// Normalized singular pair: <T, u_1 x..x u_{i-1} x u_{i+1} x..x u_d> = lambda u_i
// with unit u_i. residual is the worst mode-wise defect of those equations.
struct SingularPair {
  double lambda = 0;
  std::vector<std::vector<double>> vectors;
  double residual = 0;
  SolveStatus status = SolveStatus::converged;
  int sweeps = 0;
  std::vector<double> sweep_values;  // |rayleigh| trace, nondecreasing
};

// Rank-one representative lambda * u_1 x ... x u_d with lambda >= 0.
struct ApproxResult {
  double scale = 0;
  std::vector<std::vector<double>> vectors;
  double value = 0;     // rayleigh at the vectors
  double residual = 0;  // ||T - scale * outer(vectors)||
};

// Equivalence class of stationary pairs under mode-wise sign flips
// (flipping vectors in a set K sends lambda to (-1)^|K| lambda and leaves the
// rank-one tensor lambda * outer(u) unchanged).
struct PairClass {
  double lambda = 0;  // canonical representative
  std::vector<std::vector<double>> vectors;
  double value = 0;  // |lambda|
  double residual = 0;
  int hits = 0;
};

struct RankOneSummary {
  ApproxResult best;
  std::vector<PairClass> classes;  // distinct converged classes, best value first
  int tied_classes = 0;            // classes attaining the best value within tol
  int failed_restarts = 0;
  int restarts = 0;
};

// One run of the higher-order power method (alternating unit-vector
// maximization of the multilinear form) from the given unit initialization.
SingularPair hopm(const DenseTensor<double>& t, std::vector<std::vector<double>> init,
                  double tol = 1e-12, int max_sweeps = 500);

// Multistart: restart 0 seeds from the dominant left singular vectors of the
// mode unfoldings, later restarts from seeded random unit vectors. Restarts
// run in parallel with a deterministic merge. Throws SolverError if every
// restart fails.
RankOneSummary best_rank_one(const DenseTensor<double>& t, int restarts, std::uint64_t seed,
                             double tol = 1e-12);

// Nonnegative variant: entrywise absolute value of the unconstrained optimum,
// re-polished; for nonnegative input this loses nothing.
RankOneSummary nonneg_best_rank_one(const NonnegTensor<double>& t, int restarts,
                                    std::uint64_t seed, double tol = 1e-12);

// Fixed-point iteration of the l1-normalized contraction map on a strictly
// positive tensor; converges to a strictly positive normalized singular pair
// with lambda > 0, rescaled to unit l2 norms at the end.
SingularPair perron_fixed_point(const DenseTensor<double>& t, double tol = 1e-12,
                                int max_iters = 5000);

// max_i || <T, u except i> - lambda u_i ||; zero iff the pair is stationary.
double kkt_check_rank_one(const DenseTensor<double>& t, const SingularPair& pair);

// --- class bookkeeping shared with the enumeration module ---

// Same class iff some sign pattern eps in {+-1}^d aligns the vectors within
// tol and matches lambda up to the induced sign (-1)^{#flips}.
bool same_singular_class(double lambda_a, const std::vector<std::vector<double>>& a,
                         double lambda_b, const std::vector<std::vector<double>>& b, double tol);

// Flip signs so every vector's first nonzero entry is positive; lambda picks
// up the product of flips.
void canonicalize_singular(double& lambda, std::vector<std::vector<double>>& vectors);

double vec_norm(const std::vector<double>& v);
double vec_dot(const std::vector<double>& a, const std::vector<double>& b);
void vec_normalize(std::vector<double>& v);

}  // namespace tenscert
