#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tenscert/rankone.hpp"
#include "tenscert/tensor.hpp"

namespace tenscert {

// Normalized eigenpair of a symmetric tensor: <T, u^(d-1)> = lambda u, |u| = 1.
struct EigenPair {
  double lambda = 0;
  std::vector<double> vector;
  double residual = 0;
};

// Deduplicated equivalence classes found by grid seeding plus Newton
// polishing. Seeds come from prefix-nested deterministic sphere sequences, so
// a higher grid_density re-runs a superset of the seeds (monotone discovery).
template <typename PairT>
struct PairInventory {
  std::vector<PairT> classes;
  std::vector<int> hits;  // converged seeds per class
  int order = 0;          // tensor order d (sign equivalence depends on it)
  int grid_density = 0;
  double tolerance = 0;
  long total_seeds = 0;
  int dropped_seeds = 0;  // Newton budget exhausted without convergence
};

PairInventory<SingularPair> enumerate_singular_pairs(const DenseTensor<double>& t,
                                                     int grid_density, double tol);

PairInventory<EigenPair> enumerate_eigenpairs(const SymTensor<double>& s, int grid_density,
                                              double tol);

struct SimpleCheck {
  bool simple = false;
  std::vector<int> witnesses;  // indices of the attaining classes
};

// lambda values attainable by representatives of the stored class
inline bool class_attains(const SingularPair& p, int /*order*/, double lambda_star, double tol) {
  return std::abs(p.lambda - lambda_star) <= tol || std::abs(-p.lambda - lambda_star) <= tol;
}
inline bool class_attains(const EigenPair& p, int order, double lambda_star, double tol) {
  const double flipped = (order % 2 == 0) ? p.lambda : -p.lambda;
  return std::abs(p.lambda - lambda_star) <= tol || std::abs(flipped - lambda_star) <= tol;
}

template <typename PairT>
SimpleCheck is_simple(const PairInventory<PairT>& inv, double lambda_star, double tol) {
  SimpleCheck out;
  for (int k = 0; k < static_cast<int>(inv.classes.size()); ++k)
    if (class_attains(inv.classes[static_cast<std::size_t>(k)], inv.order, lambda_star, tol))
      out.witnesses.push_back(k);
  out.simple = out.witnesses.size() == 1;
  return out;
}

struct Sigma2Result {
  double sigma2 = 0;
  double rho = 0;
  bool certified = false;  // sigma2 >= rho/2 certifies a unique best nonneg symmetric rank-one approx
};

// sigma2 = min |<S, u . v . v>| over unit v orthogonal to u; computed exactly
// as the smallest absolute value of the restricted quadratic form's range.
Sigma2Result sigma2_condition(const SymTensor<double>& s, const std::vector<double>& u,
                              double tol = 1e-8);

// k-th point of the deterministic unit-sphere sequence in dimension n
// (golden-angle lattice for n = 2, Kronecker lattice through the normal
// quantile map for n >= 3). Prefixes are nested by construction.
std::vector<double> sphere_sequence_point(int n, long k);

}  // namespace tenscert
