#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <vector>

#include "tenscert/rng.hpp"
#include "tenscert/tensor.hpp"

namespace tenscert::testing {

// Real roots of a polynomial (ascending coefficients) via the companion
// matrix; test-side oracle only.
inline std::vector<double> real_roots(std::vector<double> coeffs, double imag_tol = 1e-8) {
  double scale = 0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0) return {};
  while (!coeffs.empty() && std::abs(coeffs.back()) <= 1e-12 * scale) coeffs.pop_back();
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) comp(0, k) = -coeffs[static_cast<std::size_t>(n - 1 - k)] / coeffs.back();
  for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  std::vector<double> roots;
  for (int k = 0; k < n; ++k)
    if (std::abs(es.eigenvalues()(k).imag()) <= imag_tol * std::max(1.0, std::abs(es.eigenvalues()(k))))
      roots.push_back(es.eigenvalues()(k).real());
  std::sort(roots.begin(), roots.end());
  return roots;
}

inline DenseTensor<double> random_tensor(const Index& shape, std::uint64_t seed,
                                         double lo = -1.0, double hi = 1.0) {
  DeterministicRng rng(seed);
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  std::vector<double> data(n);
  for (double& v : data) v = rng.uniform(lo, hi);
  return DenseTensor<double>(shape, std::move(data));
}

inline DenseTensor<double> random_nonneg_tensor(const Index& shape, std::uint64_t seed) {
  return random_tensor(shape, seed, 0.0, 1.0);
}

inline DenseTensor<double> random_positive_tensor(const Index& shape, std::uint64_t seed,
                                                  double lo = 0.1, double hi = 1.1) {
  return random_tensor(shape, seed, lo, hi);
}

inline std::vector<double> random_unit_vector(int n, DeterministicRng& rng) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double norm = 0;
  while (norm < 1e-12) {
    norm = 0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  for (double& x : v) x /= norm;
  return v;
}

inline std::vector<double> random_positive_unit_vector(int n, DeterministicRng& rng) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double norm = 0;
  for (double& x : v) {
    x = rng.uniform(0.2, 1.2);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

// sum of `terms` strictly positive rank-one terms
inline DenseTensor<double> random_positive_lowrank(const Index& shape, int terms,
                                                   std::uint64_t seed) {
  DeterministicRng rng(seed);
  DenseTensor<double> t = DenseTensor<double>::zeros(shape);
  for (int p = 0; p < terms; ++p) {
    std::vector<std::vector<double>> vecs;
    for (int s : shape) vecs.push_back(random_positive_unit_vector(s, rng));
    t = t + outer(vecs) * rng.uniform(0.5, 1.5);
  }
  return t;
}

// symmetric 3-tensor on R^2 from its independent entries
inline DenseTensor<double> sym32_tensor(double t111, double t112, double t122, double t222) {
  DenseTensor<double> t = DenseTensor<double>::zeros({2, 2, 2});
  t.at({0, 0, 0}) = t111;
  t.at({0, 0, 1}) = t.at({0, 1, 0}) = t.at({1, 0, 0}) = t112;
  t.at({0, 1, 1}) = t.at({1, 0, 1}) = t.at({1, 1, 0}) = t122;
  t.at({1, 1, 1}) = t222;
  return t;
}

template <typename S>
inline DenseTensor<S> sym32_tensor_of(S t111, S t112, S t122, S t222) {
  DenseTensor<S> t = DenseTensor<S>::zeros({2, 2, 2});
  t.at({0, 0, 0}) = t111;
  t.at({0, 0, 1}) = t.at({0, 1, 0}) = t.at({1, 0, 0}) = t112;
  t.at({0, 1, 1}) = t.at({1, 0, 1}) = t.at({1, 1, 0}) = t122;
  t.at({1, 1, 1}) = t222;
  return t;
}

// S = e1^3 + e2^3, the running non-uniqueness fixture
inline DenseTensor<double> fixture_s() { return sym32_tensor(1, 0, 0, 1); }

// general 2x2x2 fixture with entries 1 at (1,1,1) and (2,2,2)
inline DenseTensor<double> fixture_tprime_general() {
  DenseTensor<double> t = DenseTensor<double>::zeros({2, 2, 2});
  t.at({0, 0, 0}) = 1;
  t.at({1, 1, 1}) = 1;
  return t;
}

// symmetric fixture on the non-simple hypersurface: entries 1, 2*sqrt(3)-3, 6*sqrt(3)-10
inline DenseTensor<double> fixture_tprime_symmetric() {
  const double s3 = std::sqrt(3.0);
  return sym32_tensor(1.0, 0.0, 2.0 * s3 - 3.0, 6.0 * s3 - 10.0);
}

}  // namespace tenscert::testing
