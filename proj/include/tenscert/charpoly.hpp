#pragma once

#include <string>
#include <vector>

#include "tenscert/errors.hpp"
#include "tenscert/matrix_det.hpp"
#include "tenscert/poly.hpp"
#include "tenscert/rational.hpp"
#include "tenscert/tensor.hpp"

namespace tenscert {

// Independent entries of a symmetric 3-tensor on a 2-dimensional space.
template <typename S>
struct Sym32 {
  S t111, t112, t122, t222;
};

template <typename S>
Sym32<S> sym32_entries(const SymTensor<S>& s) {
  if (s.order() != 3 || s.dim() != 2)
    throw ShapeUnsupported("characteristic polynomial is implemented for symmetric 2x2x2 tensors only");
  const auto& t = s.tensor();
  return {t.at({0, 0, 0}), t.at({0, 0, 1}), t.at({0, 1, 1}), t.at({1, 1, 1})};
}

// The characteristic polynomial of a symmetric 3-tensor on R^2, computed as
// det(G)/512 where G is the 6x6 Salmon matrix of the eigenpair system: three
// rows carry the quadrics of the system, three rows the gradient of their
// Jacobian determinant. Entries are polynomials of degree <= 2 in lambda.
// Only even powers lambda^6, lambda^4, lambda^2, 1 survive.
template <typename S>
UniPoly<S> salmon_char_poly(const SymTensor<S>& s);

// Determinant of the (deg p + deg q)-square Sylvester matrix. Degree-0 inputs
// fall back to the lc^deg convention; zero polynomials are rejected.
template <typename S>
SquareMatrix<S> sylvester_matrix(const UniPoly<S>& p, const UniPoly<S>& q);

template <typename S>
S sylvester_resultant(const UniPoly<S>& p, const UniPoly<S>& q);

struct ExactDiscriminant {
  Rational value;
  int sylvester_size = 0;
  UniPoly<Rational> psi;
};

struct FloatDiscriminant {
  double value = 0;
  double error_bound = 0;  // randomized perturbation estimate, heuristic
  int sylvester_size = 0;
  UniPoly<double> psi;
};

// Resultant of psi and psi'. Vanishes exactly on the tensors with a non-simple
// normalized eigenvalue; nonvanishing certifies a unique best symmetric
// rank-one approximation. Throws SolverError when psi is identically zero.
ExactDiscriminant eigen_discriminant(const SymTensor<Rational>& s);
FloatDiscriminant eigen_discriminant(const SymTensor<double>& s);

enum class Verdict { certified_unique, not_certified, indeterminate };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::certified_unique: return "certified-unique";
    case Verdict::not_certified: return "not-certified";
    default: return "indeterminate";
  }
}

struct Certificate {
  Verdict verdict = Verdict::indeterminate;
  std::string discriminant;          // exact "p/q" or shortest float form
  double error_bound = 0;            // float backend only
  std::vector<std::string> psi;      // ascending coefficients
  std::string backend;               // "rational" | "float"
  bool symmetric = true;
  bool nonneg = false;
};

// Uniqueness certificate for the best symmetric (nonnegative) rank-one
// approximation. The condition is sufficient only: not-certified or
// indeterminate does not assert non-uniqueness.
Certificate certify_unique(const SymTensor<Rational>& s);
Certificate certify_unique(const SymTensor<double>& s);

std::string double_to_string(double v);

}  // namespace tenscert
