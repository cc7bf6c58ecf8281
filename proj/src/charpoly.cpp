#include "tenscert/charpoly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "tenscert/rng.hpp"

namespace tenscert {

namespace {

template <typename S>
UniPoly<S> salmon_det(const Sym32<S>& e) {
  using P = UniPoly<S>;
  const S a = e.t111, b = e.t112, c = e.t122, d = e.t222;
  auto k = [](S v) { return P::constant(std::move(v)); };
  auto kl = [](S v) { return P::linear(S(0), std::move(v)); };       // v * lambda
  auto kl2 = [](S v) {                                               // v * lambda^2
    return P(std::vector<S>{S(0), S(0), std::move(v)});
  };

  // Rows 1-3: the two eigen quadrics and the sphere; rows 4-6: the gradient of
  // the Jacobian determinant of the system. Column monomials are
  // x^2, y^2, z^2, xy, xz, yz. The printed form of this matrix in the source
  // derivation drops a factor of lambda in entry (4,1); the entry below is the
  // coefficient of x^2 in dJ/dx, which carries it.
  SquareMatrix<P> g(6);
  g[0] = {k(a), k(c), k(S(0)), k(b * S(2)), kl(S(-1)), k(S(0))};
  g[1] = {k(b), k(d), k(S(0)), k(c * S(2)), k(S(0)), kl(S(-1))};
  g[2] = {k(S(1)), k(S(1)), k(S(-1)), k(S(0)), k(S(0)), k(S(0))};
  g[3] = {kl(c * S(12)),
          kl(a * S(4) - c * S(8)),
          kl(a * S(4) + c * S(4)),
          kl(d * S(8) - b * S(16)),
          k(b * b * S(16) - a * c * S(16)) + kl2(S(-4)),
          k(b * c * S(8) - a * d * S(8))};
  g[4] = {kl(d * S(4) - b * S(8)),
          kl(b * S(12)),
          kl(b * S(4) + d * S(4)),
          kl(a * S(8) - c * S(16)),
          k(b * c * S(8) - a * d * S(8)),
          k(c * c * S(16) - b * d * S(16)) + kl2(S(-4))};
  g[5] = {k(b * b * S(8) - a * c * S(8)) + kl2(S(-2)),
          k(c * c * S(8) - d * b * S(8)) + kl2(S(-2)),
          kl2(S(-6)),
          k(b * c * S(8) - a * d * S(8)),
          kl(c * S(8) + a * S(8)),
          kl(b * S(8) + d * S(8))};

  if constexpr (std::is_same_v<S, Rational>) {
    return det_bareiss(std::move(g));
  } else {
    return det_minor_expansion(g);
  }
}

}  // namespace

template <typename S>
UniPoly<S> salmon_char_poly(const SymTensor<S>& s) {
  const Sym32<S> e = sym32_entries(s);
  return salmon_det(e) * (S(1) / S(512));
}

template UniPoly<Rational> salmon_char_poly(const SymTensor<Rational>&);
template UniPoly<double> salmon_char_poly(const SymTensor<double>&);

template <typename S>
SquareMatrix<S> sylvester_matrix(const UniPoly<S>& p, const UniPoly<S>& q) {
  if (p.is_zero() || q.is_zero())
    throw PreconditionViolation("resultant of a zero polynomial is undefined");
  const int m = p.degree(), n = q.degree();
  const std::size_t size = static_cast<std::size_t>(m + n);
  SquareMatrix<S> syl(size, std::vector<S>(size, S(0)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k)
      syl[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + k)] = p.coeff(m - k);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k)
      syl[static_cast<std::size_t>(n + i)][static_cast<std::size_t>(i + k)] = q.coeff(n - k);
  return syl;
}

template SquareMatrix<Rational> sylvester_matrix(const UniPoly<Rational>&, const UniPoly<Rational>&);
template SquareMatrix<double> sylvester_matrix(const UniPoly<double>&, const UniPoly<double>&);

template <typename S>
S sylvester_resultant(const UniPoly<S>& p, const UniPoly<S>& q) {
  auto syl = sylvester_matrix(p, q);
  if constexpr (std::is_same_v<S, Rational>) {
    return det_bareiss(std::move(syl));
  } else {
    return det_minor_expansion(syl);
  }
}

template Rational sylvester_resultant(const UniPoly<Rational>&, const UniPoly<Rational>&);
template double sylvester_resultant(const UniPoly<double>&, const UniPoly<double>&);

ExactDiscriminant eigen_discriminant(const SymTensor<Rational>& s) {
  UniPoly<Rational> psi = salmon_char_poly(s);
  if (psi.is_zero())
    throw SolverError("characteristic polynomial is identically zero; discriminant indeterminate");
  if (psi.degree() == 0)
    throw SolverError("characteristic polynomial is constant; discriminant indeterminate");
  ExactDiscriminant out;
  out.psi = psi;
  const UniPoly<Rational> dpsi = psi.derivative();
  out.sylvester_size = psi.degree() + dpsi.degree();
  out.value = sylvester_resultant(psi, dpsi);
  return out;
}

namespace {

double discriminant_once(const Sym32<double>& e, int* size_out) {
  UniPoly<double> psi = salmon_det(e) * (1.0 / 512.0);
  if (psi.is_zero() || psi.degree() == 0) {
    if (size_out) *size_out = 0;
    return psi.is_zero() ? 0.0 : 1.0;
  }
  const UniPoly<double> dpsi = psi.derivative();
  if (size_out) *size_out = psi.degree() + dpsi.degree();
  return sylvester_resultant(psi, dpsi);
}

}  // namespace

FloatDiscriminant eigen_discriminant(const SymTensor<double>& s) {
  const Sym32<double> e = sym32_entries(s);
  UniPoly<double> psi = salmon_char_poly(s);
  double psi_scale = 0;
  for (double c : psi.coeffs()) psi_scale = std::max(psi_scale, std::abs(c));
  if (psi.is_zero() || psi_scale == 0.0)
    throw SolverError("characteristic polynomial is identically zero; discriminant indeterminate");
  if (psi.degree() == 0)
    throw SolverError("characteristic polynomial is constant; discriminant indeterminate");

  FloatDiscriminant out;
  out.psi = psi;
  out.value = discriminant_once(e, &out.sylvester_size);

  // Heuristic error bar: re-evaluate under 20 componentwise relative
  // perturbations at 1e-12 and take a multiple of the largest deviation.
  DeterministicRng rng(0x7E5C2A1B9D3F4E60ULL);
  double spread = 0;
  for (int k = 0; k < 20; ++k) {
    Sym32<double> pe = e;
    for (double* v : {&pe.t111, &pe.t112, &pe.t122, &pe.t222})
      *v *= 1.0 + 1e-12 * rng.uniform(-1.0, 1.0);
    int size = 0;
    const double d = discriminant_once(pe, &size);
    if (size != out.sylvester_size) continue;  // degree fell; sample not comparable
    spread = std::max(spread, std::abs(d - out.value));
  }
  out.error_bound = 4.0 * spread + 1e-300;
  return out;
}

std::string double_to_string(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

template <typename S>
std::vector<std::string> psi_strings(const UniPoly<S>& psi) {
  std::vector<std::string> out;
  if (psi.is_zero()) return {"0"};
  for (const auto& c : psi.coeffs()) {
    if constexpr (std::is_same_v<S, Rational>)
      out.push_back(rational_to_string(c));
    else
      out.push_back(double_to_string(c));
  }
  return out;
}

}  // namespace

Certificate certify_unique(const SymTensor<Rational>& s) {
  const ExactDiscriminant d = eigen_discriminant(s);
  Certificate cert;
  cert.backend = "rational";
  cert.psi = psi_strings(d.psi);
  cert.discriminant = rational_to_string(d.value);
  cert.nonneg = is_entrywise_nonneg(s.tensor());
  cert.verdict = (d.value != 0) ? Verdict::certified_unique : Verdict::not_certified;
  return cert;
}

Certificate certify_unique(const SymTensor<double>& s) {
  const FloatDiscriminant d = eigen_discriminant(s);
  Certificate cert;
  cert.backend = "float";
  cert.psi = psi_strings(d.psi);
  cert.discriminant = double_to_string(d.value);
  cert.error_bound = d.error_bound;
  cert.nonneg = is_entrywise_nonneg(s.tensor());
  cert.verdict = (std::abs(d.value) > d.error_bound) ? Verdict::certified_unique
                                                     : Verdict::indeterminate;
  return cert;
}

}  // namespace tenscert
