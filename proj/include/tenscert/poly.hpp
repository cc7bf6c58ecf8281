#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace tenscert {

// Univariate polynomial, coefficients ascending in degree. The zero polynomial
// has an empty coefficient list; otherwise the leading coefficient is nonzero
// (exact scalars) or whatever the arithmetic produced (floating point).
template <typename S>
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<S> coeffs) : c_(std::move(coeffs)) { trim(); }
  explicit UniPoly(int v) : UniPoly(std::vector<S>{S(v)}) {}
  static UniPoly constant(S v) { return UniPoly(std::vector<S>{std::move(v)}); }
  static UniPoly identity() { return constant(S(1)); }
  // c0 + c1*x
  static UniPoly linear(S c0, S c1) { return UniPoly(std::vector<S>{std::move(c0), std::move(c1)}); }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<S>& coeffs() const { return c_; }
  S coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : S(0);
  }
  S leading() const {
    if (is_zero()) throw std::domain_error("zero polynomial has no leading coefficient");
    return c_.back();
  }

  S eval(const S& x) const {
    S acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  UniPoly derivative() const {
    if (c_.size() <= 1) return UniPoly();
    std::vector<S> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * S(static_cast<int>(k));
    return UniPoly(std::move(d));
  }

  UniPoly operator+(const UniPoly& o) const {
    std::vector<S> r(std::max(c_.size(), o.c_.size()), S(0));
    for (std::size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
    for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
    return UniPoly(std::move(r));
  }
  UniPoly operator-(const UniPoly& o) const {
    std::vector<S> r(std::max(c_.size(), o.c_.size()), S(0));
    for (std::size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
    for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] -= o.c_[k];
    return UniPoly(std::move(r));
  }
  UniPoly operator-() const {
    std::vector<S> r = c_;
    for (auto& v : r) v = -v;
    return UniPoly(std::move(r));
  }
  UniPoly operator*(const UniPoly& o) const {
    if (is_zero() || o.is_zero()) return UniPoly();
    std::vector<S> r(c_.size() + o.c_.size() - 1, S(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return UniPoly(std::move(r));
  }
  UniPoly operator*(const S& s) const {
    std::vector<S> r = c_;
    for (auto& v : r) v *= s;
    return UniPoly(std::move(r));
  }
  UniPoly& operator+=(const UniPoly& o) { return *this = *this + o; }
  UniPoly& operator-=(const UniPoly& o) { return *this = *this - o; }
  UniPoly& operator*=(const UniPoly& o) { return *this = *this * o; }

  bool operator==(const UniPoly& o) const { return c_ == o.c_; }

  // Long division over a field of coefficients: *this = q * div + rem.
  std::pair<UniPoly, UniPoly> divmod(const UniPoly& div) const {
    if (div.is_zero()) throw std::domain_error("polynomial division by zero");
    UniPoly rem = *this;
    if (rem.degree() < div.degree()) return {UniPoly(), rem};
    std::vector<S> q(static_cast<std::size_t>(rem.degree() - div.degree() + 1), S(0));
    const S lead = div.leading();
    while (!rem.is_zero() && rem.degree() >= div.degree()) {
      const int shift = rem.degree() - div.degree();
      const S factor = rem.leading() / lead;
      q[static_cast<std::size_t>(shift)] = factor;
      std::vector<S> sub(static_cast<std::size_t>(shift), S(0));
      sub.reserve(sub.size() + div.c_.size());
      for (const auto& dcv : div.c_) sub.push_back(dcv * factor);
      rem = rem - UniPoly(std::move(sub));
      // the leading term cancels by construction; enforce it for exact scalars
      if (rem.degree() == shift + div.degree()) {
        auto cc = rem.c_;
        cc.pop_back();
        rem = UniPoly(std::move(cc));
      }
    }
    return {UniPoly(std::move(q)), rem};
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == S(0)) c_.pop_back();
  }
  std::vector<S> c_;
};

// Exact quotient; the division must leave no remainder (Bareiss pivots).
template <typename S>
UniPoly<S> exact_div(const UniPoly<S>& a, const UniPoly<S>& b) {
  auto [q, r] = a.divmod(b);
  if (!r.is_zero()) throw std::domain_error("inexact polynomial division in fraction-free step");
  return q;
}

}  // namespace tenscert
