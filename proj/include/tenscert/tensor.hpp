#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace tenscert {

using Index = std::vector<int>;

// Dense d-way array, row-major with the last index fastest. Immutable by
// convention: operations return fresh values.
template <typename S>
class DenseTensor {
 public:
  DenseTensor() = default;

  DenseTensor(Index shape, std::vector<S> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.empty()) throw std::invalid_argument("tensor order must be >= 1");
    std::size_t n = 1;
    for (int s : shape_) {
      if (s < 1) throw std::invalid_argument("tensor dimensions must be >= 1");
      n *= static_cast<std::size_t>(s);
    }
    if (n != data_.size())
      throw std::invalid_argument("data length " + std::to_string(data_.size()) +
                                  " does not match shape product " + std::to_string(n));
  }

  static DenseTensor zeros(Index shape) {
    std::size_t n = 1;
    for (int s : shape) n *= static_cast<std::size_t>(std::max(s, 0));
    return DenseTensor(std::move(shape), std::vector<S>(n, S(0)));
  }

  int order() const { return static_cast<int>(shape_.size()); }
  const Index& shape() const { return shape_; }
  int dim(int mode) const { return shape_[static_cast<std::size_t>(mode)]; }
  std::size_t size() const { return data_.size(); }
  const std::vector<S>& data() const { return data_; }
  std::vector<S>& data() { return data_; }

  std::size_t flat(const Index& idx) const {
    std::size_t f = 0;
    for (int k = 0; k < order(); ++k) f = f * static_cast<std::size_t>(shape_[k]) + idx[k];
    return f;
  }
  const S& at(const Index& idx) const { return data_[flat(idx)]; }
  S& at(const Index& idx) { return data_[flat(idx)]; }

  bool cubical() const {
    return std::all_of(shape_.begin(), shape_.end(), [&](int s) { return s == shape_[0]; });
  }

  DenseTensor operator+(const DenseTensor& o) const {
    require_same_shape(o);
    DenseTensor r = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] += o.data_[k];
    return r;
  }
  DenseTensor operator-(const DenseTensor& o) const {
    require_same_shape(o);
    DenseTensor r = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] -= o.data_[k];
    return r;
  }
  DenseTensor operator*(const S& c) const {
    DenseTensor r = *this;
    for (auto& v : r.data_) v *= c;
    return r;
  }

  void require_same_shape(const DenseTensor& o) const {
    if (shape_ != o.shape_) throw std::invalid_argument("tensor shape mismatch");
  }

 private:
  Index shape_;
  std::vector<S> data_;
};

// Advances idx through the row-major index range of shape; false when exhausted.
inline bool next_index(Index& idx, const Index& shape) {
  for (int k = static_cast<int>(shape.size()) - 1; k >= 0; --k) {
    if (++idx[static_cast<std::size_t>(k)] < shape[static_cast<std::size_t>(k)]) return true;
    idx[static_cast<std::size_t>(k)] = 0;
  }
  return false;
}

// <T, u_1 x ... x u_d> with the mode-i vector omitted: a vector of length n_i.
template <typename S>
std::vector<S> contract_except(const DenseTensor<S>& t, int mode,
                               const std::vector<std::vector<S>>& vecs) {
  const int d = t.order();
  if (mode < 0 || mode >= d) throw std::invalid_argument("contraction mode out of range");
  if (static_cast<int>(vecs.size()) != d - 1)
    throw std::invalid_argument("contract_except expects d-1 vectors");
  for (int j = 0, v = 0; j < d; ++j) {
    if (j == mode) continue;
    if (static_cast<int>(vecs[static_cast<std::size_t>(v)].size()) != t.dim(j))
      throw std::invalid_argument("vector length does not match mode " + std::to_string(j));
    ++v;
  }
  std::vector<S> out(static_cast<std::size_t>(t.dim(mode)), S(0));
  Index idx(static_cast<std::size_t>(d), 0);
  std::size_t f = 0;
  do {
    S w = t.data()[f++];
    for (int j = 0, v = 0; j < d; ++j) {
      if (j == mode) continue;
      w *= vecs[static_cast<std::size_t>(v++)][static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
    }
    out[static_cast<std::size_t>(idx[static_cast<std::size_t>(mode)])] += w;
  } while (next_index(idx, t.shape()));
  return out;
}

// <T, u_1 x ... x u_d>: the multilinear form evaluated at d vectors.
template <typename S>
S rayleigh(const DenseTensor<S>& t, const std::vector<std::vector<S>>& vecs) {
  const int d = t.order();
  if (static_cast<int>(vecs.size()) != d) throw std::invalid_argument("rayleigh expects d vectors");
  for (int j = 0; j < d; ++j)
    if (static_cast<int>(vecs[static_cast<std::size_t>(j)].size()) != t.dim(j))
      throw std::invalid_argument("vector length does not match mode " + std::to_string(j));
  S acc(0);
  Index idx(static_cast<std::size_t>(d), 0);
  std::size_t f = 0;
  do {
    S w = t.data()[f++];
    for (int j = 0; j < d; ++j)
      w *= vecs[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
    acc += w;
  } while (next_index(idx, t.shape()));
  return acc;
}

template <typename S>
S inner(const DenseTensor<S>& a, const DenseTensor<S>& b) {
  a.require_same_shape(b);
  S acc(0);
  for (std::size_t k = 0; k < a.size(); ++k) acc += a.data()[k] * b.data()[k];
  return acc;
}

template <typename S>
S hs_norm_sq(const DenseTensor<S>& a) {
  return inner(a, a);
}

inline double hs_norm(const DenseTensor<double>& a) { return std::sqrt(hs_norm_sq(a)); }

// Segre outer product of d vectors.
template <typename S>
DenseTensor<S> outer(const std::vector<std::vector<S>>& vecs) {
  if (vecs.empty()) throw std::invalid_argument("outer product needs at least one vector");
  Index shape;
  for (const auto& v : vecs) {
    if (v.empty()) throw std::invalid_argument("outer product vector must be nonempty");
    shape.push_back(static_cast<int>(v.size()));
  }
  DenseTensor<S> out = DenseTensor<S>::zeros(shape);
  Index idx(vecs.size(), 0);
  std::size_t f = 0;
  do {
    S w(1);
    for (std::size_t j = 0; j < vecs.size(); ++j) w *= vecs[j][static_cast<std::size_t>(idx[j])];
    out.data()[f++] = w;
  } while (next_index(idx, shape));
  return out;
}

namespace detail {
inline const std::vector<std::vector<int>>& permutations_of(int d) {
  static std::vector<std::vector<std::vector<int>>> cache(8);
  auto& slot = cache[static_cast<std::size_t>(d)];
  if (slot.empty()) {
    std::vector<int> p(static_cast<std::size_t>(d));
    std::iota(p.begin(), p.end(), 0);
    do slot.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }
  return slot;
}
}  // namespace detail

// Averages T over all d! index permutations; identity on symmetric input.
template <typename S>
DenseTensor<S> symmetrize(const DenseTensor<S>& t) {
  if (!t.cubical()) throw std::invalid_argument("symmetrize needs a cubical tensor");
  const int d = t.order();
  const auto& perms = detail::permutations_of(d);
  DenseTensor<S> out = DenseTensor<S>::zeros(t.shape());
  const S inv_fact = S(1) / S(static_cast<int>(perms.size()));
  Index idx(static_cast<std::size_t>(d), 0), pidx(static_cast<std::size_t>(d), 0);
  std::size_t f = 0;
  do {
    S acc(0);
    for (const auto& p : perms) {
      for (int k = 0; k < d; ++k)
        pidx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(p[static_cast<std::size_t>(k)])];
      acc += t.at(pidx);
    }
    out.data()[f++] = acc * inv_fact;
  } while (next_index(idx, t.shape()));
  return out;
}

template <typename S>
bool is_entrywise_nonneg(const DenseTensor<S>& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](const S& v) { return v >= S(0); });
}

template <typename S>
bool is_entrywise_positive(const DenseTensor<S>& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](const S& v) { return v > S(0); });
}

// Entrywise-nonnegative tensor; construction checks the sign constraint.
template <typename S>
class NonnegTensor {
 public:
  explicit NonnegTensor(DenseTensor<S> t) : t_(std::move(t)) {
    if (!is_entrywise_nonneg(t_))
      throw std::invalid_argument("tensor has a negative entry");
  }
  const DenseTensor<S>& tensor() const { return t_; }

 private:
  DenseTensor<S> t_;
};

inline double max_abs(const DenseTensor<double>& t) {
  double m = 0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

// Checks invariance of entries under every index permutation. The tolerance is
// relative to the largest entry; pass 0 to require exact equality.
template <typename S>
bool is_symmetric(const DenseTensor<S>& t, double rel_tol) {
  if (!t.cubical()) return false;
  const int d = t.order();
  const auto& perms = detail::permutations_of(d);
  double scale = 1.0;
  if constexpr (std::is_same_v<S, double>) scale = std::max(1.0, max_abs(t));
  Index idx(static_cast<std::size_t>(d), 0), pidx(static_cast<std::size_t>(d), 0);
  do {
    for (const auto& p : perms) {
      for (int k = 0; k < d; ++k)
        pidx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(p[static_cast<std::size_t>(k)])];
      if constexpr (std::is_same_v<S, double>) {
        if (std::abs(t.at(idx) - t.at(pidx)) > rel_tol * scale) return false;
      } else {
        if (!(t.at(idx) == t.at(pidx))) return false;
      }
    }
  } while (next_index(idx, t.shape()));
  return true;
}

// Cubical tensor invariant under index permutations. Exact scalars are checked
// exactly; floating input within 1e-12 relative.
template <typename S>
class SymTensor {
 public:
  explicit SymTensor(DenseTensor<S> t, double rel_tol = default_tol())
      : t_(std::move(t)) {
    if (!t_.cubical()) throw std::invalid_argument("symmetric tensor must be cubical");
    if (!is_symmetric(t_, rel_tol))
      throw std::invalid_argument("tensor entries are not permutation invariant");
  }
  static constexpr double default_tol() { return std::is_same_v<S, double> ? 1e-12 : 0.0; }

  const DenseTensor<S>& tensor() const { return t_; }
  int dim() const { return t_.dim(0); }
  int order() const { return t_.order(); }

 private:
  DenseTensor<S> t_;
};

}  // namespace tenscert
