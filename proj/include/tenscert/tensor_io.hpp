#pragma once

#include <string>
#include <vector>

#include "tenscert/errors.hpp"
#include "tenscert/rational.hpp"
#include "tenscert/tensor.hpp"

namespace tenscert {

// Tensor file contract: a JSON object with "shape" (positive integers) and
// "data" (finite numbers, row-major, last index fastest). Entries given as
// strings "p/q" request the exact-rational backend; "symmetric": true runs
// the permutation-invariance check on load.
struct LoadedTensor {
  Index shape;
  bool symmetric_flag = false;
  bool exact = false;  // at least one entry was an exact-rational literal
  std::vector<double> values;
  std::vector<Rational> rationals;  // populated iff exact

  DenseTensor<double> as_double() const { return DenseTensor<double>(shape, values); }
  // exact when the file was exact; otherwise the dyadic image of the doubles
  DenseTensor<Rational> as_rational() const;
};

LoadedTensor load_tensor(const std::string& path);
LoadedTensor parse_tensor_json(const std::string& text);

void save_tensor(const DenseTensor<double>& t, const std::string& path, bool symmetric = false);
void save_tensor(const DenseTensor<Rational>& t, const std::string& path, bool symmetric = false);

}  // namespace tenscert
