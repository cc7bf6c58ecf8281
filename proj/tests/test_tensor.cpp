#include <doctest.h>

#include <cstdio>
#include <string>

#include "helpers.hpp"
#include "tenscert/tensor.hpp"
#include "tenscert/tensor_io.hpp"

using namespace tenscert;
using namespace tenscert::testing;

namespace {

std::vector<double> e(int n, int k) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  v[static_cast<std::size_t>(k)] = 1.0;
  return v;
}

double norm_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("contract_except on rank-one and symmetric fixtures") {
  auto t = outer<double>({e(2, 0), e(2, 0), e(2, 0)});
  auto c = contract_except(t, 0, {e(2, 0), e(2, 0)});
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.0));

  // S with S111 = S222 = 1: mode-0 contraction with (u, u) is (a^2, b^2)
  auto s = fixture_s();
  const double a = 0.3, b = -0.8;
  auto cs = contract_except(s, 0, {{a, b}, {a, b}});
  CHECK(cs[0] == doctest::Approx(a * a));
  CHECK(cs[1] == doctest::Approx(b * b));

  // matrix case: contraction is the matrix-vector product
  DenseTensor<double> m({2, 2}, {1, 2, 3, 4});
  auto mv = contract_except(m, 0, {{5, 7}});
  CHECK(mv[0] == doctest::Approx(1 * 5 + 2 * 7));
  CHECK(mv[1] == doctest::Approx(3 * 5 + 4 * 7));

  CHECK_THROWS_AS(contract_except(m, 2, {{1.0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(contract_except(m, 0, {{1.0, 2.0, 3.0}}), std::invalid_argument);
}

TEST_CASE("rayleigh values on the running example") {
  auto s = fixture_s();
  CHECK(rayleigh(s, {e(2, 0), e(2, 0), e(2, 0)}) == doctest::Approx(1.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(rayleigh(s, {{r, r}, {r, r}, {r, r}}) == doctest::Approx(r));
  CHECK(rayleigh(s, {{0, 0}, {r, r}, {r, r}}) == doctest::Approx(0.0));
}

TEST_CASE("inner and hs_norm basics") {
  auto a = outer<double>({e(2, 0), e(2, 0)});
  auto b = outer<double>({e(2, 1), e(2, 1)});
  CHECK(inner(a, b) == doctest::Approx(0.0));
  CHECK(hs_norm(fixture_s()) == doctest::Approx(std::sqrt(2.0)));
  auto t = random_tensor({3, 3, 3}, 99);
  CHECK(inner(t, t) / (hs_norm(t) * hs_norm(t)) == doctest::Approx(1.0));
  DenseTensor<double> wrong({2}, {1, 2});
  CHECK_THROWS_AS(inner(a, wrong), std::invalid_argument);
}

TEST_CASE("outer and symmetrize") {
  auto m = outer<double>({{1, 0}, {0, 1}});
  CHECK(m.at({0, 1}) == doctest::Approx(1.0));
  CHECK(m.at({0, 0}) == doctest::Approx(0.0));
  CHECK(m.at({1, 0}) == doctest::Approx(0.0));

  DeterministicRng rng(5);
  auto u = random_unit_vector(3, rng);
  auto cube = outer<double>({u, u, u});
  auto sym = symmetrize(cube);
  for (std::size_t k = 0; k < cube.size(); ++k)
    CHECK(sym.data()[k] == doctest::Approx(cube.data()[k]));

  // the sum of the three distinct permutations of e1 x e2 x e2 equals
  // 3 * (e1 . e2 . e2) and is fixed by symmetrize
  DenseTensor<double> perm_sum = DenseTensor<double>::zeros({2, 2, 2});
  perm_sum.at({0, 1, 1}) = perm_sum.at({1, 0, 1}) = perm_sum.at({1, 1, 0}) = 1.0;
  auto symd = symmetrize(perm_sum);
  for (std::size_t k = 0; k < perm_sum.size(); ++k)
    CHECK(symd.data()[k] == doctest::Approx(perm_sum.data()[k]));
  auto dot = symmetrize(outer<double>({e(2, 0), e(2, 1), e(2, 1)})) * 3.0;
  for (std::size_t k = 0; k < perm_sum.size(); ++k)
    CHECK(dot.data()[k] == doctest::Approx(perm_sum.data()[k]));

  CHECK_THROWS_AS(symmetrize(random_tensor({2, 3}, 1)), std::invalid_argument);
}

TEST_CASE("tensor-core property: contractions agree with rayleigh") {
  DeterministicRng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = random_tensor({2, 3, 2}, 100 + static_cast<std::uint64_t>(trial));
    std::vector<std::vector<double>> vecs = {random_unit_vector(2, rng),
                                             random_unit_vector(3, rng),
                                             random_unit_vector(2, rng)};
    const double ray = rayleigh(t, vecs);
    for (int i = 0; i < 3; ++i) {
      std::vector<std::vector<double>> rest;
      for (int j = 0; j < 3; ++j)
        if (j != i) rest.push_back(vecs[static_cast<std::size_t>(j)]);
      auto c = contract_except(t, i, rest);
      double dot = 0;
      for (std::size_t k = 0; k < c.size(); ++k) dot += c[k] * vecs[static_cast<std::size_t>(i)][k];
      CHECK(dot == doctest::Approx(ray).epsilon(1e-12));
    }
  }
}

TEST_CASE("tensor-core property: multilinearity of contract_except") {
  DeterministicRng rng(23);
  auto t = random_tensor({3, 2, 3}, 4242);
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = rng.uniform(-2, 2), beta = rng.uniform(-2, 2);
    auto u = random_unit_vector(2, rng), w = random_unit_vector(2, rng);
    auto v3 = random_unit_vector(3, rng);
    std::vector<double> mix(2);
    for (int k = 0; k < 2; ++k) mix[static_cast<std::size_t>(k)] = alpha * u[static_cast<std::size_t>(k)] + beta * w[static_cast<std::size_t>(k)];
    auto lhs = contract_except(t, 0, {mix, v3});
    auto cu = contract_except(t, 0, {u, v3});
    auto cw = contract_except(t, 0, {w, v3});
    for (std::size_t k = 0; k < lhs.size(); ++k)
      CHECK(lhs[k] == doctest::Approx(alpha * cu[k] + beta * cw[k]).epsilon(1e-12));
  }
}

TEST_CASE("tensor-core property: inner bilinear, norm triangle, outer norm product") {
  DeterministicRng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_tensor({2, 2, 2}, 900 + static_cast<std::uint64_t>(trial));
    auto b = random_tensor({2, 2, 2}, 950 + static_cast<std::uint64_t>(trial));
    auto c = random_tensor({2, 2, 2}, 990 + static_cast<std::uint64_t>(trial));
    CHECK(inner(a, b) == doctest::Approx(inner(b, a)));
    const double al = rng.uniform(-2, 2), be = rng.uniform(-2, 2);
    CHECK(inner(a * al + b * be, c) ==
          doctest::Approx(al * inner(a, c) + be * inner(b, c)).epsilon(1e-11));
    CHECK(hs_norm(a + b) <= hs_norm(a) + hs_norm(b) + 1e-12);

    std::vector<std::vector<double>> vecs = {{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                             {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                             {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
    double prod = 1;
    for (const auto& v : vecs) prod *= norm_of(v);
    CHECK(hs_norm(outer(vecs)) == doctest::Approx(prod).epsilon(1e-12));
  }
}

TEST_CASE("symmetrize is idempotent and SymTensor validates") {
  auto t = random_tensor({3, 3, 3}, 77);
  auto s1 = symmetrize(t);
  auto s2 = symmetrize(s1);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(s1.data()[k] == doctest::Approx(s2.data()[k]));
  CHECK_NOTHROW(SymTensor<double>{s1});
  CHECK_THROWS_AS(SymTensor<double>{random_tensor({3, 3, 3}, 78)}, std::invalid_argument);
}

TEST_CASE("tensor file round trip and errors") {
  const std::string path = "roundtrip_test_tensor.json";
  auto t = random_tensor({3, 3, 3}, 4711);
  save_tensor(t, path);
  auto back = load_tensor(path);
  REQUIRE(back.shape == t.shape());
  auto td = back.as_double();
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(td.data()[k] == t.data()[k]);
  std::remove(path.c_str());

  auto good = parse_tensor_json(R"({"shape":[2,2],"data":[1,0,0,1]})");
  CHECK(good.as_double().at({0, 0}) == 1.0);
  CHECK(good.as_double().at({1, 0}) == 0.0);

  CHECK_THROWS_AS(parse_tensor_json(R"({"shape":[2],"data":[1,2,3]})"), ParseError);
  CHECK_THROWS_AS(parse_tensor_json(R"({"shape":[2]})"), ParseError);
  CHECK_THROWS_AS(parse_tensor_json(R"({"shape":[0],"data":[]})"), ParseError);
  CHECK_THROWS_AS(parse_tensor_json("not json at all"), ParseError);
  CHECK_THROWS_AS(parse_tensor_json(R"({"shape":[1],"data":["1/0"]})"), ParseError);
  CHECK_THROWS_AS(parse_tensor_json(R"({"shape":[2,2],"data":[1,2,3,1],"symmetric":true})"),
                  ParseError);
  CHECK_NOTHROW(parse_tensor_json(R"({"shape":[2,2],"data":[1,2,2,1]})"));
  CHECK_NOTHROW(parse_tensor_json(R"({"shape":[2,2],"data":[1,2,2,4],"symmetric":true})"));

  auto exact = parse_tensor_json(R"({"shape":[2],"data":["1/3","-2/7"]})");
  CHECK(exact.exact);
  CHECK(exact.as_rational().at({0}) == Rational(1) / 3);
  CHECK(exact.as_rational().at({1}) == Rational(-2) / 7);
}
