#include <doctest.h>

#include <Eigen/SVD>

#include "helpers.hpp"
#include "tenscert/charpoly.hpp"
#include "tenscert/spectral.hpp"

using namespace tenscert;
using namespace tenscert::testing;

namespace {

std::vector<double> e(int n, int k) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  v[static_cast<std::size_t>(k)] = 1.0;
  return v;
}

bool close_up_to_sign(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  double plus = 0, minus = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    plus = std::max(plus, std::abs(a[k] - b[k]));
    minus = std::max(minus, std::abs(a[k] + b[k]));
  }
  return plus <= tol || minus <= tol;
}

SymTensor<double> rotate_sym3(const SymTensor<double>& s, double theta) {
  const double rot[2][2] = {{std::cos(theta), -std::sin(theta)},
                            {std::sin(theta), std::cos(theta)}};
  DenseTensor<double> out = DenseTensor<double>::zeros({2, 2, 2});
  Index idx(3, 0);
  do {
    double acc = 0;
    Index src(3, 0);
    do {
      acc += rot[idx[0]][src[0]] * rot[idx[1]][src[1]] * rot[idx[2]][src[2]] * s.tensor().at(src);
    } while (next_index(src, s.tensor().shape()));
    out.at(idx) = acc;
  } while (next_index(idx, out.shape()));
  return SymTensor<double>(out, 1e-10);
}

}  // namespace

TEST_CASE("singular inventory of diag(2,1) is exactly its SVD") {
  DenseTensor<double> m({2, 2}, {2, 0, 0, 1});
  auto inv = enumerate_singular_pairs(m, 24, 1e-10);
  REQUIRE(inv.classes.size() == 2);
  CHECK(inv.classes[0].lambda == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(close_up_to_sign(inv.classes[0].vectors[0], e(2, 0), 1e-8));
  CHECK(close_up_to_sign(inv.classes[0].vectors[1], e(2, 0), 1e-8));
  CHECK(inv.classes[1].lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(close_up_to_sign(inv.classes[1].vectors[0], e(2, 1), 1e-8));
}

TEST_CASE("singular inventory of the general 2x2x2 fixture holds both unit classes") {
  auto inv = enumerate_singular_pairs(fixture_tprime_general(), 20, 1e-10);
  int at_one = 0;
  bool saw_e1 = false, saw_e2 = false;
  for (const auto& cls : inv.classes) {
    if (std::abs(std::abs(cls.lambda) - 1.0) <= 1e-8) {
      ++at_one;
      bool all_e1 = true, all_e2 = true;
      for (const auto& v : cls.vectors) {
        all_e1 = all_e1 && close_up_to_sign(v, e(2, 0), 1e-7);
        all_e2 = all_e2 && close_up_to_sign(v, e(2, 1), 1e-7);
      }
      saw_e1 = saw_e1 || all_e1;
      saw_e2 = saw_e2 || all_e2;
    }
  }
  CHECK(at_one == 2);
  CHECK(saw_e1);
  CHECK(saw_e2);
}

TEST_CASE("inventory members satisfy the stationarity equations at tolerance") {
  auto t = random_tensor({2, 2, 2}, 2024);
  auto inv = enumerate_singular_pairs(t, 16, 1e-10);
  CHECK(inv.classes.size() >= 1);
  for (const auto& cls : inv.classes) {
    CHECK(cls.residual <= 1e-10);
    CHECK(kkt_check_rank_one(t, cls) <= 1e-9);
    for (const auto& v : cls.vectors) CHECK(vec_norm(v) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("monotone discovery: higher grid density returns a superset") {
  auto t = random_tensor({2, 2, 2}, 31337);
  auto lo = enumerate_singular_pairs(t, 20, 1e-10);
  auto hi = enumerate_singular_pairs(t, 40, 1e-10);
  CHECK(lo.classes.size() == hi.classes.size());
  for (const auto& cls : lo.classes) {
    bool found = false;
    for (const auto& big : hi.classes)
      found = found || same_singular_class(cls.lambda, cls.vectors, big.lambda, big.vectors, 1e-6);
    CHECK(found);
  }
}

TEST_CASE("sign equivalence maps a class onto itself") {
  auto t = random_tensor({2, 2, 2}, 41);
  auto inv = enumerate_singular_pairs(t, 12, 1e-10);
  REQUIRE(!inv.classes.empty());
  const auto& cls = inv.classes.front();
  auto flipped = cls.vectors;
  for (auto& v : flipped)
    for (double& x : v) x = -x;
  const double lam_flipped = (t.order() % 2 == 0) ? cls.lambda : -cls.lambda;
  CHECK(same_singular_class(cls.lambda, cls.vectors, lam_flipped, flipped, 1e-6));
}

TEST_CASE("eigen inventory of the symmetric fixture") {
  auto inv = enumerate_eigenpairs(SymTensor<double>(fixture_s()), 60, 1e-10);
  REQUIRE(inv.classes.size() == 3);
  // lambda = 1 twice (e1 and e2), lambda = 1/sqrt(2) once
  CHECK(inv.classes[0].lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(inv.classes[1].lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(inv.classes[2].lambda == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((close_up_to_sign(inv.classes[0].vector, e(2, 0), 1e-8) ||
         close_up_to_sign(inv.classes[0].vector, e(2, 1), 1e-8)));
  CHECK(close_up_to_sign(inv.classes[2].vector, {r, r}, 1e-8));

  auto simple = is_simple(inv, 1.0, 1e-8);
  CHECK(!simple.simple);
  CHECK(simple.witnesses.size() == 2);
  auto sub = is_simple(inv, 1.0 / std::sqrt(2.0), 1e-8);
  CHECK(sub.simple);

  // every class meets the eigen equations at the stated tolerance, and every
  // real root of psi (all of which carry real eigenvectors here) has a class;
  // the double roots at +-1 are only locatable to about sqrt(eps), so the
  // matching window is 1e-6
  for (std::size_t k = 0; k < inv.classes.size(); ++k) CHECK(inv.classes[k].residual <= 1e-10);
  const auto roots = real_roots(salmon_char_poly(SymTensor<double>(fixture_s())).coeffs(), 1e-6);
  for (double expected : {1.0, -1.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}) {
    bool present = false;
    for (double root : roots) present = present || std::abs(root - expected) <= 1e-6;
    CHECK(present);
  }
  for (double root : roots) {
    bool matched = false;
    for (const auto& cls : inv.classes)
      matched = matched || std::abs(cls.lambda - root) <= 1e-6 || std::abs(-cls.lambda - root) <= 1e-6;
    CHECK(matched);
  }
}

TEST_CASE("eigen inventory of e1^3") {
  DenseTensor<double> t = DenseTensor<double>::zeros({2, 2, 2});
  t.at({0, 0, 0}) = 1;
  auto inv = enumerate_eigenpairs(SymTensor<double>(t), 80, 1e-9);
  REQUIRE(inv.classes.size() == 2);
  CHECK(inv.classes[0].lambda == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(close_up_to_sign(inv.classes[0].vector, e(2, 0), 1e-7));
  CHECK(std::abs(inv.classes[1].lambda) <= 1e-8);
  // (0, e2) is a defective root of the eigen system, so the vector is only
  // locatable to about the square root of the residual target
  CHECK(close_up_to_sign(inv.classes[1].vector, e(2, 1), 1e-5));
}

TEST_CASE("eigen inventory of the symmetric hypersurface fixture T'") {
  auto tp = SymTensor<double>(fixture_tprime_symmetric());
  auto inv = enumerate_eigenpairs(tp, 120, 1e-9);
  int at_one = 0;
  bool saw_e1 = false, saw_cos30 = false;
  for (const auto& cls : inv.classes) {
    if (std::abs(cls.lambda - 1.0) <= 1e-6) {
      ++at_one;
      std::vector<std::vector<double>> tuple(3, cls.vector);
      CHECK(std::abs(rayleigh(tp.tensor(), tuple) - 1.0) <= 1e-6);
      saw_e1 = saw_e1 || close_up_to_sign(cls.vector, e(2, 0), 1e-6);
      saw_cos30 =
          saw_cos30 || close_up_to_sign(cls.vector, {std::sqrt(3.0) / 2.0, 0.5}, 1e-6);
    }
  }
  CHECK(at_one == 2);
  CHECK(saw_e1);
  CHECK(saw_cos30);

  // the third class sits at a cleanly separated eigenvalue
  bool saw_third = false;
  for (const auto& cls : inv.classes)
    saw_third = saw_third || std::abs(cls.lambda - 0.9981114376470065) <= 1e-9;
  CHECK(saw_third);

  auto simple = is_simple(inv, 1.0, 1e-6);
  CHECK(!simple.simple);
  CHECK(simple.witnesses.size() == 2);
}

TEST_CASE("found eigenvalues are roots of the characteristic polynomial") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto s = SymTensor<double>(symmetrize(random_tensor({2, 2, 2}, 9000 + seed)));
    auto inv = enumerate_eigenpairs(s, 40, 1e-10);
    const auto psi = salmon_char_poly(s);
    const auto roots = real_roots(psi.coeffs());
    for (const auto& cls : inv.classes) {
      double dist = 1e300;
      for (double r : roots)
        dist = std::min(dist, std::min(std::abs(cls.lambda - r), std::abs(-cls.lambda - r)));
      CHECK(dist <= 1e-8);
    }
  }
}

TEST_CASE("eigenvalue multiset is invariant under rotations") {
  DeterministicRng rng(2718);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = SymTensor<double>(symmetrize(random_tensor({2, 2, 2}, 600 + static_cast<std::uint64_t>(trial))));
    auto g = rotate_sym3(s, rng.uniform(0.1, 3.0));
    auto inv_a = enumerate_eigenpairs(s, 48, 1e-10);
    auto inv_b = enumerate_eigenpairs(g, 48, 1e-10);
    REQUIRE(inv_a.classes.size() == inv_b.classes.size());
    for (std::size_t k = 0; k < inv_a.classes.size(); ++k)
      CHECK(inv_a.classes[k].lambda == doctest::Approx(inv_b.classes[k].lambda).epsilon(1e-8));
  }
}

TEST_CASE("the best singular value of a generic tensor is simple") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto t = random_tensor({2, 2, 2}, 77000 + seed);
    auto inv = enumerate_singular_pairs(t, 16, 1e-10);
    REQUIRE(!inv.classes.empty());
    double best = 0;
    for (const auto& cls : inv.classes) best = std::max(best, std::abs(cls.lambda));
    auto check = is_simple(inv, best, 1e-8);
    CHECK(check.simple);
  }
}

TEST_CASE("matrix inventories match an SVD oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto t = random_tensor({2, 2}, 100 + seed);
    Eigen::MatrixXd m(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = t.at({i, j});
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    auto inv = enumerate_singular_pairs(t, 24, 1e-10);
    REQUIRE(inv.classes.size() == 2);
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(inv.classes[static_cast<std::size_t>(k)].lambda) ==
            doctest::Approx(svd.singularValues()(k)).epsilon(1e-10));
      std::vector<double> u = {svd.matrixU()(0, k), svd.matrixU()(1, k)};
      CHECK(close_up_to_sign(inv.classes[static_cast<std::size_t>(k)].vectors[0], u, 1e-8));
    }
  }
}

TEST_CASE("enumeration preconditions") {
  CHECK_THROWS_AS(enumerate_singular_pairs(DenseTensor<double>::zeros({2, 2}), 8, 1e-8),
                  PreconditionViolation);
  CHECK_THROWS_AS(enumerate_eigenpairs(SymTensor<double>(DenseTensor<double>::zeros({2, 2, 2})),
                                       8, 1e-8),
                  PreconditionViolation);
  CHECK_THROWS_AS(enumerate_singular_pairs(random_tensor({8, 8, 8}, 1), 4, 1e-8),
                  PreconditionViolation);
}

TEST_CASE("sigma2 condition") {
  // normalized (e1+e2)^{x3}: u = (r, r), v = (r, -r), sigma2 = 0 < rho/2
  const double r = 1.0 / std::sqrt(2.0);
  auto w3 = outer<double>({{r, r}, {r, r}, {r, r}});
  auto s = SymTensor<double>(w3);
  auto res = sigma2_condition(s, {r, r});
  CHECK(res.rho == doctest::Approx(1.0));
  CHECK(res.sigma2 == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(!res.certified);

  // n = 2: sigma2 is the single evaluation |<S, u x v x v>| with v = (-u2, u1)
  auto sp = SymTensor<double>(sym32_tensor(1.0, 0.15, 0.2, 0.9));
  auto inv = enumerate_eigenpairs(sp, 60, 1e-10);
  REQUIRE(!inv.classes.empty());
  const auto& top = inv.classes.front();
  auto s2 = sigma2_condition(sp, top.vector);
  const std::vector<double> v = {-top.vector[1], top.vector[0]};
  const double direct = std::abs(rayleigh(sp.tensor(), {top.vector, v, v}));
  CHECK(s2.sigma2 == doctest::Approx(direct).epsilon(1e-10));
  CHECK(s2.certified == (s2.sigma2 >= s2.rho / 2.0));

  // verdict is stable under a small positive perturbation
  auto sp_eps = sym32_tensor(1.0 + 1e-7, 0.15 + 1e-7, 0.2 + 1e-7, 0.9 + 1e-7);
  auto inv2 = enumerate_eigenpairs(SymTensor<double>(sp_eps), 60, 1e-10);
  auto s2b = sigma2_condition(SymTensor<double>(sp_eps), inv2.classes.front().vector);
  CHECK(s2b.certified == s2.certified);

  // u must satisfy the eigen equation
  CHECK_THROWS_AS(sigma2_condition(sp, {1.0, 0.0}), PreconditionViolation);
  // positivity precondition
  CHECK_THROWS_AS(sigma2_condition(SymTensor<double>(fixture_s()), {1.0, 0.0}),
                  PreconditionViolation);
}
