#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gridfun/lattice.hpp"

using namespace gridfun;

namespace {

LatticeFunction random_function(const LatticeDomain& domain, int components,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  return LatticeFunction::build(domain, components,
                                [&](const MultiIndex&, double* out) {
                                  for (int c = 0; c < components; ++c)
                                    out[c] = gauss(rng);
                                });
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("domain indexing is periodic") {
  const LatticeDomain domain(2, {4, 6, 1});
  CHECK(domain.sites() == 24);
  CHECK(domain.flatten({1, 2, 0}) == domain.flatten({5, 2, 0}));
  CHECK(domain.flatten({1, 2, 0}) == domain.flatten({1, -4, 0}));
  CHECK(domain.flatten({-1, -1, 0}) == domain.flatten({3, 5, 0}));
  const MultiIndex back = domain.site(domain.flatten({3, 5, 0}));
  CHECK(back[0] == 3);
  CHECK(back[1] == 5);
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(LatticeDomain(0, {4, 4, 4}), InvalidParameterError);
  CHECK_THROWS_AS(LatticeDomain(2, {4, 0, 1}), InvalidParameterError);
  const LatticeDomain domain(1, {6, 1, 1});
  CHECK_NOTHROW(domain.require_supports(1.0));
  CHECK_THROWS_AS(domain.require_supports(2.0), InvalidParameterError);
}

TEST_CASE("lp_norm examples") {
  const LatticeDomain domain(1, {8, 1, 1});

  // zero function
  const LatticeFunction zero(domain, 1);
  CHECK(lp_norm(zero, 2.0) == 0.0);

  // single site with value (3,4): Euclidean 5 for every p
  LatticeFunction spike(domain, 2);
  spike.set({2, 0, 0}, 0, 3.0);
  spike.set({2, 0, 0}, 1, 4.0);
  CHECK(lp_norm(spike, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(lp_norm(spike, 1.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(lp_norm(spike, kInf) == doctest::Approx(5.0).epsilon(1e-15));

  // constant 1 on extent 8: direct-summation oracle
  const LatticeFunction ones = LatticeFunction::build(
      domain, 1, [](const MultiIndex&, double* out) { out[0] = 1.0; });
  double brute = 0.0;
  for (int i = 0; i < 8; ++i) brute += 1.0;
  CHECK(lp_norm(ones, 2.0) == doctest::Approx(std::sqrt(brute)).epsilon(1e-14));
  CHECK(lp_norm(ones, 2.0) == doctest::Approx(2.8284271247461903).epsilon(1e-12));
}

TEST_CASE("lp_norm rejects p < 1") {
  const LatticeDomain domain(1, {4, 1, 1});
  const LatticeFunction u(domain, 1);
  CHECK_THROWS_AS(lp_norm(u, 0.5), InvalidParameterError);
  CHECK_THROWS_AS(lp_norm(u, -2.0), InvalidParameterError);
}

TEST_CASE("lp_norm homogeneity and p-monotonicity") {
  const LatticeDomain domain(2, {6, 5, 1});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const LatticeFunction u = random_function(domain, 2, 100 + trial);
    const double c = unif(rng);
    for (double p : {1.0, 2.0, 3.5, 4.0, kInf}) {
      const double lhs = lp_norm(u * c, p);
      const double rhs = std::abs(c) * lp_norm(u, p);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    // finite-lattice embedding: p >= q implies |u|_p <= |u|_q
    const double n1 = lp_norm(u, 1.0);
    const double n2 = lp_norm(u, 2.0);
    const double n4 = lp_norm(u, 4.0);
    const double ninf = lp_norm(u, kInf);
    CHECK(n2 <= n1 * (1 + 1e-13));
    CHECK(n4 <= n2 * (1 + 1e-13));
    CHECK(ninf <= n4 * (1 + 1e-13));
  }
}

TEST_CASE("forward difference") {
  const LatticeDomain domain(1, {6, 1, 1});

  // constants are annihilated exactly
  const LatticeFunction c = LatticeFunction::build(
      domain, 1, [](const MultiIndex&, double* out) { out[0] = 4.25; });
  const LatticeFunction dc = forward_difference(c, 0);
  for (int i = 0; i < 6; ++i) CHECK(dc.value({i, 0, 0}) == 0.0);

  // coordinate function: 1 except the wrap site, which sees -(N-1)
  const LatticeFunction coord = LatticeFunction::build(
      domain, 1, [](const MultiIndex& s, double* out) {
        out[0] = static_cast<double>(s[0]);
      });
  const LatticeFunction dcoord = forward_difference(coord, 0);
  for (int i = 0; i < 5; ++i) CHECK(dcoord.value({i, 0, 0}) == 1.0);
  CHECK(dcoord.value({5, 0, 0}) == -5.0);

  // mixed difference of the product of coordinates is constant 1
  const LatticeDomain domain2(2, {5, 7, 1});
  const LatticeFunction prod = LatticeFunction::build(
      domain2, 1, [](const MultiIndex& s, double* out) {
        out[0] = static_cast<double>(s[0]) * s[1];
      });
  const LatticeFunction mixed = forward_difference(forward_difference(prod, 0), 1);
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j < 6; ++j) CHECK(mixed.value({i, j, 0}) == 1.0);

  CHECK_THROWS_AS(forward_difference(c, 1), InvalidParameterError);
}

TEST_CASE("affine_sample") {
  SUBCASE("constant") {
    const LatticeDomain domain(2, {5, 5, 1});
    const LatticeFunction u =
        affine_sample(domain, SmallMatrix::zero(2), Point{2.5, -1.0, 0.0});
    CHECK(u.value({3, 4, 0}, 0) == 2.5);
    CHECK(u.value({3, 4, 0}, 1) == -1.0);
  }
  SUBCASE("identity in 1D") {
    const LatticeDomain domain(1, {8, 1, 1});
    const LatticeFunction u =
        affine_sample(domain, SmallMatrix::identity(1), Point{});
    for (int i = 0; i < 8; ++i) CHECK(u.value({i, 0, 0}) == double(i));
  }
  SUBCASE("identity plus shift in 2D") {
    const LatticeDomain domain(2, {5, 6, 1});
    const LatticeFunction u =
        affine_sample(domain, SmallMatrix::identity(2), Point{1.0, 1.0, 0.0});
    CHECK(u.value({2, 3, 0}, 0) == 3.0);
    CHECK(u.value({2, 3, 0}, 1) == 4.0);
  }
}

TEST_CASE("deformation field") {
  const LatticeDomain domain(2, {6, 6, 1});
  SmallMatrix a = SmallMatrix::identity(2);
  a(0, 1) = 0.25;
  LatticeFunction disp = random_function(domain, 2, 42);
  const DeformationField y = DeformationField::admissible(a, disp);

  // at the origin the deformation equals the displacement
  const Point at0 = y.deformed({0, 0, 0});
  CHECK(at0[0] == disp.value({0, 0, 0}, 0));
  CHECK(at0[1] == disp.value({0, 0, 0}, 1));

  const Point at = y.deformed({2, 3, 0});
  CHECK(at[0] == doctest::Approx(2.0 + 0.25 * 3.0 + disp.value({2, 3, 0}, 0)));

  // inadmissible far-field gradient
  SmallMatrix bad = SmallMatrix::identity(2);
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(DeformationField::admissible(bad, disp),
                  InvalidParameterError);
}

TEST_CASE("composability requires identical domains") {
  const LatticeDomain d1(1, {8, 1, 1});
  const LatticeDomain d2(1, {10, 1, 1});
  const LatticeFunction a(d1, 1), b(d2, 1);
  CHECK_THROWS_AS(a + b, InvalidParameterError);
}

TEST_CASE("non-finite values are rejected") {
  const LatticeDomain domain(1, {4, 1, 1});
  CHECK_THROWS_AS(LatticeFunction::build(domain, 1,
                                         [](const MultiIndex&, double* out) {
                                           out[0] = std::nan("");
                                         }),
                  InvalidParameterError);
}

TEST_CASE("serialization round-trips") {
  const LatticeDomain domain(2, {5, 4, 1});
  const LatticeFunction u = random_function(domain, 3, 2024);

  SUBCASE("csv") {
    std::stringstream buf;
    save_csv(u, buf);
    const LatticeFunction back = load_csv(buf);
    REQUIRE(back.domain() == u.domain());
    REQUIRE(back.components() == u.components());
    for (std::int64_t s = 0; s < domain.sites(); ++s)
      for (int c = 0; c < 3; ++c)
        CHECK(back.value(domain.site(s), c) == u.value(domain.site(s), c));
  }
  SUBCASE("binary") {
    std::stringstream buf;
    save_binary(u, buf);
    const LatticeFunction back = load_binary(buf);
    REQUIRE(back.domain() == u.domain());
    for (std::int64_t s = 0; s < domain.sites(); ++s)
      for (int c = 0; c < 3; ++c)
        CHECK(back.value(domain.site(s), c) == u.value(domain.site(s), c));
  }
  SUBCASE("csv rejects malformed input") {
    std::stringstream buf("2,5\n");
    CHECK_THROWS_AS(load_csv(buf), InvalidParameterError);
  }
}

TEST_CASE("translation invariance marker holds for differences") {
  // the equivalence-class tag: tagged operations ignore constant shifts
  [[maybe_unused]] EquivalenceClassTag tag;
  const LatticeDomain domain(1, {8, 1, 1});
  const LatticeFunction u = random_function(domain, 1, 5);
  const LatticeFunction shifted = u + LatticeFunction::build(
      domain, 1, [](const MultiIndex&, double* out) { out[0] = 3.75; });
  const LatticeFunction du = forward_difference(u, 0);
  const LatticeFunction ds = forward_difference(shifted, 0);
  for (int i = 0; i < 8; ++i)
    CHECK(du.value({i, 0, 0}) ==
          doctest::Approx(ds.value({i, 0, 0})).epsilon(1e-13));
}

TEST_CASE("binary loader rejects corrupt headers") {
  std::stringstream bad("XXXXXXXXgarbage");
  CHECK_THROWS_AS(load_binary(bad), InvalidParameterError);
  const LatticeDomain domain(1, {4, 1, 1});
  const LatticeFunction u(domain, 1);
  std::stringstream buf;
  save_binary(u, buf);
  std::string text = buf.str();
  text.resize(text.size() / 2);  // truncate
  std::stringstream half(text);
  CHECK_THROWS_AS(load_binary(half), InvalidParameterError);
}
