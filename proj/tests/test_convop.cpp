#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "gridfun/convop.hpp"
#include "oracles.hpp"

using namespace gridfun;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

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

double hat1(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

/// Dense periodic solve of (stencil * g)(xi) = delta_0 by plain Gaussian
/// elimination; the independent oracle for the inverse kernel.
std::vector<double> dense_periodic_solve(const std::vector<double>& stencil,
                                         int radius, int n) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  rhs[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int d = -radius; d <= radius; ++d)
      m[i][((i + d) % n + n) % n] += stencil[d + radius];
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int row = col + 1; row < n; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int k = col; k < n; ++k) m[row][k] -= f * m[col][k];
      rhs[row] -= f * rhs[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int row = n - 1; row >= 0; --row) {
    double acc = rhs[row];
    for (int k = row + 1; k < n; ++k) acc -= m[row][k] * x[k];
    x[row] = acc / m[row][row];
  }
  return x;
}

}  // namespace

TEST_CASE("q1 stencil in 1D: the frozen quadrature values") {
  const LatticeDomain domain(1, {16, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  CHECK(op.stencil_radius() == 1);
  CHECK(op.stencil({0, 0, 0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(op.stencil({1, 0, 0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(op.stencil({-1, 0, 0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(op.stencil({2, 0, 0}) == 0.0);

  // independent oracle: adaptive Simpson of the hat self-convolution
  for (int delta : {-1, 0, 1}) {
    std::vector<double> breaks{-1.0, 0.0, 1.0};
    for (double b : {delta - 1.0, double(delta), delta + 1.0})
      if (b > -1.0 && b < 1.0) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    const double oracle = oracles::integrate_split(
        [&](double y) { return hat1(delta - y) * hat1(y); }, breaks, 1e-13);
    CHECK(op.stencil({delta, 0, 0}) == doctest::Approx(oracle).epsilon(1e-11));
  }
}

TEST_CASE("q1 stencil in 2D is the tensor product") {
  const LatticeDomain domain(2, {8, 8, 1});
  const ConvolutionOperator op(make_q1(2), domain);
  CHECK(op.stencil({0, 0, 0}) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(op.stencil({1, 0, 0}) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(op.stencil({1, 1, 0}) == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
  double sum = 0.0;
  for (const auto& [delta, v] : op.stencil()) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("p1 stencils sum to one and are symmetric") {
  for (int d : {2, 3}) {
    MultiIndex ext{8, 8, 8};
    const LatticeDomain domain(d, ext);
    const ConvolutionOperator op(make_p1(d), domain);
    double sum = 0.0;
    for (const auto& [delta, v] : op.stencil()) {
      sum += v;
      MultiIndex neg{};
      for (int k = 0; k < d; ++k) neg[k] = -delta[k];
      CHECK(op.stencil(neg) == doctest::Approx(v).epsilon(1e-12));
      CHECK(v >= -1e-12);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("multiplier closed form in 1D") {
  const LatticeDomain domain(1, {16, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  for (int k = 0; k < 16; ++k) {
    const double expect = 2.0 / 3.0 + std::cos(2.0 * M_PI * k / 16.0) / 3.0;
    CHECK(op.multiplier()[k] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(op.min_multiplier() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("apply: constants, the alternating mode, affine windows") {
  const LatticeDomain domain(1, {16, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);

  const LatticeFunction c = LatticeFunction::build(
      domain, 1, [](const MultiIndex&, double* out) { out[0] = 3.5; });
  const LatticeFunction cc = op.apply(c);
  for (int i = 0; i < 16; ++i)
    CHECK(cc.value({i, 0, 0}) == doctest::Approx(3.5).epsilon(1e-14));

  // the alternating mode is an eigenvector with eigenvalue 1/3
  const LatticeFunction nyq = LatticeFunction::build(
      domain, 1, [](const MultiIndex& s, double* out) {
        out[0] = (s[0] % 2 == 0) ? 1.0 : -1.0;
      });
  const LatticeFunction cn = op.apply(nyq);
  for (int i = 0; i < 16; ++i)
    CHECK(cn.value({i, 0, 0}) ==
          doctest::Approx(nyq.value({i, 0, 0}) / 3.0).epsilon(1e-13));

  // affine data passes through on the seam-free window
  const LatticeFunction aff =
      affine_sample(domain, SmallMatrix::identity(1), Point{0.5, 0, 0});
  const LatticeFunction ca = op.apply(aff);
  for (int i = 2; i <= 13; ++i)
    CHECK(ca.value({i, 0, 0}) ==
          doctest::Approx(aff.value({i, 0, 0})).epsilon(1e-13));
}

TEST_CASE("solve inverts apply") {
  for (int extent : {16, 64, 256}) {
    const LatticeDomain domain(1, {extent, 1, 1});
    const ConvolutionOperator op(make_q1(1), domain);
    const LatticeFunction u = random_function(domain, 2, 7000 + extent);
    const LatticeFunction back = op.solve(op.apply(u));
    const double rel = lp_norm(back - u, 2.0) / lp_norm(u, 2.0);
    CHECK(rel <= 1e-10);
  }
  // 2D as well
  const LatticeDomain domain(2, {12, 12, 1});
  const ConvolutionOperator op(make_q1(2), domain);
  const LatticeFunction u = random_function(domain, 1, 99);
  CHECK(lp_norm(op.solve(op.apply(u)) - u, 2.0) / lp_norm(u, 2.0) <= 1e-10);
}

TEST_CASE("solve: constants and the alternating mode") {
  const LatticeDomain domain(1, {16, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  const LatticeFunction c = LatticeFunction::build(
      domain, 1, [](const MultiIndex&, double* out) { out[0] = -1.25; });
  const LatticeFunction sc = op.solve(c);
  for (int i = 0; i < 16; ++i)
    CHECK(sc.value({i, 0, 0}) == doctest::Approx(-1.25).epsilon(1e-13));

  const LatticeFunction nyq = LatticeFunction::build(
      domain, 1, [](const MultiIndex& s, double* out) {
        out[0] = (s[0] % 2 == 0) ? 1.0 : -1.0;
      });
  const LatticeFunction sn = op.solve(nyq);
  for (int i = 0; i < 16; ++i)
    CHECK(sn.value({i, 0, 0}) ==
          doctest::Approx(3.0 * nyq.value({i, 0, 0})).epsilon(1e-12));
}

TEST_CASE("self-adjointness and the l2 lower bound") {
  const LatticeDomain domain(1, {32, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  for (int trial = 0; trial < 25; ++trial) {
    const LatticeFunction u = random_function(domain, 1, 500 + trial);
    const LatticeFunction v = random_function(domain, 1, 800 + trial);
    const LatticeFunction cu = op.apply(u);
    const LatticeFunction cv = op.apply(v);
    double uv = 0.0, vu = 0.0;
    for (int i = 0; i < 32; ++i) {
      uv += cu.value({i, 0, 0}) * v.value({i, 0, 0});
      vu += u.value({i, 0, 0}) * cv.value({i, 0, 0});
    }
    CHECK(uv == doctest::Approx(vu).epsilon(1e-12));
    CHECK(lp_norm(cu, 2.0) >=
          op.min_multiplier() * lp_norm(u, 2.0) * (1 - 1e-12));
  }
}

TEST_CASE("inverse kernel against the dense-solve oracle") {
  const LatticeDomain domain(1, {64, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  const InverseKernel kernel =
      inverse_kernel(op, 30, LatticeDomain(1, {1024, 1, 1}));

  // oracle: dense periodic tridiagonal solve on a large box
  const std::vector<double> oracle =
      dense_periodic_solve({1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1, 128);
  for (int xi = -20; xi <= 20; ++xi) {
    const double g_oracle = oracle[(xi % 128 + 128) % 128];
    CHECK(kernel.value({xi, 0, 0}) ==
          doctest::Approx(g_oracle).epsilon(1e-10));
  }

  // frozen structure: value sqrt(3) at the origin, alternating geometric decay
  CHECK(kernel.value({0, 0, 0}) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  const double ratio = std::sqrt(3.0) - 2.0;  // about -0.2679
  for (int xi = 0; xi < 12; ++xi) {
    CHECK(kernel.value({xi + 1, 0, 0}) / kernel.value({xi, 0, 0}) ==
          doctest::Approx(ratio).epsilon(1e-9));
  }

  // kernel entries sum to one (zero-frequency symbol is one)
  CHECK(kernel.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // the l1 tail at least halves when the truncation radius grows by two
  const InverseKernel k8 = inverse_kernel(op, 8, LatticeDomain(1, {1024, 1, 1}));
  const InverseKernel k10 =
      inverse_kernel(op, 10, LatticeDomain(1, {1024, 1, 1}));
  CHECK(k10.tail_bound() <= 0.5 * k8.tail_bound());
  CHECK(k8.tail_bound() > 0.0);

  // truncated kernel convolved with the stencil is a unit impulse up to the
  // truncation tolerance
  double worst = 0.0;
  for (int xi = -12; xi <= 12; ++xi) {
    double acc = 0.0;
    for (int d = -1; d <= 1; ++d)
      acc += op.stencil({d, 0, 0}) * kernel.value({xi - d, 0, 0});
    worst = std::max(worst, std::abs(acc - (xi == 0 ? 1.0 : 0.0)));
  }
  CHECK(worst <= 10.0 * (k8.tail_bound() + 1e-12));

  // monotone decay envelope beyond the stencil radius
  for (int xi = 1; xi < 29; ++xi)
    CHECK(std::abs(kernel.value({xi + 1, 0, 0})) <=
          std::abs(kernel.value({xi, 0, 0})) + 1e-15);
}

TEST_CASE("lp boundedness of the inverse") {
  const LatticeDomain domain(1, {64, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  const InverseKernel kernel = inverse_kernel(op, 40);
  for (int trial = 0; trial < 20; ++trial) {
    const LatticeFunction f = random_function(domain, 1, 900 + trial);
    const LatticeFunction g = op.solve(f);
    for (double p : {1.0, 2.0, kInf}) {
      CHECK(lp_norm(g, p) <=
            kernel.l1_norm() * lp_norm(f, p) * (1 + 1e-10) + 1e-12);
    }
  }
}

TEST_CASE("smooth nodal interpolant") {
  const LatticeDomain domain(1, {32, 1, 1});
  const SmoothedBasis sb = smoothed(make_q1(1));

  SUBCASE("reproduces the data at lattice sites") {
    for (int trial = 0; trial < 10; ++trial) {
      const LatticeFunction u = random_function(domain, 1, 40 + trial);
      const InterpolantField field = smooth_nodal_interpolant(sb, u);
      for (int i = 0; i < 32; ++i)
        CHECK(field.scalar({double(i), 0, 0}) ==
              doctest::Approx(u.value({i, 0, 0})).epsilon(1e-10));
    }
  }

  SUBCASE("impulse coefficients equal the inverse kernel") {
    LatticeFunction delta(domain, 1);
    delta.set({0, 0, 0}, 1.0);
    const InterpolantField field = smooth_nodal_interpolant(sb, delta);
    const ConvolutionOperator op(make_q1(1), domain);
    const InverseKernel kernel = inverse_kernel(op, 15);
    for (int xi = -10; xi <= 10; ++xi)
      CHECK(field.coefficients().value({xi, 0, 0}) ==
            doctest::Approx(kernel.value({xi, 0, 0})).epsilon(1e-8));
  }

  SUBCASE("affine data yields an affine interpolant on the window") {
    // the prefilter is nonlocal with geometric tails, so the window must be
    // deep enough inside the box for the seam defect to decay below 1e-10
    const LatticeDomain wide(1, {64, 1, 1});
    const LatticeFunction aff =
        affine_sample(wide, SmallMatrix::identity(1), Point{-0.5, 0, 0});
    const InterpolantField field = smooth_nodal_interpolant(sb, aff);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(24.0, 40.0);
    for (int s = 0; s < 30; ++s) {
      const double x = unif(rng);
      CHECK(field.scalar({x, 0, 0}) == doctest::Approx(x - 0.5).epsilon(1e-10));
    }
  }

  SUBCASE("inverse-defect bound behaves") {
    const ConvolutionOperator op(make_q1(1), domain);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const LatticeFunction u = random_function(domain, 1, 70 + trial);
      const LatticeFunction defect = op.solve(u) - u;
      const InterpolantField bar = nodal_interpolant(u, make_q1(1));
      const double denom = lp_norm_field(bar, 2.0, 1).value;
      if (denom > 1e-12) worst = std::max(worst, lp_norm(defect, 2.0) / denom);
    }
    CHECK(worst > 0.0);
    CHECK(worst < 10.0);
  }
}

TEST_CASE("degenerate multipliers are rejected") {
  // the extended hat on a box commensurate with its null mode
  const LatticeDomain domain(1, {24, 1, 1});
  const ConvolutionOperator op(make_extended_hat(), domain);
  CHECK(op.min_multiplier() <= 1e-12);
  const LatticeFunction f = random_function(domain, 1, 5);
  CHECK_THROWS_AS(op.solve(f), NonInvertibleOperatorError);
}

TEST_CASE("domain too small for the stencil") {
  const LatticeDomain tiny(1, {6, 1, 1});
  CHECK_THROWS_AS(ConvolutionOperator(make_extended_hat(), tiny),
                  InvalidParameterError);
}

TEST_CASE("vector data is handled component-wise") {
  const LatticeDomain domain(1, {16, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  const LatticeFunction u = random_function(domain, 2, 77);
  const LatticeFunction cu = op.apply(u);
  for (int c = 0; c < 2; ++c) {
    const LatticeFunction uc = LatticeFunction::build(
        domain, 1, [&](const MultiIndex& s, double* out) {
          out[0] = u.value(s, c);
        });
    const LatticeFunction cuc = op.apply(uc);
    for (int i = 0; i < 16; ++i)
      CHECK(cu.value({i, 0, 0}, c) == doctest::Approx(cuc.value({i, 0, 0})));
  }
}

TEST_CASE("concurrent solves on a shared operator") {
  const LatticeDomain domain(1, {64, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  const LatticeFunction u1 = random_function(domain, 1, 1);
  const LatticeFunction u2 = random_function(domain, 1, 2);
  const LatticeFunction r1 = op.solve(u1);
  const LatticeFunction r2 = op.solve(u2);
  LatticeFunction t1(domain, 1), t2(domain, 1);
  std::thread a([&] { t1 = op.solve(u1); });
  std::thread b([&] { t2 = op.solve(u2); });
  a.join();
  b.join();
  CHECK(lp_norm(t1 - r1, kInf) == 0.0);
  CHECK(lp_norm(t2 - r2, kInf) == 0.0);
}

TEST_CASE("applying the operator samples the smoothed expansion at sites") {
  // 1D with the analytic backend
  {
    const LatticeDomain domain(1, {16, 1, 1});
    const ConvolutionOperator op(make_q1(1), domain);
    const LatticeFunction u = random_function(domain, 1, 314);
    const LatticeFunction cu = op.apply(u);
    const InterpolantField tilde = convolution_interpolant(u, smoothed(make_q1(1)));
    for (int i = 0; i < 16; ++i)
      CHECK(cu.value({i, 0, 0}) ==
            doctest::Approx(tilde.scalar({double(i), 0, 0})).epsilon(1e-12));
  }
  // 2D with the quadrature backend behind the smoothed p1 basis
  {
    const LatticeDomain domain(2, {8, 8, 1});
    const ConvolutionOperator op(make_p1(2), domain);
    const LatticeFunction u = random_function(domain, 1, 315);
    const LatticeFunction cu = op.apply(u);
    const InterpolantField tilde = convolution_interpolant(u, smoothed(make_p1(2)));
    for (const MultiIndex site :
         {MultiIndex{0, 0, 0}, MultiIndex{3, 5, 0}, MultiIndex{7, 2, 0},
          MultiIndex{4, 4, 0}}) {
      CHECK(cu.value(site) ==
            doctest::Approx(tilde.scalar(to_point(site))).epsilon(1e-11));
    }
  }
}

TEST_CASE("truncated-kernel backend approximates the exact solve") {
  const LatticeDomain domain(1, {64, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  const InverseKernel kernel = inverse_kernel(op, 20);
  const LatticeFunction f = random_function(domain, 1, 99);
  const LatticeFunction exact = op.solve(f);
  const LatticeFunction approx = apply_kernel(kernel, f);
  const double defect = lp_norm(approx - exact, kInf);
  CHECK(defect <= 10.0 * kernel.tail_bound() * lp_norm(f, kInf));
  CHECK(defect > 0.0);

  // a radius too large for the box wraps and is rejected
  const InverseKernel wide = inverse_kernel(op, 40);
  CHECK_THROWS_AS(apply_kernel(wide, f), InvalidParameterError);
}
