// Acceptance suite: one check per release criterion, each printing a single
// pass/fail line. Exit status is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gridfun/convop.hpp"
#include "gridfun/interp.hpp"
#include "gridfun/quasi.hpp"
#include "gridfun/studies.hpp"

using namespace gridfun;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

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

// ---------------------------------------------------------------------------
// 1. Assumption audit for the shipped bases.
// ---------------------------------------------------------------------------
Outcome criterion_audit() {
  Outcome out;
  for (int d : {1, 2, 3}) {
    for (bool simplicial : {false, true}) {
      const NodalBasisPtr b = simplicial ? make_p1(d) : make_q1(d);
      const AssumptionReport r = verify_assumptions(*b, 400, 1e-12);
      const std::string tag =
          (simplicial ? "p1 d=" : "q1 d=") + std::to_string(d);
      out.require(r.lipschitz.pass && r.lipschitz.residual <= 1e-12,
                  tag + " lipschitz");
      out.require(r.locality.pass, tag + " locality");
      out.require(
          r.affine_reproduction.pass && r.affine_reproduction.residual <= 1e-12,
          tag + " affine reproduction");
      out.require(r.interpolation.pass, tag + " interpolation");
    }
  }
  const NodalBasisPtr eh = make_extended_hat();
  const AssumptionReport r = verify_assumptions(*eh, 400, 1e-12);
  out.require(r.core_pass(), "extended hat core assumptions");
  out.require(!r.interpolation.pass, "extended hat must fail interpolation");
  out.require(std::abs(eh->value({1.0, 0, 0}) - 1.0 / 3.0) <= 1e-15 &&
                  std::abs(eh->value({-1.0, 0, 0}) - 1.0 / 3.0) <= 1e-15,
              "extended hat value 1/3 at the unit sites");
  return out;
}

// ---------------------------------------------------------------------------
// 2. The vanishing interpolant of the alternating three-periodic data.
// ---------------------------------------------------------------------------
Outcome criterion_counterexample() {
  Outcome out;
  const CounterexampleResult r = run_counterexample();
  out.require(r.max_interpolant_value <= 1e-12,
              "sampled interpolant sup " +
                  std::to_string(r.max_interpolant_value));
  out.require(r.min_multiplier <= 1e-12, "expected a near-zero symbol mode");
  out.require(std::abs(r.q1_reference_sup - 1.0) <= 1e-12,
              "q1 reference sup should be 1");
  out.require(r.pass, "counterexample report flag");
  return out;
}

// ---------------------------------------------------------------------------
// 3. Stencil values, symbol minimum, and the solve round trip.
// ---------------------------------------------------------------------------
Outcome criterion_stencil() {
  Outcome out;
  const LatticeDomain domain(1, {16, 1, 1});
  const ConvolutionOperator op(make_q1(1), domain);
  out.require(std::abs(op.stencil({0, 0, 0}) - 2.0 / 3.0) <= 1e-12,
              "center stencil weight");
  out.require(std::abs(op.stencil({1, 0, 0}) - 1.0 / 6.0) <= 1e-12 &&
                  std::abs(op.stencil({-1, 0, 0}) - 1.0 / 6.0) <= 1e-12,
              "neighbor stencil weight");
  out.require(op.stencil({2, 0, 0}) == 0.0, "stencil radius");
  out.require(std::abs(op.min_multiplier() - 1.0 / 3.0) <= 1e-12,
              "symbol minimum 1/3");
  out.require(std::abs(op.multiplier()[8] - 1.0 / 3.0) <= 1e-12,
              "symbol minimum at the alternating mode");
  for (int extent : {16, 64, 256}) {
    const LatticeDomain box(1, {extent, 1, 1});
    const ConvolutionOperator op_n(make_q1(1), box);
    const LatticeFunction u = random_function(box, 1, 42 + extent);
    const double rel =
        lp_norm(op_n.solve(op_n.apply(u)) - u, 2.0) / lp_norm(u, 2.0);
    out.require(rel <= 1e-10,
                "round trip at extent " + std::to_string(extent));
  }
  return out;
}

// ---------------------------------------------------------------------------
// 4 and 5. The norm-equivalence chain and the gradient stability bound.
// ---------------------------------------------------------------------------
EquivalenceResult equivalence_run(int dim, int samples, bool stability) {
  EquivalenceConfig cfg;
  cfg.basis = "q1";
  cfg.dim = dim;
  cfg.extent = dim == 1 ? 16 : 10;
  cfg.samples = samples;
  cfg.seed = 2024;
  cfg.stability_check = stability;
  return run_equivalence(cfg);
}

Outcome criterion_chain() {
  Outcome out;
  int total_draws = 0;
  for (int d : {1, 2}) {
    const EquivalenceResult r = equivalence_run(d, d == 1 ? 160 : 150, false);
    total_draws += (d == 1 ? 160 : 150) + 3;
    for (const InequalityStats& row : r.stats) {
      const bool upper = row.name == "conv_lattice_le_lattice" ||
                         row.name == "smoothed_L_le_nodal_L" ||
                         row.name == "nodal_L_le_lattice";
      if (upper)
        out.require(row.violations == 0,
                    row.name + " violated at d=" + std::to_string(d));
    }
    if (d == 1) {
      const InequalityStats* c0 = r.find("c0_conv_lattice_over_lattice", 2.0);
      out.require(c0 != nullptr &&
                      std::abs(c0->min_ratio - 1.0 / 3.0) <= 1e-6,
                  "lower-bound ratio must attain 1/3");
    }
  }
  out.require(total_draws >= 300, "ensemble too small");
  return out;
}

Outcome criterion_gradient_stability() {
  Outcome out;
  for (int d : {1, 2}) {
    const EquivalenceResult r = equivalence_run(d, d == 1 ? 160 : 150, true);
    for (std::size_t i = 0; i < r.stats.size(); ++i) {
      const InequalityStats& row = r.stats[i];
      if (row.name == "grad_smoothed_le_grad_nodal")
        out.require(row.violations == 0,
                    "gradient bound violated at d=" + std::to_string(d));
      if (row.name == "c1p_grad_smoothed_over_grad_nodal") {
        const double doubled = r.doubled_min_ratio[i];
        out.require(std::abs(row.min_ratio - doubled) <= 0.10 * doubled,
                    "gradient lower ratio unstable at d=" + std::to_string(d));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// 6. The smooth nodal interpolant: reproduction and the inverse-defect bound.
// ---------------------------------------------------------------------------
Outcome criterion_smooth_nodal() {
  Outcome out;
  const LatticeDomain domain(1, {32, 1, 1});
  const SmoothedBasis sb = smoothed(make_q1(1));
  const ConvolutionOperator op(make_q1(1), domain);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const LatticeFunction u = random_function(domain, 1, 5000 + trial);
    const InterpolantField field = smooth_nodal_interpolant(sb, u);
    for (int i = 0; i < 32; ++i)
      worst = std::max(worst, std::abs(field.scalar({double(i), 0, 0}) -
                                       u.value({i, 0, 0})));
  }
  out.require(worst <= 1e-10,
              "site reproduction defect " + std::to_string(worst));

  auto defect_constant = [&](int draws) {
    double c = 0.0;
    for (int trial = 0; trial < draws; ++trial) {
      const LatticeFunction u = random_function(domain, 1, 9000 + trial);
      const double num = lp_norm(op.solve(u) - u, 2.0);
      const double den =
          lp_norm_field(nodal_interpolant(u, make_q1(1)), 2.0, 1).value;
      if (den > 1e-12) c = std::max(c, num / den);
    }
    return c;
  };
  const double c1 = defect_constant(100);
  const double c2 = defect_constant(200);
  out.require(c1 > 0.0 && std::abs(c1 - c2) <= 0.10 * c2,
              "inverse-defect constant unstable: " + std::to_string(c1) +
                  " vs " + std::to_string(c2));
  return out;
}

// ---------------------------------------------------------------------------
// 7. Dual basis, projector, cubic reproduction, quartic sharpness.
// ---------------------------------------------------------------------------
Outcome criterion_dual() {
  Outcome out;
  const SmoothedBasis sb = smoothed(make_q1(1));
  const DualBasis dual = build_dual(sb);
  out.require(dual.index_set().size() == 7, "index set size");

  // bi-orthogonality via composite Simpson, independent of the Gauss rules;
  // inside the support box the dual equals its defining series, which avoids
  // sampling the hard-truncation jump exactly at the endpoints
  auto dual_series = [&](double x) {
    double acc = 0.0;
    for (int xi = -3; xi <= 3; ++xi)
      acc += dual.coefficient({xi, 0, 0}) * sb.value({x - xi, 0, 0});
    return acc;
  };
  for (int xi = -3; xi <= 3; ++xi) {
    double inner = 0.0;
    const int panels = 4096;
    for (int i = 0; i < panels; ++i) {
      const double a = -2.0 + 4.0 * i / panels;
      const double b = -2.0 + 4.0 * (i + 1) / panels;
      const double m = 0.5 * (a + b);
      auto f = [&](double x) { return dual_series(x) * sb.value({x - xi, 0, 0}); };
      inner += (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    }
    out.require(std::abs(inner - (xi == 0 ? 1.0 : 0.0)) <= 1e-9,
                "bi-orthogonality at shift " + std::to_string(xi));
  }

  // projector on random coefficient vectors
  const QuasiInterpolant quasi(dual);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double proj_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    double w[13];
    for (double& v : w) v = gauss(rng);
    auto wtilde = [&](const Point& x) {
      double acc = 0.0;
      for (int xi = -6; xi <= 6; ++xi)
        acc += w[xi + 6] * sb.value({x[0] - xi, 0, 0});
      return acc;
    };
    for (int site = -2; site <= 2; ++site)
      proj_worst = std::max(proj_worst,
                            std::abs(quasi.coefficient(wtilde, {site, 0, 0}) -
                                     w[site + 6]));
  }
  out.require(proj_worst <= 1e-9,
              "projector residual " + std::to_string(proj_worst));

  // cubic reproduction on the interior window
  auto cubic = [](const Point& x) {
    return 0.4 - 0.6 * x[0] + 0.3 * x[0] * x[0] + 0.2 * x[0] * x[0] * x[0];
  };
  double cubic_worst = 0.0;
  for (double x = -1.5; x <= 1.5; x += 0.25)
    cubic_worst = std::max(cubic_worst, std::abs(quasi.evaluate(cubic, {x, 0, 0}) -
                                                 cubic({x, 0, 0})));
  out.require(cubic_worst <= 1e-9,
              "cubic reproduction residual " + std::to_string(cubic_worst));

  // quartic non-reproduction at unit scale
  auto quartic = [](const Point& x) { return std::pow(x[0], 4); };
  double quartic_res = 0.0;
  for (double x = -0.75; x <= 0.75; x += 0.25)
    quartic_res = std::max(quartic_res, std::abs(quasi.evaluate(quartic, {x, 0, 0}) -
                                                 quartic({x, 0, 0})));
  out.require(quartic_res >= 1e-3,
              "quartic residual too small: " + std::to_string(quartic_res));
  return out;
}

// ---------------------------------------------------------------------------
// 8. Convergence-rate ladder.
// ---------------------------------------------------------------------------
Outcome criterion_convergence() {
  Outcome out;
  struct Case {
    InterpKind kind;
    int j;
    double expected;
    double tol;
  };
  const std::vector<Case> cases = {
      {InterpKind::FirstOrderNodal, 0, 2.0, 0.1},
      {InterpKind::FirstOrderNodal, 1, 1.0, 0.1},
      {InterpKind::SmoothNodal, 0, 4.0, 0.3},
      {InterpKind::SmoothNodal, 1, 3.0, 0.3},
      {InterpKind::SmoothNodal, 2, 2.0, 0.2},
      {InterpKind::Quasi, 0, 4.0, 0.3},
      {InterpKind::Quasi, 1, 3.0, 0.3},
      {InterpKind::Quasi, 2, 2.0, 0.2},
  };
  for (int d : {1, 2}) {
    for (const Case& c : cases) {
      ConvergenceConfig cfg;
      cfg.kind = c.kind;
      cfg.function = d == 1 ? "sin" : "trig";
      cfg.dim = d;
      cfg.deriv_order = c.j;
      cfg.p = 2.0;
      cfg.extents = {8, 16, 32, 64};
      const ConvergenceResult r = run_convergence(cfg);
      char what[160];
      std::snprintf(what, sizeof(what),
                    "%s d=%d j=%d slope %.3f (expected %.1f +/- %.1f)",
                    to_string(c.kind).c_str(), d, c.j, r.slope, c.expected,
                    c.tol);
      out.require(std::abs(r.slope - c.expected) <= c.tol, what);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// 9. The two-basis difference of a cubic is affine.
// ---------------------------------------------------------------------------
Outcome criterion_two_basis() {
  Outcome out;
  Polynomial p(2);
  p.add_term({3, 0, 0}, 1.0);  // first coordinate cubed
  RealBox window;
  window.lo = {-1.5, -1.5, 0.0};
  window.hi = {1.5, 1.5, 0.0};
  const double res =
      two_basis_difference_check(make_q1(2), make_p1(2), p, window, 0.25);
  out.require(res <= 1e-6, "affinity residual " + std::to_string(res));
  return out;
}

// ---------------------------------------------------------------------------
// 10. Regularity of the smoothed basis.
// ---------------------------------------------------------------------------
Outcome criterion_regularity() {
  Outcome out;
  const SmoothedBasis sb = smoothed(make_q1(1));
  // second derivative vs centered differences of the gradient, off the knots
  double worst = 0.0;
  for (double x = -1.95; x <= 1.95; x += 0.1) {
    if (std::abs(x - std::round(x)) < 0.02) continue;
    const double h = 1e-5;
    const double fd =
        (sb.gradient({x + h, 0, 0})[0] - sb.gradient({x - h, 0, 0})[0]) /
        (2.0 * h);
    double d2 = 0.0;
    sb.derivatives({x, 0, 0}, 2, &d2);
    worst = std::max(worst, std::abs(d2 - fd));
  }
  out.require(worst <= 1e-6, "second-derivative defect " + std::to_string(worst));

  // third derivative: bounded, constant inside cells, known plateau values
  const double plateau[4] = {1.0, -3.0, 3.0, -1.0};
  for (int cell = -2; cell < 2; ++cell) {
    double a = 0.0, b = 0.0;
    sb.derivatives({cell + 0.25, 0, 0}, 3, &a);
    sb.derivatives({cell + 0.75, 0, 0}, 3, &b);
    out.require(a == b, "third derivative not constant in a cell");
    out.require(std::abs(a - plateau[cell + 2]) <= 1e-13,
                "third-derivative plateau at cell " + std::to_string(cell));
    out.require(std::abs(a) <= 3.0 + 1e-13, "third derivative bound");
  }
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
  }

  const std::vector<Criterion> criteria = {
      {1, "assumption audit (q1, p1, extended hat)", criterion_audit},
      {2, "vanishing interpolant counterexample", criterion_counterexample},
      {3, "stencil, symbol minimum, solve round trip", criterion_stencil},
      {4, "norm-equivalence chain", criterion_chain},
      {5, "gradient stability bound", criterion_gradient_stability},
      {6, "smooth nodal interpolant", criterion_smooth_nodal},
      {7, "dual basis and quasi-interpolant", criterion_dual},
      {8, "convergence rates", criterion_convergence},
      {9, "two-basis cubic difference is affine", criterion_two_basis},
      {10, "smoothed-basis regularity", criterion_regularity},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d [%s] %s%s%s\n", c.id, out.pass ? "PASS" : "FAIL",
                c.title, out.detail.empty() ? "" : " -- ",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
