#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridfun/convop.hpp"
#include "gridfun/interp.hpp"
#include "gridfun/lattice.hpp"
#include "gridfun/quasi.hpp"

namespace gridfun {

// ---------------------------------------------------------------------------
// Test-function catalog: smooth functions on the physical box [0,1]^d with
// analytic derivatives up to order 3 (periodic except for the window-study
// polynomials).
// ---------------------------------------------------------------------------

class TestFunction {
 public:
  struct Trig {
    double amp = 1.0, omega = 1.0, phase = 0.0;
  };
  struct Factor {
    // value(t) = sum of amp*sin(omega t + phase) terms plus a polynomial
    std::vector<Trig> trigs;
    std::vector<double> poly;
    double eval(double t, int deriv) const;
  };
  struct Term {
    std::array<Factor, kMaxDim> factor;
  };

  TestFunction(std::string name, int dim, bool periodic,
               std::vector<Term> terms)
      : name_(std::move(name)),
        dim_(dim),
        periodic_(periodic),
        terms_(std::move(terms)) {}

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  bool periodic() const { return periodic_; }

  double value(const Point& x) const;
  /// Full derivative tensor of the given order (d^order entries).
  void derivative(const Point& x, int order, double* out) const;

 private:
  std::string name_;
  int dim_;
  bool periodic_;
  std::vector<Term> terms_;
};

/// Named entries: "sin" (sin(2 pi x1), any dim), "trig" (product of sines),
/// "bump" (sin^4 product), "cubic" (window polynomial, non-periodic).
TestFunction catalog(const std::string& name, int dim);
std::vector<std::string> catalog_names();

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

enum class InterpKind { FirstOrderNodal, SmoothNodal, Quasi };

std::string to_string(InterpKind kind);

struct ConvergenceConfig {
  InterpKind kind = InterpKind::FirstOrderNodal;
  std::string function = "sin";
  int dim = 1;
  int deriv_order = 0;  // j
  double p = 2.0;
  std::vector<int> extents = {8, 16, 32, 64};
  int quad_points = 0;  // 0: per-field default
};

struct ConvergenceResult {
  ConvergenceConfig config;
  std::vector<double> spacings;  // h = 1/N
  std::vector<double> errors;    // physical-domain W^{j,p} error at each rung
  double slope = 0.0;            // log-log least-squares fit
  double fit_residual = 0.0;     // rms residual of the fit
  bool monotone = true;          // flagged, not fatal
  double expected_slope = 0.0;   // k - j for the interpolant class
  bool slope_ok(double tol) const {
    return std::abs(slope - expected_slope) <= tol;
  }
};

ConvergenceResult run_convergence(const ConvergenceConfig& config);

/// Error of one rung: the interpolant of v sampled at spacing h = 1/extent,
/// measured against v in the physical W^{j,p} seminorm. Exposed for tests.
double convergence_error(const ConvergenceConfig& config, int extent);

// ---------------------------------------------------------------------------
// Norm-equivalence studies
// ---------------------------------------------------------------------------

struct EquivalenceConfig {
  std::string basis = "q1";  // q1 | p1 | exthat
  int dim = 1;
  int extent = 16;
  std::vector<double> ps = {1.0, 2.0, 4.0,
                            std::numeric_limits<double>::infinity()};
  int samples = 100;  // random draws; adversarial modes are always added
  std::uint64_t seed = 1u;
  bool stability_check = true;  // rerun with doubled samples
};

struct InequalityStats {
  std::string name;
  double p = 2.0;
  int violations = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
};

struct EquivalenceResult {
  EquivalenceConfig config;
  std::vector<InequalityStats> stats;
  // Extremes under doubled samples, aligned with `stats`.
  std::vector<double> doubled_min_ratio;
  std::vector<double> doubled_max_ratio;
  int hard_failures = 0;

  const InequalityStats* find(const std::string& name, double p) const;
};

EquivalenceResult run_equivalence(const EquivalenceConfig& config);

// ---------------------------------------------------------------------------
// Counterexample and smoothness reports
// ---------------------------------------------------------------------------

struct CounterexampleResult {
  double max_interpolant_value = 0.0;  // sup |first-order interpolant|
  double min_multiplier = 0.0;         // operator symbol minimum
  double q1_reference_sup = 0.0;       // same data under Q1
  AssumptionReport audit;
  bool pass = false;
};

CounterexampleResult run_counterexample();

struct SmoothnessConfig {
  int deriv_order = 2;  // k
  double p = 2.0;
};

struct SmoothnessResult {
  NormReport norm;                // |D^k (smooth nodal interpolant)|_{L^p}
  std::vector<double> cell_norms; // per-cell breakdown
};

SmoothnessResult run_smoothness_measure(const LatticeFunction& u,
                                        const SmoothedBasis& basis,
                                        const SmoothnessConfig& config);

/// For a deformation y = A x + u: the smooth interpolant of y is A x plus the
/// smooth interpolant of u, so |grad - A| norms reduce to the displacement.
SmoothnessResult run_smoothness_measure(const DeformationField& y,
                                        const SmoothedBasis& basis,
                                        const SmoothnessConfig& config);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string to_csv(const ConvergenceResult& r);
std::string to_csv(const EquivalenceResult& r);
std::string to_json(const ConvergenceResult& r);
std::string to_json(const EquivalenceResult& r);
std::string to_json(const CounterexampleResult& r);
std::string to_json(const SmoothnessResult& r);
std::string to_json(const NormReport& r, const std::string& kind,
                    const LatticeDomain& domain);

}  // namespace gridfun
