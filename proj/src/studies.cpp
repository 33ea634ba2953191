#include "gridfun/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

namespace gridfun {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_p(double p) {
  if (std::isinf(p)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

int tensor_entries(int dim, int order) {
  int n = 1;
  for (int k = 0; k < order; ++k) n *= dim;
  return n;
}

/// Deterministic uniform/gaussian source (fixed algorithm, not the
/// implementation-defined std distributions) so seeded reports are
/// byte-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() {  // (0, 1]
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }
  double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

double TestFunction::Factor::eval(double t, int deriv) const {
  double v = 0.0;
  for (const Trig& trig : trigs) {
    double amp = trig.amp;
    for (int k = 0; k < deriv; ++k) amp *= trig.omega;
    v += amp * std::sin(trig.omega * t + trig.phase + deriv * M_PI / 2.0);
  }
  // Horner for the deriv-th derivative of the polynomial part
  double pv = 0.0;
  for (int j = static_cast<int>(poly.size()) - 1; j >= deriv; --j) {
    double factor = 1.0;
    for (int k = 0; k < deriv; ++k) factor *= (j - k);
    pv = pv * t + poly[j] * factor;
  }
  return v + pv;
}

double TestFunction::value(const Point& x) const {
  double acc = 0.0;
  for (const Term& term : terms_) {
    double prod = 1.0;
    for (int k = 0; k < dim_; ++k) prod *= term.factor[k].eval(x[k], 0);
    acc += prod;
  }
  return acc;
}

void TestFunction::derivative(const Point& x, int order, double* out) const {
  const int entries = tensor_entries(dim_, order);
  std::fill(out, out + entries, 0.0);
  for (const Term& term : terms_) {
    for (int e = 0; e < entries; ++e) {
      int counts[kMaxDim] = {0, 0, 0};
      int rest = e;
      for (int k = order - 1; k >= 0; --k) {
        counts[rest % dim_] += 1;
        rest /= dim_;
      }
      double prod = 1.0;
      for (int k = 0; k < dim_; ++k)
        prod *= term.factor[k].eval(x[k], counts[k]);
      out[e] += prod;
    }
  }
}

namespace {

TestFunction::Factor const_factor() {
  TestFunction::Factor f;
  f.poly = {1.0};
  return f;
}

TestFunction::Factor sin_factor(double amp, double omega, double phase) {
  TestFunction::Factor f;
  f.trigs.push_back({amp, omega, phase});
  return f;
}

}  // namespace

TestFunction catalog(const std::string& name, int dim) {
  const double two_pi = 2.0 * M_PI;
  if (name == "sin") {
    TestFunction::Term term;
    term.factor[0] = sin_factor(1.0, two_pi, 0.0);
    for (int k = 1; k < dim; ++k) term.factor[k] = const_factor();
    return TestFunction("sin", dim, true, {term});
  }
  if (name == "trig") {
    TestFunction::Term term;
    for (int k = 0; k < dim; ++k) term.factor[k] = sin_factor(1.0, two_pi, 0.0);
    return TestFunction("trig", dim, true, {term});
  }
  if (name == "bump") {
    // per axis: sin^4(pi t) = 3/8 - cos(2 pi t)/2 + cos(4 pi t)/8
    TestFunction::Term term;
    for (int k = 0; k < dim; ++k) {
      TestFunction::Factor f;
      f.poly = {3.0 / 8.0};
      f.trigs.push_back({-0.5, two_pi, M_PI / 2.0});
      f.trigs.push_back({0.125, 2.0 * two_pi, M_PI / 2.0});
      term.factor[k] = f;
    }
    return TestFunction("bump", dim, true, {term});
  }
  if (name == "cubic") {
    // (t - 1/2)^3 along the first axis; non-periodic window study
    TestFunction::Term term;
    TestFunction::Factor f;
    f.poly = {-0.125, 0.75, -1.5, 1.0};
    term.factor[0] = f;
    for (int k = 1; k < dim; ++k) term.factor[k] = const_factor();
    return TestFunction("cubic", dim, false, {term});
  }
  throw InvalidParameterError("catalog: unknown test function " + name);
}

std::vector<std::string> catalog_names() {
  return {"sin", "trig", "bump", "cubic"};
}

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

std::string to_string(InterpKind kind) {
  switch (kind) {
    case InterpKind::FirstOrderNodal:
      return "first_order_nodal";
    case InterpKind::SmoothNodal:
      return "smooth_nodal";
    case InterpKind::Quasi:
      return "quasi";
  }
  return "?";
}

double convergence_error(const ConvergenceConfig& config, int extent) {
  const int d = config.dim;
  const int j = config.deriv_order;
  const double p = config.p;
  const double h = 1.0 / extent;
  const TestFunction v = catalog(config.function, d);

  MultiIndex ext{1, 1, 1};
  for (int k = 0; k < d; ++k) ext[k] = extent;
  const LatticeDomain domain(d, ext);
  const NodalBasisPtr basis = make_q1(d);

  std::optional<InterpolantField> field;
  switch (config.kind) {
    case InterpKind::FirstOrderNodal: {
      LatticeFunction u = sample_to_lattice(
          [&](const Point& x) { return v.value(x); }, domain, h);
      field.emplace(nodal_interpolant(std::move(u), basis));
      break;
    }
    case InterpKind::SmoothNodal: {
      LatticeFunction u = sample_to_lattice(
          [&](const Point& x) { return v.value(x); }, domain, h);
      field.emplace(smooth_nodal_interpolant(smoothed(basis), u));
      break;
    }
    case InterpKind::Quasi: {
      const QuasiInterpolant quasi(build_dual(smoothed(basis)));
      field.emplace(quasi.interpolate(
          [&](const Point& x) { return v.value(x); }, domain, h));
      break;
    }
  }
  if (j > field->max_order())
    throw UnsupportedOrderError("convergence study: derivative order " +
                                std::to_string(j) + " beyond field support");

  const int qp = config.quad_points > 0 ? config.quad_points : 6;
  const CellQuadrature quad = CellQuadrature::tensor(d, qp);
  const int entries = tensor_entries(d, j);
  std::vector<double> fd(entries), vd(entries);

  // Window margin for non-periodic data: stay clear of the seam.
  int margin = 0;
  if (!v.periodic())
    margin = static_cast<int>(std::ceil(field->basis_radius())) + 2;
  IndexBox cells{};
  for (int k = 0; k < d; ++k) {
    cells.lo[k] = margin;
    cells.hi[k] = extent - 1 - margin;
    if (cells.hi[k] < cells.lo[k])
      throw InvalidParameterError("convergence study: extent too small");
  }

  const double hj = std::pow(h, -j);
  double acc = 0.0;
  for_each_index(cells, d, [&](const MultiIndex& cell) {
    for (std::size_t q = 0; q < quad.nodes().size(); ++q) {
      Point z{}, y{};
      for (int k = 0; k < d; ++k) {
        z[k] = cell[k] + quad.nodes()[q][k];
        y[k] = h * z[k];
      }
      field->evaluate(z, j, fd.data());
      v.derivative(y, j, vd.data());
      double frob = 0.0;
      for (int e = 0; e < entries; ++e) {
        const double diff = fd[e] * hj - vd[e];
        frob += diff * diff;
      }
      frob = std::sqrt(frob);
      if (std::isinf(p))
        acc = std::max(acc, frob);
      else
        acc += quad.weights()[q] * std::pow(frob, p);
    }
  });
  if (std::isinf(p)) return acc;
  return std::pow(h, double(d) / p) * std::pow(acc, 1.0 / p);
}

ConvergenceResult run_convergence(const ConvergenceConfig& config) {
  if (config.extents.size() < 4)
    throw InvalidParameterError("run_convergence: ladder needs >= 4 rungs");
  ConvergenceResult result;
  result.config = config;
  for (int extent : config.extents) {
    result.spacings.push_back(1.0 / extent);
    result.errors.push_back(convergence_error(config, extent));
  }
  // least-squares slope of log e against log h
  const std::size_t n = result.errors.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(result.spacings[i]);
    const double y = std::log(std::max(result.errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  result.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - result.slope * sx) / n;
  double res2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(result.spacings[i]);
    const double y = std::log(std::max(result.errors[i], 1e-300));
    const double r = y - (result.slope * x + intercept);
    res2 += r * r;
  }
  result.fit_residual = std::sqrt(res2 / n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (result.errors[i + 1] >= result.errors[i]) result.monotone = false;
  const int k = config.kind == InterpKind::FirstOrderNodal ? 2 : 4;
  result.expected_slope = k - config.deriv_order;
  return result;
}

// ---------------------------------------------------------------------------
// Equivalence studies
// ---------------------------------------------------------------------------

namespace {

NodalBasisPtr basis_by_name(const std::string& name, int dim) {
  if (name == "q1") return make_q1(dim);
  if (name == "p1") return make_p1(dim);
  if (name == "exthat") {
    if (dim != 1)
      throw InvalidParameterError("exthat basis is one-dimensional");
    return make_extended_hat();
  }
  throw InvalidParameterError("unknown basis: " + name);
}

std::vector<LatticeFunction> make_ensemble(const LatticeDomain& domain,
                                           int samples, std::uint64_t seed) {
  std::vector<LatticeFunction> draws;
  const int d = domain.dim();
  // deterministic adversarial modes: constant, sawtooth-affine, alternating
  draws.push_back(LatticeFunction::build(
      domain, 1, [](const MultiIndex&, double* out) { out[0] = 1.0; }));
  draws.push_back(LatticeFunction::build(
      domain, 1, [&](const MultiIndex& site, double* out) {
        out[0] = static_cast<double>(site[0]) - 0.5 * domain.extent(0);
      }));
  draws.push_back(LatticeFunction::build(
      domain, 1, [&](const MultiIndex& site, double* out) {
        int s = 0;
        for (int k = 0; k < d; ++k) s += site[k];
        out[0] = (s % 2 == 0) ? 1.0 : -1.0;
      }));
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    if (i % 2 == 0) {
      draws.push_back(LatticeFunction::build(
          domain, 1, [&](const MultiIndex&, double* out) {
            out[0] = rng.gaussian();
          }));
    } else {
      // smooth low-frequency trigonometric combination
      struct Mode {
        double amp, phase[kMaxDim];
        int freq[kMaxDim];
      };
      std::vector<Mode> modes(3);
      for (Mode& m : modes) {
        m.amp = rng.gaussian();
        for (int k = 0; k < d; ++k) {
          m.freq[k] = 1 + static_cast<int>(rng.raw() % 3u);
          m.phase[k] = 2.0 * M_PI * rng.uniform();
        }
      }
      draws.push_back(LatticeFunction::build(
          domain, 1, [&](const MultiIndex& site, double* out) {
            double v = 0.0;
            for (const Mode& m : modes) {
              double prod = m.amp;
              for (int k = 0; k < d; ++k)
                prod *= std::sin(2.0 * M_PI * m.freq[k] * site[k] /
                                     domain.extent(k) +
                                 m.phase[k]);
              v += prod;
            }
            out[0] = v;
          }));
    }
  }
  return draws;
}

struct StatsTable {
  std::vector<InequalityStats> rows;

  InequalityStats& at(const std::string& name, double p) {
    for (InequalityStats& row : rows)
      if (row.name == name && row.p == p) return row;
    rows.push_back(InequalityStats{name, p, 0,
                                   std::numeric_limits<double>::infinity(),
                                   0.0});
    return rows.back();
  }

  void ratio(const std::string& name, double p, double num, double den,
             double scale) {
    if (den <= 1e-13 * std::max(scale, 1.0)) return;  // both-zero cases
    InequalityStats& row = at(name, p);
    const double r = num / den;
    row.min_ratio = std::min(row.min_ratio, r);
    row.max_ratio = std::max(row.max_ratio, r);
  }

  void upper_bound(const std::string& name, double p, double lhs, double rhs) {
    InequalityStats& row = at(name, p);
    if (lhs > rhs + 1e-10 * std::max(1.0, rhs)) row.violations += 1;
    if (rhs > 1e-13) {
      const double r = lhs / rhs;
      row.min_ratio = std::min(row.min_ratio, r);
      row.max_ratio = std::max(row.max_ratio, r);
    }
  }
};

StatsTable equivalence_sweep(const EquivalenceConfig& config, int samples) {
  const int d = config.dim;
  MultiIndex ext{1, 1, 1};
  for (int k = 0; k < d; ++k) ext[k] = config.extent;
  const LatticeDomain domain(d, ext);
  const NodalBasisPtr basis = basis_by_name(config.basis, d);
  const SmoothedBasis sb = smoothed(basis);
  domain.require_supports(sb.support_radius());
  const ConvolutionOperator op(basis, domain);
  const bool invertible = op.min_multiplier() > kInvertibilityTol;

  StatsTable table;
  for (const LatticeFunction& u : make_ensemble(domain, samples, config.seed)) {
    const LatticeFunction cu = op.apply(u);
    const InterpolantField bar = nodal_interpolant(u, basis);
    const InterpolantField tilde = convolution_interpolant(u, sb);
    std::optional<LatticeFunction> inv;
    std::optional<InterpolantField> smooth_nodal;
    if (invertible) {
      inv.emplace(op.solve(u));
      smooth_nodal.emplace(convolution_interpolant(*inv, sb));
    }
    for (double p : config.ps) {
      const double u_lp = lp_norm(u, p);
      const double cu_lp = lp_norm(cu, p);
      const double bar_lp = lp_norm_field(bar, p, 0).value;
      const double tilde_lp = lp_norm_field(tilde, p, 0).value;
      const double grad_bar = lp_norm_field(bar, p, 1).value;
      const double grad_tilde = lp_norm_field(tilde, p, 1).value;

      table.upper_bound("conv_lattice_le_lattice", p, cu_lp, u_lp);
      table.upper_bound("smoothed_L_le_nodal_L", p, tilde_lp, bar_lp);
      table.upper_bound("nodal_L_le_lattice", p, bar_lp, u_lp);
      table.upper_bound("grad_smoothed_le_grad_nodal", p, grad_tilde,
                        grad_bar);

      table.ratio("c0_conv_lattice_over_lattice", p, cu_lp, u_lp, u_lp);
      table.ratio("c1_smoothed_L_over_conv_lattice", p, tilde_lp, cu_lp, u_lp);
      table.ratio("c2_nodal_L_over_lattice", p, bar_lp, u_lp, u_lp);
      table.ratio("c1p_grad_smoothed_over_grad_nodal", p, grad_tilde, grad_bar,
                  u_lp);
      if (smooth_nodal) {
        const double grad_smooth_nodal =
            lp_norm_field(*smooth_nodal, p, 1).value;
        table.ratio("ct_grad_smooth_nodal_over_grad_nodal", p,
                    grad_smooth_nodal, grad_bar, u_lp);
        const double defect = lp_norm(*inv - u, p);
        table.ratio("Cinv_defect_over_grad_nodal", p, defect, grad_bar, u_lp);
      }
    }
  }
  return table;
}

}  // namespace

const InequalityStats* EquivalenceResult::find(const std::string& name,
                                               double p) const {
  for (const InequalityStats& row : stats)
    if (row.name == name && ((std::isinf(p) && std::isinf(row.p)) || row.p == p))
      return &row;
  return nullptr;
}

EquivalenceResult run_equivalence(const EquivalenceConfig& config) {
  EquivalenceResult result;
  result.config = config;
  result.stats = equivalence_sweep(config, config.samples).rows;
  if (config.stability_check) {
    const StatsTable doubled = equivalence_sweep(config, 2 * config.samples);
    for (const InequalityStats& row : result.stats) {
      const InequalityStats* twin = nullptr;
      for (const InequalityStats& cand : doubled.rows)
        if (cand.name == row.name && cand.p == row.p) twin = &cand;
      result.doubled_min_ratio.push_back(twin ? twin->min_ratio : 0.0);
      result.doubled_max_ratio.push_back(twin ? twin->max_ratio : 0.0);
    }
  }
  for (const InequalityStats& row : result.stats)
    result.hard_failures += row.violations;
  return result;
}

// ---------------------------------------------------------------------------
// Counterexample
// ---------------------------------------------------------------------------

CounterexampleResult run_counterexample() {
  CounterexampleResult result;
  const NodalBasisPtr exthat = make_extended_hat();
  // four periods of the repeating pattern (-1, 0, 1)
  const LatticeDomain domain(1, MultiIndex{12, 1, 1});
  const double pattern[3] = {-1.0, 0.0, 1.0};
  const LatticeFunction u = LatticeFunction::build(
      domain, 1, [&](const MultiIndex& site, double* out) {
        out[0] = pattern[site[0] % 3];
      });

  const InterpolantField bar = nodal_interpolant(u, exthat);
  Rng rng(99u);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const Point x{12.0 * rng.uniform(), 0.0, 0.0};
    worst = std::max(worst, std::abs(bar.scalar(x)));
  }
  result.max_interpolant_value = worst;

  const ConvolutionOperator op(exthat, domain);
  result.min_multiplier = op.min_multiplier();

  const InterpolantField q1_bar = nodal_interpolant(u, make_q1(1));
  result.q1_reference_sup =
      lp_norm_field(q1_bar, std::numeric_limits<double>::infinity(), 0).value;

  result.audit = verify_assumptions(*exthat, 200, 1e-12);
  result.pass = result.max_interpolant_value <= 1e-12 &&
                result.min_multiplier <= 1e-12 && result.audit.core_pass() &&
                !result.audit.interpolation.pass &&
                std::abs(result.q1_reference_sup - 1.0) <= 1e-12;
  return result;
}

// ---------------------------------------------------------------------------
// Smoothness measure
// ---------------------------------------------------------------------------

SmoothnessResult run_smoothness_measure(const LatticeFunction& u,
                                        const SmoothedBasis& basis,
                                        const SmoothnessConfig& config) {
  if (config.deriv_order > basis.max_derivative_order())
    throw UnsupportedOrderError("smoothness measure: derivative order " +
                                std::to_string(config.deriv_order) +
                                " beyond backend support");
  const InterpolantField field = smooth_nodal_interpolant(basis, u);
  SmoothnessResult result;
  const CellQuadrature quad = CellQuadrature::for_field(field, config.p);
  result.norm = lp_norm_field(field, config.p, config.deriv_order, quad);
  result.cell_norms = cell_norms(field, config.p, config.deriv_order, quad);
  return result;
}

SmoothnessResult run_smoothness_measure(const DeformationField& y,
                                        const SmoothedBasis& basis,
                                        const SmoothnessConfig& config) {
  // grad(smooth interpolant of y) - A equals grad(smooth interpolant of u)
  return run_smoothness_measure(y.displacement(), basis, config);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string to_csv(const ConvergenceResult& r) {
  std::ostringstream out;
  out << "kind,function,dim,deriv_order,p,extent,h,error\n";
  for (std::size_t i = 0; i < r.errors.size(); ++i) {
    out << to_string(r.config.kind) << ',' << r.config.function << ','
        << r.config.dim << ',' << r.config.deriv_order << ','
        << fmt_p(r.config.p) << ',' << r.config.extents[i] << ','
        << fmt(r.spacings[i]) << ',' << fmt(r.errors[i]) << '\n';
  }
  out << "# slope=" << fmt(r.slope) << " expected=" << fmt(r.expected_slope)
      << " fit_residual=" << fmt(r.fit_residual)
      << " monotone=" << (r.monotone ? 1 : 0) << '\n';
  return out.str();
}

std::string to_csv(const EquivalenceResult& r) {
  std::ostringstream out;
  out << "inequality,p,violations,min_ratio,max_ratio,doubled_min,doubled_max\n";
  for (std::size_t i = 0; i < r.stats.size(); ++i) {
    const InequalityStats& row = r.stats[i];
    out << row.name << ',' << fmt_p(row.p) << ',' << row.violations << ','
        << fmt(row.min_ratio) << ',' << fmt(row.max_ratio) << ',';
    if (i < r.doubled_min_ratio.size())
      out << fmt(r.doubled_min_ratio[i]) << ',' << fmt(r.doubled_max_ratio[i]);
    else
      out << ",";
    out << '\n';
  }
  return out.str();
}

std::string to_json(const ConvergenceResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = "gridfun/convergence/1";
  j["kind"] = to_string(r.config.kind);
  j["function"] = r.config.function;
  j["dim"] = r.config.dim;
  j["deriv_order"] = r.config.deriv_order;
  j["p"] = fmt_p(r.config.p);
  j["rungs"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.errors.size(); ++i) {
    j["rungs"].push_back({{"extent", r.config.extents[i]},
                          {"h", r.spacings[i]},
                          {"error", r.errors[i]}});
  }
  j["slope"] = r.slope;
  j["expected_slope"] = r.expected_slope;
  j["fit_residual"] = r.fit_residual;
  j["monotone"] = r.monotone;
  return j.dump(2);
}

std::string to_json(const EquivalenceResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = "gridfun/equivalence/1";
  j["basis"] = r.config.basis;
  j["dim"] = r.config.dim;
  j["extent"] = r.config.extent;
  j["samples"] = r.config.samples;
  j["seed"] = r.config.seed;
  j["hard_failures"] = r.hard_failures;
  j["inequalities"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.stats.size(); ++i) {
    const InequalityStats& row = r.stats[i];
    nlohmann::ordered_json rj;
    rj["name"] = row.name;
    rj["p"] = fmt_p(row.p);
    rj["violations"] = row.violations;
    rj["min_ratio"] = row.min_ratio;
    rj["max_ratio"] = row.max_ratio;
    if (i < r.doubled_min_ratio.size()) {
      rj["doubled_min_ratio"] = r.doubled_min_ratio[i];
      rj["doubled_max_ratio"] = r.doubled_max_ratio[i];
    }
    j["inequalities"].push_back(rj);
  }
  return j.dump(2);
}

std::string to_json(const CounterexampleResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = "gridfun/counterexample/1";
  j["max_interpolant_value"] = r.max_interpolant_value;
  j["min_multiplier"] = r.min_multiplier;
  j["q1_reference_sup"] = r.q1_reference_sup;
  j["audit"] = {
      {"lipschitz", r.audit.lipschitz.pass},
      {"locality", r.audit.locality.pass},
      {"affine_reproduction", r.audit.affine_reproduction.pass},
      {"interpolation", r.audit.interpolation.pass},
      {"interpolation_residual", r.audit.interpolation.residual},
  };
  j["pass"] = r.pass;
  return j.dump(2);
}

std::string to_json(const SmoothnessResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = "gridfun/smoothness/1";
  j["p"] = fmt_p(r.norm.p);
  j["deriv_order"] = r.norm.derivative_order;
  j["value"] = r.norm.value;
  j["quad_degree"] = r.norm.quad_degree;
  j["cells"] = r.norm.cells;
  return j.dump(2);
}

std::string to_json(const NormReport& r, const std::string& kind,
                    const LatticeDomain& domain) {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["p"] = fmt_p(r.p);
  j["k"] = r.derivative_order;
  j["value"] = r.value;
  j["quad_degree"] = r.quad_degree;
  j["domain"] = nlohmann::ordered_json::array();
  for (int k = 0; k < domain.dim(); ++k) j["domain"].push_back(domain.extent(k));
  return j.dump(2);
}

}  // namespace gridfun
