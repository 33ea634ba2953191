#include "gridfun/interp.hpp"

#include <algorithm>
#include <cmath>

#include "gridfun/quadrature.hpp"

namespace gridfun {

namespace {

int tensor_entries(int dim, int order) {
  int n = 1;
  for (int k = 0; k < order; ++k) n *= dim;
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// InterpolantField
// ---------------------------------------------------------------------------

InterpolantField::InterpolantField(
    LatticeFunction coefficients,
    std::variant<NodalBasisPtr, SmoothedBasis> basis)
    : coefficients_(std::move(coefficients)), basis_(std::move(basis)) {
  coefficients_.require_finite();
  const int bd = std::holds_alternative<NodalBasisPtr>(basis_)
                     ? std::get<NodalBasisPtr>(basis_)->dim()
                     : std::get<SmoothedBasis>(basis_).dim();
  if (bd != domain().dim())
    throw InvalidParameterError("InterpolantField: basis dimension mismatch");
  domain().require_supports(basis_radius());
}

InterpolantField InterpolantField::nodal(LatticeFunction coefficients,
                                         NodalBasisPtr basis) {
  if (!basis) throw InvalidParameterError("InterpolantField: null basis");
  return InterpolantField(std::move(coefficients), std::move(basis));
}

InterpolantField InterpolantField::smoothed(LatticeFunction coefficients,
                                            SmoothedBasis basis) {
  return InterpolantField(std::move(coefficients), std::move(basis));
}

FieldKind InterpolantField::kind() const {
  return std::holds_alternative<NodalBasisPtr>(basis_) ? FieldKind::Nodal
                                                       : FieldKind::Smoothed;
}

double InterpolantField::basis_radius() const {
  return kind() == FieldKind::Nodal
             ? std::get<NodalBasisPtr>(basis_)->support_radius()
             : std::get<SmoothedBasis>(basis_).support_radius();
}

int InterpolantField::max_order() const {
  return kind() == FieldKind::Nodal
             ? 1
             : std::get<SmoothedBasis>(basis_).max_derivative_order();
}

const NodalBasisPtr& InterpolantField::nodal_basis() const {
  return std::get<NodalBasisPtr>(basis_);
}

const SmoothedBasis& InterpolantField::smoothed_basis() const {
  return std::get<SmoothedBasis>(basis_);
}

void InterpolantField::basis_derivatives(const Point& x, int order,
                                         double* out) const {
  if (kind() == FieldKind::Nodal) {
    const NodalBasis& b = *std::get<NodalBasisPtr>(basis_);
    if (order == 0) {
      out[0] = b.value(x);
    } else if (order == 1) {
      const Point g = b.gradient(x);
      for (int k = 0; k < dim(); ++k) out[k] = g[k];
    } else {
      throw UnsupportedOrderError(
          "first-order interpolants provide derivatives up to order 1");
    }
  } else {
    std::get<SmoothedBasis>(basis_).derivatives(x, order, out);
  }
}

void InterpolantField::evaluate(const Point& x, int order, double* out) const {
  if (order < 0 || order > max_order())
    throw UnsupportedOrderError("InterpolantField: order " +
                                std::to_string(order) + " exceeds max " +
                                std::to_string(max_order()));
  const int d = dim();
  const int entries = tensor_entries(d, order);
  const int m = components();
  std::fill(out, out + std::size_t(m) * entries, 0.0);
  const double r = basis_radius();
  IndexBox box{};
  for (int k = 0; k < d; ++k) {
    box.lo[k] = static_cast<int>(std::ceil(x[k] - r));
    box.hi[k] = static_cast<int>(std::floor(x[k] + r));
  }
  std::vector<double> t(entries);
  for_each_index(box, d, [&](const MultiIndex& xi) {
    Point rel{};
    for (int k = 0; k < d; ++k) rel[k] = x[k] - xi[k];
    basis_derivatives(rel, order, t.data());
    bool zero = true;
    for (int e = 0; e < entries; ++e) zero = zero && t[e] == 0.0;
    if (zero) return;
    for (int c = 0; c < m; ++c) {
      const double w = coefficients_.value(xi, c);
      for (int e = 0; e < entries; ++e) out[c * entries + e] += w * t[e];
    }
  });
}

std::vector<double> InterpolantField::evaluate(const Point& x,
                                               int order) const {
  std::vector<double> out(std::size_t(components()) *
                          tensor_entries(dim(), order));
  evaluate(x, order, out.data());
  return out;
}

double InterpolantField::scalar(const Point& x) const {
  std::vector<double> out(components());
  evaluate(x, 0, out.data());
  return out[0];
}

InterpolantField nodal_interpolant(LatticeFunction u, NodalBasisPtr basis) {
  return InterpolantField::nodal(std::move(u), std::move(basis));
}

InterpolantField convolution_interpolant(LatticeFunction u,
                                         SmoothedBasis basis) {
  return InterpolantField::smoothed(std::move(u), std::move(basis));
}

// ---------------------------------------------------------------------------
// CellQuadrature
// ---------------------------------------------------------------------------

CellQuadrature::CellQuadrature(int dim, int degree, std::vector<Point> nodes,
                               std::vector<double> weights)
    : dim_(dim),
      degree_(degree),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)) {
  validate();
}

void CellQuadrature::validate() const {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0))
      throw ConstructionError("CellQuadrature: non-positive weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-14)
    throw ConstructionError("CellQuadrature: weights sum to " +
                            std::to_string(sum));
  // Monomial exactness up to the declared degree.
  std::array<int, kMaxDim> alpha{};
  const std::function<void(int, int)> check = [&](int axis, int remaining) {
    if (axis == dim_) {
      double exact = 1.0;
      for (int k = 0; k < dim_; ++k) exact /= alpha[k] + 1;
      double got = 0.0;
      for (std::size_t j = 0; j < nodes_.size(); ++j) {
        double v = weights_[j];
        for (int k = 0; k < dim_; ++k)
          for (int e = 0; e < alpha[k]; ++e) v *= nodes_[j][k];
        got += v;
      }
      if (std::abs(got - exact) > 1e-13)
        throw ConstructionError("CellQuadrature: monomial exactness failure");
      return;
    }
    for (int a = 0; a <= remaining; ++a) {
      alpha[axis] = a;
      check(axis + 1, remaining - a);
    }
    alpha[axis] = 0;
  };
  check(0, degree_);
}

CellQuadrature CellQuadrature::tensor(int dim, int points_per_axis) {
  const GaussRule& rule = gauss_legendre(points_per_axis);
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::array<int, kMaxDim> q{};
  while (true) {
    Point x{};
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      x[k] = rule.nodes[q[k]];
      w *= rule.weights[q[k]];
    }
    nodes.push_back(x);
    weights.push_back(w);
    int axis = dim - 1;
    while (axis >= 0) {
      if (++q[axis] < rule.points()) break;
      q[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return CellQuadrature(dim, rule.exact_degree(), std::move(nodes),
                        std::move(weights));
}

CellQuadrature CellQuadrature::simplicial(const SimplicialPartition& partition,
                                          int points_per_axis) {
  const int dim = partition.dim();
  const GaussRule& rule = gauss_legendre(points_per_axis);
  std::vector<Point> nodes;
  std::vector<double> weights;
  const double dfact = dim == 1 ? 1.0 : (dim == 2 ? 2.0 : 6.0);
  for (int s = 0; s < partition.size(); ++s) {
    const auto& simplex = partition.simplices()[s];
    const double scale = partition.volume(s) * dfact;
    std::array<int, kMaxDim> q{};
    while (true) {
      // Duffy map from the unit cube to the unit simplex; the jacobian is the
      // product of the remaining barycentric mass before each cascade step
      double u[kMaxDim] = {0, 0, 0};
      for (int k = 0; k < dim; ++k) u[k] = rule.nodes[q[k]];
      double lambda[kMaxDim] = {0, 0, 0};
      double jac = 1.0;
      double rem = 1.0;
      for (int k = 0; k < dim; ++k) {
        lambda[k] = u[k] * rem;
        jac *= rem;
        rem *= (1.0 - u[k]);
      }
      Point x{};
      for (int i = 0; i < dim; ++i) {
        x[i] = simplex.vertex[0][i];
        for (int k = 0; k < dim; ++k)
          x[i] += lambda[k] * (simplex.vertex[k + 1][i] - simplex.vertex[0][i]);
      }
      double w = scale * jac;
      for (int k = 0; k < dim; ++k) w *= rule.weights[q[k]];
      nodes.push_back(x);
      weights.push_back(w);
      int axis = dim - 1;
      while (axis >= 0) {
        if (++q[axis] < rule.points()) break;
        q[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  return CellQuadrature(dim, std::max(1, 2 * points_per_axis - 3),
                        std::move(nodes), std::move(weights));
}

CellQuadrature CellQuadrature::for_field(const InterpolantField& field,
                                         double p) {
  const int d = field.dim();
  int n;
  if (p == 2.0)
    n = 4;
  else if (p == 4.0)
    n = 7;
  else if (std::isinf(p))
    n = 5;
  else
    n = 6;  // non-polynomial integrand; declared accuracy
  if (field.kind() == FieldKind::Nodal) {
    const SimplicialPartition* partition = field.nodal_basis()->partition();
    if (partition) return simplicial(*partition, std::max(n, 4));
  }
  return tensor(d, n);
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

namespace {

/// Per-node tables of basis derivative tensors at fixed offsets, shared by
/// every cell (the quadrature nodes repeat cell-periodically).
struct NodeTables {
  struct Entry {
    MultiIndex delta{};
    std::vector<double> tensor;
  };
  std::vector<std::vector<Entry>> per_node;
  int entries = 0;
};

NodeTables build_tables(const InterpolantField& field,
                        const std::vector<Point>& offsets, int order) {
  NodeTables tables;
  const int d = field.dim();
  tables.entries = tensor_entries(d, order);
  const double r = field.basis_radius();
  tables.per_node.resize(offsets.size());
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    IndexBox box{};
    for (int k = 0; k < d; ++k) {
      box.lo[k] = static_cast<int>(std::ceil(offsets[j][k] - r));
      box.hi[k] = static_cast<int>(std::floor(offsets[j][k] + r));
    }
    for_each_index(box, d, [&](const MultiIndex& delta) {
      Point rel{};
      for (int k = 0; k < d; ++k) rel[k] = offsets[j][k] - delta[k];
      NodeTables::Entry entry;
      entry.delta = delta;
      entry.tensor.resize(tables.entries);
      field.basis_derivatives(rel, order, entry.tensor.data());
      bool zero = true;
      for (double v : entry.tensor) zero = zero && v == 0.0;
      if (!zero) tables.per_node[j].push_back(std::move(entry));
    });
  }
  return tables;
}

/// Frobenius norm of the m x E derivative tensor at one node.
double node_tensor_norm(const InterpolantField& field, const NodeTables& tables,
                        const MultiIndex& cell, std::size_t node) {
  const int m = field.components();
  const LatticeFunction& coeff = field.coefficients();
  double frob = 0.0;
  std::array<double, 64> acc{};  // E*m <= 27*2 for supported shapes; guard:
  std::vector<double> heap;
  double* a = acc.data();
  const std::size_t need = std::size_t(m) * tables.entries;
  if (need > acc.size()) {
    heap.assign(need, 0.0);
    a = heap.data();
  } else {
    std::fill(acc.begin(), acc.begin() + need, 0.0);
  }
  for (const auto& entry : tables.per_node[node]) {
    MultiIndex site = cell;
    for (int k = 0; k < field.dim(); ++k) site[k] += entry.delta[k];
    for (int c = 0; c < m; ++c) {
      const double w = coeff.value(site, c);
      for (int e = 0; e < tables.entries; ++e)
        a[c * tables.entries + e] += w * entry.tensor[e];
    }
  }
  for (std::size_t i = 0; i < need; ++i) frob += a[i] * a[i];
  return std::sqrt(frob);
}

}  // namespace

NormReport lp_norm_field(const InterpolantField& field, double p, int order,
                         const CellQuadrature& quadrature) {
  if (!(p >= 1.0))
    throw InvalidParameterError("lp_norm_field: p must be in [1, inf]");
  if (order > field.max_order())
    throw UnsupportedOrderError("lp_norm_field: derivative order too high");
  const LatticeDomain& domain = field.domain();

  std::vector<Point> offsets = quadrature.nodes();
  std::vector<double> weights = quadrature.weights();
  if (std::isinf(p)) {
    // dense sampling: quadrature nodes plus the cell corner at the origin
    offsets.push_back(Point{});
    weights.push_back(0.0);
  }
  const NodeTables tables = build_tables(field, offsets, order);

  NormReport report;
  report.p = p;
  report.derivative_order = order;
  report.quad_degree = quadrature.degree();
  report.cells = domain.sites();

  double acc = 0.0;
  for (std::int64_t s = 0; s < domain.sites(); ++s) {
    const MultiIndex cell = domain.site(s);
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      const double norm = node_tensor_norm(field, tables, cell, j);
      if (std::isinf(p))
        acc = std::max(acc, norm);
      else
        acc += weights[j] * std::pow(norm, p);
    }
  }
  report.value = std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
  return report;
}

NormReport lp_norm_field(const InterpolantField& field, double p, int order) {
  return lp_norm_field(field, p, order, CellQuadrature::for_field(field, p));
}

std::vector<double> cell_norms(const InterpolantField& field, double p,
                               int order, const CellQuadrature& quadrature) {
  if (!(p >= 1.0))
    throw InvalidParameterError("cell_norms: p must be in [1, inf]");
  const LatticeDomain& domain = field.domain();
  std::vector<Point> offsets = quadrature.nodes();
  std::vector<double> weights = quadrature.weights();
  if (std::isinf(p)) {
    offsets.push_back(Point{});
    weights.push_back(0.0);
  }
  const NodeTables tables = build_tables(field, offsets, order);
  std::vector<double> out(static_cast<std::size_t>(domain.sites()), 0.0);
  for (std::int64_t s = 0; s < domain.sites(); ++s) {
    const MultiIndex cell = domain.site(s);
    double acc = 0.0;
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      const double norm = node_tensor_norm(field, tables, cell, j);
      if (std::isinf(p))
        acc = std::max(acc, norm);
      else
        acc += weights[j] * std::pow(norm, p);
    }
    out[s] = std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
  }
  return out;
}

NormReport sobolev_norm(const LatticeFunction& u, const NodalBasisPtr& basis,
                        double p) {
  InterpolantField field = nodal_interpolant(u, basis);
  const NormReport value = lp_norm_field(field, p, 0);
  const NormReport grad = lp_norm_field(field, p, 1);
  NormReport report = grad;
  if (std::isinf(p))
    report.value = std::max(value.value, grad.value);
  else
    report.value =
        std::pow(std::pow(value.value, p) + std::pow(grad.value, p), 1.0 / p);
  return report;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

LatticeFunction sample_to_lattice(
    const std::function<void(const Point&, double*)>& v, int components,
    const LatticeDomain& domain, double spacing) {
  return LatticeFunction::build(
      domain, components, [&](const MultiIndex& site, double* out) {
        Point x = to_point(site);
        for (int k = 0; k < domain.dim(); ++k) x[k] *= spacing;
        v(x, out);
      });
}

LatticeFunction sample_to_lattice(const std::function<double(const Point&)>& v,
                                  const LatticeDomain& domain, double spacing) {
  return sample_to_lattice(
      [&](const Point& x, double* out) { out[0] = v(x); }, 1, domain, spacing);
}

}  // namespace gridfun
