#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "gridfun/basis.hpp"
#include "gridfun/lattice.hpp"

namespace gridfun {

enum class FieldKind { Nodal, Smoothed };

/// A continuous field built from lattice coefficients and shifted copies of a
/// basis: the first-order interpolant (nodal basis) or the convolution
/// quasi-interpolant / smooth nodal interpolant (smoothed basis). Periodic in
/// the coefficient domain.
class InterpolantField {
 public:
  static InterpolantField nodal(LatticeFunction coefficients,
                                NodalBasisPtr basis);
  static InterpolantField smoothed(LatticeFunction coefficients,
                                   SmoothedBasis basis);

  FieldKind kind() const;
  const LatticeFunction& coefficients() const { return coefficients_; }
  const LatticeDomain& domain() const { return coefficients_.domain(); }
  int components() const { return coefficients_.components(); }
  int dim() const { return domain().dim(); }
  double basis_radius() const;

  /// Highest derivative order this field supports (nodal: 1; smoothed:
  /// backend-dependent).
  int max_order() const;

  const NodalBasisPtr& nodal_basis() const;
  const SmoothedBasis& smoothed_basis() const;

  /// Writes the order-tensor m x d^order (component-major) at x. Throws
  /// UnsupportedOrderError above max_order().
  void evaluate(const Point& x, int order, double* out) const;
  std::vector<double> evaluate(const Point& x, int order) const;

  /// Value of component 0 (convenience for scalar fields).
  double scalar(const Point& x) const;

  /// Derivative tensor d^order of the basis function at offset x (one
  /// component). Exposed for norm assembly.
  void basis_derivatives(const Point& x, int order, double* out) const;

 private:
  InterpolantField(LatticeFunction coefficients,
                   std::variant<NodalBasisPtr, SmoothedBasis> basis);

  LatticeFunction coefficients_;
  std::variant<NodalBasisPtr, SmoothedBasis> basis_;
};

/// First-order interpolant of the lattice function.
InterpolantField nodal_interpolant(LatticeFunction u, NodalBasisPtr basis);

/// Convolution quasi-interpolant: expansion of u in the smoothed basis.
InterpolantField convolution_interpolant(LatticeFunction u,
                                         SmoothedBasis basis);

// ---------------------------------------------------------------------------
// Quadrature on the unit cells
// ---------------------------------------------------------------------------

/// Nodes and weights on the unit cell [0,1]^d. Weights are positive and sum
/// to one; polynomial exactness up to degree() is validated on construction.
class CellQuadrature {
 public:
  static CellQuadrature tensor(int dim, int points_per_axis);
  static CellQuadrature simplicial(const SimplicialPartition& partition,
                                   int points_per_axis);

  /// Rule adapted to the field's basis: simplicial for a partition basis,
  /// tensor otherwise. Elevated order for general p.
  static CellQuadrature for_field(const InterpolantField& field, double p);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  CellQuadrature(int dim, int degree, std::vector<Point> nodes,
                 std::vector<double> weights);
  void validate() const;

  int dim_;
  int degree_;
  std::vector<Point> nodes_;
  std::vector<double> weights_;
};

struct NormReport {
  double p = 2.0;
  int derivative_order = 0;
  double value = 0.0;
  int quad_degree = 0;
  std::int64_t cells = 0;
};

/// L^p norm of the order-k derivative tensor (Frobenius norm pointwise) over
/// the periodic box, by per-cell quadrature; p = inf is a dense sample over
/// quadrature nodes plus cell corners.
NormReport lp_norm_field(const InterpolantField& field, double p, int order,
                         const CellQuadrature& quadrature);
NormReport lp_norm_field(const InterpolantField& field, double p, int order);

/// Per-cell L^p norms, cells indexed like domain sites.
std::vector<double> cell_norms(const InterpolantField& field, double p,
                               int order, const CellQuadrature& quadrature);

/// W^{1,p} norm of the first-order interpolant of u.
NormReport sobolev_norm(const LatticeFunction& u, const NodalBasisPtr& basis,
                        double p);

// ---------------------------------------------------------------------------
// Sampling continuous data
// ---------------------------------------------------------------------------

/// u(site) = v(spacing * site), canonical representative in [0, N)^d.
LatticeFunction sample_to_lattice(
    const std::function<void(const Point&, double*)>& v, int components,
    const LatticeDomain& domain, double spacing);

LatticeFunction sample_to_lattice(const std::function<double(const Point&)>& v,
                                  const LatticeDomain& domain, double spacing);

}  // namespace gridfun
