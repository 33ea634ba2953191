#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gridfun/common.hpp"

namespace gridfun {

enum class BasisFlavor { Q1, P1, ExtendedHat1D, Custom };

/// A hyperplane normal.y = offset carrying a gradient discontinuity.
struct Hyperplane {
  Point normal{};
  double offset = 0.0;
};

/// Simplices tiling the unit cell [0,1]^d; the full mesh is the set of all
/// integer translates. Construction validates non-degeneracy; validate()
/// additionally checks the tiling volume, point symmetry, and conformity.
class SimplicialPartition {
 public:
  struct Simplex {
    std::array<Point, kMaxDim + 1> vertex{};
  };

  struct Location {
    int simplex = -1;
    std::array<double, kMaxDim + 1> barycentric{};
  };

  SimplicialPartition(int dim, std::vector<Simplex> simplices);

  static SimplicialPartition interval();    // d = 1
  static SimplicialPartition crisscross();  // d = 2, four triangles per square
  static SimplicialPartition kuhn3d();      // d = 3, six tetrahedra per cube
  static SimplicialPartition standard(int dim);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(simplices_.size()); }
  const std::vector<Simplex>& simplices() const { return simplices_; }

  /// Simplex and barycentric coordinates for t in [0,1]^d. Points on shared
  /// faces resolve to the first matching simplex in list order.
  Location locate(const Point& t) const;

  /// Gradient of the barycentric coordinate of `vertex` on `simplex`.
  const Point& barycentric_gradient(int simplex, int vertex) const;

  double volume(int simplex) const { return volumes_[simplex]; }
  double total_volume() const;

  /// Multiset equality of the partition with its point reflection, modulo
  /// integer translations.
  bool symmetric() const;

  /// Throws ConstructionError if the simplices do not tile the cell (volume
  /// defect, sampled coverage/conformity failure) or symmetry fails.
  void validate() const;

  /// Facet hyperplanes of all simplices in all cells meeting [-span, span]^d,
  /// deduplicated; axis-aligned planes included.
  std::vector<Hyperplane> kink_planes(double span) const;

 private:
  int dim_;
  std::vector<Simplex> simplices_;
  std::vector<double> volumes_;
  // Per simplex: gradients of the d+1 barycentric coordinates.
  std::vector<std::array<Point, kMaxDim + 1>> gradients_;
};

/// The generating function of the first-order interpolant: compactly
/// supported, Lipschitz, reproducing affine data by its lattice shifts, and
/// (except for the extended-hat counterexample) equal to the Kronecker delta
/// on lattice points.
class NodalBasis {
 public:
  virtual ~NodalBasis() = default;

  int dim() const { return dim_; }
  BasisFlavor flavor() const { return flavor_; }
  double support_radius() const { return support_radius_; }

  /// Whether the basis is expected to vanish on nonzero lattice points.
  bool interpolatory() const { return interpolatory_; }

  /// Declared bound on |grad|; difference quotients never exceed it.
  double lipschitz_bound() const { return lipschitz_bound_; }

  virtual double value(const Point& x) const = 0;

  /// Defined a.e.; on a gradient discontinuity returns the limit from the
  /// lexicographically smaller cell.
  virtual Point gradient(const Point& x) const = 0;

  /// Hyperplanes carrying gradient jumps, restricted to the support box.
  virtual std::vector<Hyperplane> kink_planes() const = 0;

  virtual const SimplicialPartition* partition() const { return nullptr; }

 protected:
  NodalBasis(int dim, BasisFlavor flavor, double support_radius,
             bool interpolatory, double lipschitz_bound)
      : dim_(dim),
        flavor_(flavor),
        support_radius_(support_radius),
        interpolatory_(interpolatory),
        lipschitz_bound_(lipschitz_bound) {}

 private:
  int dim_;
  BasisFlavor flavor_;
  double support_radius_;
  bool interpolatory_;
  double lipschitz_bound_;
};

using NodalBasisPtr = std::shared_ptr<const NodalBasis>;

/// Tensor-product hat: value(x) = prod_k max(0, 1 - |x_k|).
NodalBasisPtr make_q1(int dim);

/// Piecewise-linear nodal function on the given cell partition. Lattice
/// vertices carry Kronecker data; non-lattice vertices (e.g. cell centers)
/// carry the multilinear interpolation of the surrounding corner data, which
/// keeps affine reproduction exact.
NodalBasisPtr make_p1(int dim, SimplicialPartition partition);
NodalBasisPtr make_p1(int dim);  // shipped standard partition

/// The 1D function equal to 1/3 on [-1,1] with linear tails on [1,2] and
/// [-2,-1]: Lipschitz, local, affine-reproducing, but not interpolatory.
NodalBasisPtr make_extended_hat();

/// 1D basis from explicit breakpoints and per-interval polynomials in x.
NodalBasisPtr make_piecewise_1d(const std::vector<double>& breakpoints,
                                const std::vector<std::vector<double>>& pieces);

/// Loads a declarative basis description (JSON; see README for the schema).
NodalBasisPtr load_basis(const std::string& path);
NodalBasisPtr parse_basis(const std::string& json_text);

// ---------------------------------------------------------------------------
// Assumption audit
// ---------------------------------------------------------------------------

struct AssumptionCheck {
  bool pass = false;
  double residual = 0.0;
  std::string detail;
};

struct AssumptionReport {
  AssumptionCheck lipschitz;            // bounded difference quotients
  AssumptionCheck locality;             // exact zero outside the support box
  AssumptionCheck affine_reproduction;  // shifts reproduce a + b.x
  AssumptionCheck interpolation;        // Kronecker delta on lattice points

  bool core_pass() const {
    return lipschitz.pass && locality.pass && affine_reproduction.pass;
  }
  bool all_pass() const { return core_pass() && interpolation.pass; }
};

AssumptionReport verify_assumptions(const NodalBasis& basis, int samples,
                                    double tol,
                                    std::uint64_t seed = 20240601u);

// ---------------------------------------------------------------------------
// Smoothed basis: the self-convolution of a nodal basis.
// ---------------------------------------------------------------------------

struct SmoothedOptions {
  int gauss_points = 6;  // per axis, per arrangement piece
  int refine3d = 6;      // extra uniform refinement for 3D non-tensor bases
};

/// Self-convolution of the parent basis, with derivatives. The Q1 parent gets
/// an analytic tensor-product cubic backend (orders 0..3); every other parent
/// gets a quadrature backend (orders 0..2) whose pointwise accuracy is exact
/// for 1D/2D piecewise-polynomial parents and declared otherwise.
class SmoothedBasis {
 public:
  enum class Backend { AnalyticTensorCubic, ConvolutionQuadrature };

  class Impl;

  int dim() const;
  double support_radius() const;
  Backend backend() const;
  double declared_tolerance() const;
  int max_derivative_order() const;
  const NodalBasis& parent() const;
  NodalBasisPtr parent_ptr() const;

  double value(const Point& x) const;
  Point gradient(const Point& x) const;

  /// Writes the full derivative tensor of the given order (d^order entries,
  /// row-major over axes; order 0 writes one entry). Throws
  /// UnsupportedOrderError above max_derivative_order().
  void derivatives(const Point& x, int order, double* out) const;

  std::vector<double> derivatives(const Point& x, int order) const;

  explicit SmoothedBasis(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<const Impl> impl_;
};

SmoothedBasis smoothed(const NodalBasisPtr& basis);
SmoothedBasis smoothed(const NodalBasisPtr& basis, const SmoothedOptions& opt);

/// Forces the quadrature backend (used to cross-validate the analytic one).
SmoothedBasis smoothed_quadrature(const NodalBasisPtr& basis,
                                  const SmoothedOptions& opt = {});

// ---------------------------------------------------------------------------
// Support boxes
// ---------------------------------------------------------------------------

RealBox support_box(const NodalBasis& basis, const MultiIndex& site);
RealBox support_box(const SmoothedBasis& basis, const MultiIndex& site);

}  // namespace gridfun
