#pragma once

#include <functional>
#include <vector>

#include "gridfun/basis.hpp"
#include "gridfun/interp.hpp"
#include "gridfun/lattice.hpp"

namespace gridfun {

/// Bi-orthogonal dual of the smoothed basis: a combination of smoothed-basis
/// shifts, hard-truncated to the support box of the center function, whose
/// inner products with all overlapping shifts form a Kronecker delta.
class DualBasis {
 public:
  explicit DualBasis(SmoothedBasis parent);

  const SmoothedBasis& parent() const { return parent_; }
  int dim() const { return parent_.dim(); }

  /// Shifts whose support overlaps the center support box.
  const std::vector<MultiIndex>& index_set() const { return index_set_; }
  double coefficient(const MultiIndex& shift) const;
  const std::vector<double>& coefficients() const { return coeffs_; }

  /// Condition estimate of the restricted Gram matrix that was solved.
  double gram_condition() const { return gram_condition_; }

  /// Value at x; exactly zero outside the center support box.
  double value(const Point& x) const;

  RealBox support() const;

 private:
  SmoothedBasis parent_;
  std::vector<MultiIndex> index_set_;
  std::vector<double> coeffs_;
  double gram_condition_ = 0.0;
};

DualBasis build_dual(const SmoothedBasis& basis);

/// Clement-type quasi-interpolant: coefficients are local moments of the
/// input against the dual basis, the field is their smoothed-basis expansion.
class QuasiInterpolant {
 public:
  explicit QuasiInterpolant(DualBasis dual, int gauss_points = 6);

  const DualBasis& dual() const { return dual_; }
  int quadrature_points() const { return gauss_points_; }

  /// Moment coefficient at one site for free-space data (no wrapping).
  double coefficient(const std::function<double(const Point&)>& v,
                     const MultiIndex& site) const;

  /// Pointwise free-space evaluation (coefficients computed on the fly).
  double evaluate(const std::function<double(const Point&)>& v,
                  const Point& x) const;

  /// Periodic interpolant of v sampled with the given spacing: coefficients
  /// on every domain site, then the smoothed-basis expansion.
  InterpolantField interpolate(const std::function<double(const Point&)>& v,
                               const LatticeDomain& domain,
                               double spacing = 1.0) const;

 private:
  DualBasis dual_;
  int gauss_points_;
};

/// Lattice data whose smoothed-basis expansion reproduces the polynomial (of
/// total degree <= 3) on windows away from the periodic seam. The returned
/// residual bound comes from the self-check of the affine correction.
LatticeFunction cubic_preimage(const Polynomial& p, const SmoothedBasis& basis,
                               const LatticeDomain& domain);

/// Max deviation from the best affine fit of
///   F(x) = sum_xi p(xi) (smoothed2 - smoothed1)(x - xi)
/// over a grid on the window. For two bases that both reproduce affine data,
/// F is affine whenever p has degree <= 3, so the deviation measures only
/// evaluation error.
double two_basis_difference_check(const NodalBasisPtr& basis1,
                                  const NodalBasisPtr& basis2,
                                  const Polynomial& p, const RealBox& window,
                                  double grid_step = 0.25);

}  // namespace gridfun
