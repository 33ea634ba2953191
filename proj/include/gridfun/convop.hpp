#pragma once

#include <map>
#include <vector>

#include "gridfun/basis.hpp"
#include "gridfun/interp.hpp"
#include "gridfun/lattice.hpp"

namespace gridfun {

/// Multiplier minima below this threshold are treated as genuine zero modes.
inline constexpr double kInvertibilityTol = 1e-10;

/// The lattice operator mapping nodal values u to the lattice samples of the
/// convolution quasi-interpolant of u. Its stencil is the smoothed basis
/// sampled at integer offsets; on a periodic box it diagonalizes in the DFT
/// basis with the real multiplier stored on the full frequency grid.
class ConvolutionOperator {
 public:
  ConvolutionOperator(NodalBasisPtr basis, const LatticeDomain& domain);

  const LatticeDomain& domain() const { return domain_; }
  const NodalBasisPtr& basis() const { return basis_; }

  int stencil_radius() const { return radius_; }
  double stencil(const MultiIndex& offset) const;
  const std::vector<std::pair<MultiIndex, double>>& stencil() const {
    return stencil_;
  }

  /// Real DFT symbol on the full frequency grid (row-major, like sites).
  const std::vector<double>& multiplier() const { return multiplier_; }
  double min_multiplier() const { return min_multiplier_; }

  /// Periodic stencil convolution, component-wise.
  LatticeFunction apply(const LatticeFunction& u) const;

  /// Exact inverse on the periodic box via the DFT diagonalization. Throws
  /// NonInvertibleOperatorError when the multiplier has a (near-)zero mode.
  LatticeFunction solve(const LatticeFunction& f) const;

 private:
  NodalBasisPtr basis_;
  LatticeDomain domain_;
  int radius_;
  std::vector<std::pair<MultiIndex, double>> stencil_;
  std::vector<double> multiplier_;
  double min_multiplier_;
};

ConvolutionOperator build_operator(const NodalBasisPtr& basis,
                                   const LatticeDomain& domain);

/// Truncation of the summable inverse kernel: solve applied to a unit impulse
/// on a large probe box, restricted to |offset|_inf <= radius.
class InverseKernel {
 public:
  InverseKernel(const ConvolutionOperator& op, int radius,
                const LatticeDomain& probe);

  int radius() const { return radius_; }
  double value(const MultiIndex& offset) const;
  const std::vector<std::pair<MultiIndex, double>>& entries() const {
    return entries_;
  }

  /// l1 mass of the probe-box kernel outside the truncation radius.
  double tail_bound() const { return tail_; }
  /// l1 norm of the truncated kernel.
  double l1_norm() const { return l1_; }
  /// Sum of the truncated kernel entries (tends to 1 as the radius grows).
  double sum() const { return sum_; }

 private:
  int radius_;
  std::vector<std::pair<MultiIndex, double>> entries_;
  double tail_ = 0.0;
  double l1_ = 0.0;
  double sum_ = 0.0;
};

/// Default probe box per dimension (large enough that the kernel tail is
/// negligible at double precision for the shipped bases).
LatticeDomain default_kernel_probe(const ConvolutionOperator& op);

InverseKernel inverse_kernel(const ConvolutionOperator& op, int radius);
InverseKernel inverse_kernel(const ConvolutionOperator& op, int radius,
                             const LatticeDomain& probe);

/// Second inversion backend: periodic convolution with the truncated kernel.
/// Approximate, with error controlled by the kernel tail; the DFT solve stays
/// the primary path.
LatticeFunction apply_kernel(const InverseKernel& kernel,
                             const LatticeFunction& f);

/// The interpolating spline in the smoothed-basis space: prefilters u by the
/// inverse of the convolution operator, so the resulting field matches u on
/// lattice sites.
InterpolantField smooth_nodal_interpolant(const SmoothedBasis& basis,
                                          const LatticeFunction& u);
InterpolantField smooth_nodal_interpolant(const SmoothedBasis& basis,
                                          const ConvolutionOperator& op,
                                          const LatticeFunction& u);

}  // namespace gridfun
