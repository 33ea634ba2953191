#include "gridfun/convop.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "gridfun/quadrature.hpp"

namespace gridfun {

namespace {

/// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

/// In-place complex DFT over the domain grid, one component at a time.
void dft(const LatticeDomain& domain, std::vector<std::complex<double>>& data,
         int sign) {
  int n[kMaxDim];
  for (int k = 0; k < domain.dim(); ++k) n[k] = domain.extent(k);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft(domain.dim(), n,
                         reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()), sign,
                         FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
}

/// The smoothed basis sampled at an integer offset, by quadrature that splits
/// along the mesh the basis itself lives on: unit cells (and their simplices
/// for partition bases) are exact pieces because integer shifts map the kink
/// arrangement onto itself.
double stencil_entry(const NodalBasis& basis, const CellQuadrature& cellq,
                     const MultiIndex& delta) {
  const int d = basis.dim();
  const double r = basis.support_radius();
  IndexBox cells{};
  for (int k = 0; k < d; ++k) {
    const double lo = std::max(-r, delta[k] - r);
    const double hi = std::min(r, delta[k] + r);
    if (lo >= hi) return 0.0;
    cells.lo[k] = static_cast<int>(std::floor(lo));
    cells.hi[k] = static_cast<int>(std::ceil(hi)) - 1;
  }
  double acc = 0.0;
  for_each_index(cells, d, [&](const MultiIndex& cell) {
    for (std::size_t j = 0; j < cellq.nodes().size(); ++j) {
      Point y{}, shifted{};
      for (int k = 0; k < d; ++k) {
        y[k] = cell[k] + cellq.nodes()[j][k];
        shifted[k] = delta[k] - y[k];
      }
      acc += cellq.weights()[j] * basis.value(y) * basis.value(shifted);
    }
  });
  return acc;
}

}  // namespace

ConvolutionOperator::ConvolutionOperator(NodalBasisPtr basis,
                                         const LatticeDomain& domain)
    : basis_(std::move(basis)), domain_(domain) {
  if (!basis_) throw InvalidParameterError("ConvolutionOperator: null basis");
  if (basis_->dim() != domain.dim())
    throw InvalidParameterError("ConvolutionOperator: dimension mismatch");
  domain.require_supports(basis_->support_radius());

  const int d = basis_->dim();
  const double r = basis_->support_radius();
  radius_ = static_cast<int>(std::ceil(2.0 * r)) - 1;

  // Stencil values. 1D goes through the (exact) quadrature backend so that
  // non-integer breakpoints are honored; higher dimensions use the cell or
  // simplex rule aligned with the basis mesh.
  std::map<MultiIndex, double> values;
  IndexBox box{};
  for (int k = 0; k < d; ++k) {
    box.lo[k] = -radius_;
    box.hi[k] = radius_;
  }
  if (d == 1) {
    const SmoothedBasis sq = smoothed_quadrature(basis_);
    for_each_index(box, d, [&](const MultiIndex& delta) {
      values[delta] = sq.value(to_point(delta));
    });
  } else {
    const SimplicialPartition* partition = basis_->partition();
    const CellQuadrature cellq = partition
                                     ? CellQuadrature::simplicial(*partition, 4)
                                     : CellQuadrature::tensor(d, 4);
    for_each_index(box, d, [&](const MultiIndex& delta) {
      values[delta] = stencil_entry(*basis_, cellq, delta);
    });
  }

  // Symmetrize (the stencil is a Gram of shifted copies), then validate.
  double sum = 0.0;
  for (auto& [delta, v] : values) {
    MultiIndex neg{};
    for (int k = 0; k < d; ++k) neg[k] = -delta[k];
    const double other = values.at(neg);
    if (std::abs(v - other) > 1e-12)
      throw ConstructionError("ConvolutionOperator: asymmetric stencil");
    v = 0.5 * (v + other);
    if (v < -1e-12)
      throw ConstructionError("ConvolutionOperator: negative stencil entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConstructionError("ConvolutionOperator: stencil sums to " +
                            std::to_string(sum) + ", expected 1");
  stencil_.assign(values.begin(), values.end());

  // Real multiplier on the full frequency grid, by direct cosine sums.
  multiplier_.resize(static_cast<std::size_t>(domain.sites()));
  min_multiplier_ = std::numeric_limits<double>::infinity();
  for (std::int64_t s = 0; s < domain.sites(); ++s) {
    const MultiIndex freq = domain.site(s);
    double m = 0.0;
    for (const auto& [delta, v] : stencil_) {
      double phase = 0.0;
      for (int k = 0; k < d; ++k)
        phase += static_cast<double>(freq[k]) * delta[k] / domain.extent(k);
      m += v * std::cos(2.0 * M_PI * phase);
    }
    multiplier_[s] = m;
    min_multiplier_ = std::min(min_multiplier_, m);
  }
}

double ConvolutionOperator::stencil(const MultiIndex& offset) const {
  for (int k = 0; k < domain_.dim(); ++k)
    if (std::abs(offset[k]) > radius_) return 0.0;
  const auto it = std::lower_bound(
      stencil_.begin(), stencil_.end(), offset,
      [](const auto& entry, const MultiIndex& key) { return entry.first < key; });
  return (it != stencil_.end() && it->first == offset) ? it->second : 0.0;
}

LatticeFunction ConvolutionOperator::apply(const LatticeFunction& u) const {
  if (u.domain() != domain_)
    throw InvalidParameterError("ConvolutionOperator: domain mismatch");
  return LatticeFunction::build(
      domain_, u.components(), [&](const MultiIndex& site, double* out) {
        for (int c = 0; c < u.components(); ++c) out[c] = 0.0;
        for (const auto& [delta, v] : stencil_) {
          MultiIndex other = site;
          for (int k = 0; k < domain_.dim(); ++k) other[k] -= delta[k];
          for (int c = 0; c < u.components(); ++c)
            out[c] += v * u.value(other, c);
        }
      });
}

LatticeFunction ConvolutionOperator::solve(const LatticeFunction& f) const {
  if (f.domain() != domain_)
    throw InvalidParameterError("ConvolutionOperator: domain mismatch");
  if (min_multiplier_ <= kInvertibilityTol)
    throw NonInvertibleOperatorError(
        "ConvolutionOperator: multiplier minimum " +
        std::to_string(min_multiplier_) +
        " at or below the invertibility threshold");
  const std::int64_t n = domain_.sites();
  LatticeFunction out(domain_, f.components());
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
  for (int c = 0; c < f.components(); ++c) {
    for (std::int64_t s = 0; s < n; ++s)
      buf[s] = f.raw()[static_cast<std::size_t>(s) * f.components() + c];
    dft(domain_, buf, FFTW_FORWARD);
    for (std::int64_t s = 0; s < n; ++s) buf[s] /= multiplier_[s];
    dft(domain_, buf, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::int64_t s = 0; s < n; ++s)
      out.raw()[static_cast<std::size_t>(s) * f.components() + c] =
          buf[s].real() * scale;
  }
  return out;
}

ConvolutionOperator build_operator(const NodalBasisPtr& basis,
                                   const LatticeDomain& domain) {
  return ConvolutionOperator(basis, domain);
}

// ---------------------------------------------------------------------------
// InverseKernel
// ---------------------------------------------------------------------------

LatticeDomain default_kernel_probe(const ConvolutionOperator& op) {
  const int d = op.domain().dim();
  const int by_dim[kMaxDim] = {4096, 512, 96};
  int extent = std::max(by_dim[d - 1], 8 * std::max(1, op.stencil_radius()));
  MultiIndex e{1, 1, 1};
  for (int k = 0; k < d; ++k) e[k] = extent;
  return LatticeDomain(d, e);
}

InverseKernel::InverseKernel(const ConvolutionOperator& op, int radius,
                             const LatticeDomain& probe)
    : radius_(radius) {
  if (radius < 0) throw InvalidParameterError("InverseKernel: radius >= 0");
  for (int k = 0; k < probe.dim(); ++k)
    if (probe.extent(k) < 2 * radius + 2)
      throw InvalidParameterError("InverseKernel: probe box too small");
  const ConvolutionOperator probe_op(op.basis(), probe);
  LatticeFunction delta(probe, 1);
  delta.set(MultiIndex{}, 1.0);
  const LatticeFunction g = probe_op.solve(delta);

  const int d = probe.dim();
  for (std::int64_t s = 0; s < probe.sites(); ++s) {
    MultiIndex site = probe.site(s);
    // centered representative
    MultiIndex offset = site;
    bool inside = true;
    for (int k = 0; k < d; ++k) {
      if (offset[k] > probe.extent(k) / 2) offset[k] -= probe.extent(k);
      inside = inside && std::abs(offset[k]) <= radius;
    }
    const double v = g.value(site, 0);
    if (inside) {
      entries_.emplace_back(offset, v);
      l1_ += std::abs(v);
      sum_ += v;
    } else {
      tail_ += std::abs(v);
    }
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

double InverseKernel::value(const MultiIndex& offset) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), offset,
      [](const auto& entry, const MultiIndex& key) { return entry.first < key; });
  return (it != entries_.end() && it->first == offset) ? it->second : 0.0;
}

InverseKernel inverse_kernel(const ConvolutionOperator& op, int radius) {
  return InverseKernel(op, radius, default_kernel_probe(op));
}

InverseKernel inverse_kernel(const ConvolutionOperator& op, int radius,
                             const LatticeDomain& probe) {
  return InverseKernel(op, radius, probe);
}

LatticeFunction apply_kernel(const InverseKernel& kernel,
                             const LatticeFunction& f) {
  const LatticeDomain& domain = f.domain();
  for (int k = 0; k < domain.dim(); ++k)
    if (domain.extent(k) < 2 * kernel.radius() + 1)
      throw InvalidParameterError("apply_kernel: kernel wraps onto itself");
  return LatticeFunction::build(
      domain, f.components(), [&](const MultiIndex& site, double* out) {
        for (int c = 0; c < f.components(); ++c) out[c] = 0.0;
        for (const auto& [offset, v] : kernel.entries()) {
          MultiIndex other = site;
          for (int k = 0; k < domain.dim(); ++k) other[k] -= offset[k];
          for (int c = 0; c < f.components(); ++c)
            out[c] += v * f.value(other, c);
        }
      });
}

// ---------------------------------------------------------------------------
// Smooth nodal interpolant
// ---------------------------------------------------------------------------

InterpolantField smooth_nodal_interpolant(const SmoothedBasis& basis,
                                          const ConvolutionOperator& op,
                                          const LatticeFunction& u) {
  if (op.basis().get() != &basis.parent())
    throw InvalidParameterError(
        "smooth_nodal_interpolant: operator and basis disagree");
  return convolution_interpolant(op.solve(u), basis);
}

InterpolantField smooth_nodal_interpolant(const SmoothedBasis& basis,
                                          const LatticeFunction& u) {
  const ConvolutionOperator op(basis.parent_ptr(), u.domain());
  return convolution_interpolant(op.solve(u), basis);
}

}  // namespace gridfun
