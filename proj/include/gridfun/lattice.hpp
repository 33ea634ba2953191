#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "gridfun/common.hpp"

namespace gridfun {

/// Periodic box on the integer lattice: sites are Z^d modulo per-axis extents.
///
/// Site (i + N_k e_k) and site i address the same storage slot. The canonical
/// representative of a site has coordinates in [0, N_k).
class LatticeDomain {
 public:
  LatticeDomain(int dim, const MultiIndex& extent);

  int dim() const { return dim_; }
  int extent(int axis) const { return extent_[axis]; }
  const MultiIndex& extents() const { return extent_; }
  std::int64_t sites() const { return sites_; }

  /// Periodic wrap of one coordinate.
  int wrap(int coord, int axis) const {
    const int n = extent_[axis];
    int r = coord % n;
    return r < 0 ? r + n : r;
  }

  MultiIndex canonical(const MultiIndex& site) const {
    MultiIndex c{};
    for (int k = 0; k < dim_; ++k) c[k] = wrap(site[k], k);
    return c;
  }

  /// Row-major flattening (last axis fastest) of the wrapped site.
  std::int64_t flatten(const MultiIndex& site) const {
    std::int64_t f = 0;
    for (int k = 0; k < dim_; ++k) f = f * extent_[k] + wrap(site[k], k);
    return f;
  }

  MultiIndex site(std::int64_t flat) const {
    MultiIndex s{};
    for (int k = dim_ - 1; k >= 0; --k) {
      s[k] = static_cast<int>(flat % extent_[k]);
      flat /= extent_[k];
    }
    return s;
  }

  /// Throws unless every extent is at least 4 * radius, so a basis support
  /// placed anywhere in the box never overlaps its own periodic image twice.
  void require_supports(double radius) const;

  bool operator==(const LatticeDomain& other) const {
    return dim_ == other.dim_ && extent_ == other.extent_;
  }
  bool operator!=(const LatticeDomain& other) const {
    return !(*this == other);
  }

 private:
  int dim_;
  MultiIndex extent_{};
  std::int64_t sites_;
};

/// A function u : Z^d -> R^m stored densely on a periodic box.
///
/// Treated as immutable once filled; all operations below are pure and return
/// fresh values, so sharing a LatticeFunction across threads is safe.
class LatticeFunction {
 public:
  LatticeFunction(const LatticeDomain& domain, int components);

  /// Fills from a callback site -> value; validates that all values are finite.
  static LatticeFunction build(
      const LatticeDomain& domain, int components,
      const std::function<void(const MultiIndex&, double*)>& f);

  const LatticeDomain& domain() const { return domain_; }
  int components() const { return components_; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }

  double value(const MultiIndex& site, int comp = 0) const {
    return values_[domain_.flatten(site) * components_ + comp];
  }
  void set(const MultiIndex& site, int comp, double v) {
    values_[domain_.flatten(site) * components_ + comp] = v;
  }
  void set(const MultiIndex& site, double v) { set(site, 0, v); }

  const std::vector<double>& raw() const { return values_; }
  std::vector<double>& raw() { return values_; }

  /// Euclidean norm of the value vector at one site.
  double site_norm(const MultiIndex& site) const;

  bool is_finite() const;
  void require_finite() const;
  void require_same_domain(const LatticeFunction& other) const;

  LatticeFunction operator+(const LatticeFunction& other) const;
  LatticeFunction operator-(const LatticeFunction& other) const;
  LatticeFunction operator*(double scale) const;

 private:
  LatticeDomain domain_;
  int components_;
  std::vector<double> values_;
};

/// Marker for operations invariant under u -> u + t with t constant in R^m.
/// Operations carrying this tag are checked by property tests rather than by
/// choosing a gauge for the quotient space.
struct EquivalenceClassTag {};

/// Discrete deformation y(site) = A site + displacement(site), with A the
/// far-field gradient and the displacement a lattice function with m = d.
class DeformationField {
 public:
  DeformationField(const SmallMatrix& gradient, LatticeFunction displacement);

  /// Validates det A > 0 on top of the plain constructor.
  static DeformationField admissible(const SmallMatrix& gradient,
                                     LatticeFunction displacement);

  const SmallMatrix& far_field_gradient() const { return gradient_; }
  const LatticeFunction& displacement() const { return displacement_; }

  /// A xi + u(xi), with xi the canonical representative in [0, N).
  Point deformed(const MultiIndex& site) const;

 private:
  SmallMatrix gradient_;
  LatticeFunction displacement_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// (sum_sites |u(site)|^p)^(1/p); Euclidean norm per site; max for p = inf.
/// Throws InvalidParameterError for p < 1.
double lp_norm(const LatticeFunction& u, double p);

/// Periodic forward difference u(site + e_axis) - u(site).
LatticeFunction forward_difference(const LatticeFunction& u, int axis);

/// u(site) = A site + b with the canonical representative in [0, N)^d.
LatticeFunction affine_sample(const LatticeDomain& domain,
                              const SmallMatrix& a, const Point& b);

// ---------------------------------------------------------------------------
// Serialization: text (CSV) and binary. Formats documented in the README.
// ---------------------------------------------------------------------------

void save_csv(const LatticeFunction& u, std::ostream& out);
LatticeFunction load_csv(std::istream& in);
void save_binary(const LatticeFunction& u, std::ostream& out);
LatticeFunction load_binary(std::istream& in);

void save_csv_file(const LatticeFunction& u, const std::string& path);
LatticeFunction load_csv_file(const std::string& path);

}  // namespace gridfun
