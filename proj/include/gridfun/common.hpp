#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridfun {

/// Highest space dimension supported by the library.
inline constexpr int kMaxDim = 3;

/// A lattice site or integer offset. Entries beyond the active dimension are zero.
using MultiIndex = std::array<int, kMaxDim>;

/// A point in R^d. Entries beyond the active dimension are zero.
using Point = std::array<double, kMaxDim>;

inline Point to_point(const MultiIndex& i) {
  return {static_cast<double>(i[0]), static_cast<double>(i[1]),
          static_cast<double>(i[2])};
}

inline double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += a[k] * b[k];
  return s;
}

inline double max_abs(const Point& a, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s = std::max(s, std::abs(a[k]));
  return s;
}

/// Axis-aligned box with real bounds, [lo, hi] per axis.
struct RealBox {
  Point lo{};
  Point hi{};
};

/// Inclusive integer box.
struct IndexBox {
  MultiIndex lo{};
  MultiIndex hi{};
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class InvalidParameterError : public std::invalid_argument {
 public:
  explicit InvalidParameterError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Requested derivative order exceeds what the evaluator provides.
class UnsupportedOrderError : public std::invalid_argument {
 public:
  explicit UnsupportedOrderError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// The lattice convolution operator has a (near-)zero Fourier mode.
class NonInvertibleOperatorError : public std::runtime_error {
 public:
  explicit NonInvertibleOperatorError(const std::string& what)
      : std::runtime_error(what) {}
};

class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what)
      : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Small dense matrix (up to 3x3), used for affine data and deformations.
// ---------------------------------------------------------------------------

struct SmallMatrix {
  int dim = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  static SmallMatrix zero(int dim) { return SmallMatrix{dim, {}}; }

  static SmallMatrix identity(int dim) {
    SmallMatrix m{dim, {}};
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[i * kMaxDim + j]; }
  double operator()(int i, int j) const { return a[i * kMaxDim + j]; }

  Point apply(const Point& x) const {
    Point y{};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  double det() const {
    switch (dim) {
      case 1:
        return (*this)(0, 0);
      case 2:
        return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
      case 3: {
        const SmallMatrix& m = *this;
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
      }
      default:
        throw InvalidParameterError("SmallMatrix: unsupported dimension");
    }
  }
};

// ---------------------------------------------------------------------------
// Multivariate polynomials (low degree; used for reproduction machinery).
// ---------------------------------------------------------------------------

class Polynomial {
 public:
  struct Term {
    std::array<int, kMaxDim> powers{};
    double coeff = 0.0;
  };

  Polynomial() = default;
  explicit Polynomial(int dim) : dim_(dim) {}

  static Polynomial constant(int dim, double c) {
    Polynomial p(dim);
    p.add_term({}, c);
    return p;
  }

  static Polynomial monomial(int dim, const std::array<int, kMaxDim>& powers,
                             double coeff) {
    Polynomial p(dim);
    p.add_term(powers, coeff);
    return p;
  }

  /// a + b.x
  static Polynomial affine(int dim, double a, const Point& b) {
    Polynomial p(dim);
    p.add_term({}, a);
    for (int k = 0; k < dim; ++k) {
      std::array<int, kMaxDim> pw{};
      pw[k] = 1;
      p.add_term(pw, b[k]);
    }
    return p;
  }

  void add_term(const std::array<int, kMaxDim>& powers, double coeff) {
    for (int k = dim_; k < kMaxDim; ++k)
      if (powers[k] != 0)
        throw InvalidParameterError("Polynomial: power beyond dimension");
    terms_.push_back({powers, coeff});
  }

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }

  int total_degree() const {
    int deg = 0;
    for (const Term& t : terms_) {
      if (t.coeff == 0.0) continue;
      int d = 0;
      for (int k = 0; k < dim_; ++k) d += t.powers[k];
      deg = std::max(deg, d);
    }
    return deg;
  }

  double operator()(const Point& x) const {
    double s = 0.0;
    for (const Term& t : terms_) {
      double v = t.coeff;
      for (int k = 0; k < dim_; ++k)
        for (int e = 0; e < t.powers[k]; ++e) v *= x[k];
      s += v;
    }
    return s;
  }

  Polynomial derivative(int axis) const {
    Polynomial p(dim_);
    for (const Term& t : terms_) {
      if (t.powers[axis] == 0) continue;
      Term d = t;
      d.coeff *= t.powers[axis];
      d.powers[axis] -= 1;
      p.terms_.push_back(d);
    }
    return p;
  }

  Polynomial operator-(const Polynomial& other) const {
    Polynomial p(dim_);
    p.terms_ = terms_;
    for (Term t : other.terms_) {
      t.coeff = -t.coeff;
      p.terms_.push_back(t);
    }
    return p;
  }

 private:
  int dim_ = 1;
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Iteration over integer boxes.
// ---------------------------------------------------------------------------

/// Visits every multi-index in [lo, hi] (inclusive), last axis fastest.
template <typename F>
void for_each_index(const IndexBox& box, int dim, F&& f) {
  MultiIndex i = box.lo;
  while (true) {
    f(i);
    int axis = dim - 1;
    while (axis >= 0) {
      if (++i[axis] <= box.hi[axis]) break;
      i[axis] = box.lo[axis];
      --axis;
    }
    if (axis < 0) return;
  }
}

inline std::string format_index(const MultiIndex& i, int dim) {
  std::string s = "(";
  for (int k = 0; k < dim; ++k) {
    if (k) s += ",";
    s += std::to_string(i[k]);
  }
  return s + ")";
}

}  // namespace gridfun
