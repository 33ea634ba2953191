#include "gridfun/basis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

namespace gridfun {

namespace {

/// Index of the cell [c, c+1) containing x, except that integer x belongs to
/// the cell below. This realizes the lower-cell limit convention for
/// piecewise-defined gradients.
int lower_cell(double x) { return static_cast<int>(std::ceil(x)) - 1; }

double hat(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

double hat_deriv(double t) {
  const int c = lower_cell(t);
  if (c == -1) return 1.0;
  if (c == 0) return -1.0;
  return 0.0;
}

/// Multilinear interpolation of Kronecker corner data; coincides with the
/// Kronecker delta at integer points.
double corner_weight(const Point& w, int dim) {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= hat(w[k]);
  return v;
}

std::vector<Hyperplane> axis_planes(int dim, double radius) {
  std::vector<Hyperplane> planes;
  const int r = static_cast<int>(std::ceil(radius));
  for (int k = 0; k < dim; ++k) {
    for (int c = -r; c <= r; ++c) {
      Hyperplane h;
      h.normal[k] = 1.0;
      h.offset = c;
      planes.push_back(h);
    }
  }
  return planes;
}

}  // namespace

// ---------------------------------------------------------------------------
// SimplicialPartition
// ---------------------------------------------------------------------------

namespace {

SmallMatrix edge_matrix(const SimplicialPartition::Simplex& s, int dim) {
  SmallMatrix m = SmallMatrix::zero(dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i)
      m(i, j) = s.vertex[j + 1][i] - s.vertex[0][i];
  return m;
}

SmallMatrix invert(const SmallMatrix& m) {
  SmallMatrix inv = SmallMatrix::zero(m.dim);
  const double d = m.det();
  switch (m.dim) {
    case 1:
      inv(0, 0) = 1.0 / d;
      break;
    case 2:
      inv(0, 0) = m(1, 1) / d;
      inv(0, 1) = -m(0, 1) / d;
      inv(1, 0) = -m(1, 0) / d;
      inv(1, 1) = m(0, 0) / d;
      break;
    case 3:
      inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / d;
      inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / d;
      inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
      inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / d;
      inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / d;
      inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / d;
      inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / d;
      inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / d;
      inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / d;
      break;
    default:
      throw InvalidParameterError("invert: unsupported dimension");
  }
  return inv;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

SimplicialPartition::SimplicialPartition(int dim, std::vector<Simplex> simplices)
    : dim_(dim), simplices_(std::move(simplices)) {
  if (dim < 1 || dim > kMaxDim)
    throw InvalidParameterError("SimplicialPartition: dim must be in {1,2,3}");
  if (simplices_.empty())
    throw ConstructionError("SimplicialPartition: no simplices");
  for (const Simplex& s : simplices_) {
    const SmallMatrix m = edge_matrix(s, dim);
    const double d = m.det();
    if (std::abs(d) < 1e-12)
      throw ConstructionError("SimplicialPartition: degenerate simplex");
    volumes_.push_back(std::abs(d) / factorial(dim));
    const SmallMatrix inv = invert(m);
    std::array<Point, kMaxDim + 1> grads{};
    for (int j = 1; j <= dim; ++j)
      for (int i = 0; i < dim; ++i) grads[j][i] = inv(j - 1, i);
    for (int j = 1; j <= dim; ++j)
      for (int i = 0; i < dim; ++i) grads[0][i] -= grads[j][i];
    gradients_.push_back(grads);
  }
}

SimplicialPartition SimplicialPartition::interval() {
  Simplex s;
  s.vertex[0] = {0.0, 0.0, 0.0};
  s.vertex[1] = {1.0, 0.0, 0.0};
  return SimplicialPartition(1, {s});
}

SimplicialPartition SimplicialPartition::crisscross() {
  const Point c{0.5, 0.5, 0.0};
  const Point v00{0.0, 0.0, 0.0}, v10{1.0, 0.0, 0.0};
  const Point v11{1.0, 1.0, 0.0}, v01{0.0, 1.0, 0.0};
  std::vector<Simplex> list(4);
  list[0].vertex = {v00, v10, c, Point{}};
  list[1].vertex = {v10, v11, c, Point{}};
  list[2].vertex = {v11, v01, c, Point{}};
  list[3].vertex = {v01, v00, c, Point{}};
  return SimplicialPartition(2, std::move(list));
}

SimplicialPartition SimplicialPartition::kuhn3d() {
  // One tetrahedron per ordering of the coordinates along the main diagonal.
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<Simplex> list;
  for (const auto& p : perms) {
    Simplex s;
    s.vertex[0] = {0.0, 0.0, 0.0};
    Point v{};
    v[p[0]] = 1.0;
    s.vertex[1] = v;
    v[p[1]] = 1.0;
    s.vertex[2] = v;
    s.vertex[3] = {1.0, 1.0, 1.0};
    list.push_back(s);
  }
  return SimplicialPartition(3, std::move(list));
}

SimplicialPartition SimplicialPartition::standard(int dim) {
  switch (dim) {
    case 1:
      return interval();
    case 2:
      return crisscross();
    case 3:
      return kuhn3d();
    default:
      throw InvalidParameterError("standard partition: dim must be in {1,2,3}");
  }
}

SimplicialPartition::Location SimplicialPartition::locate(const Point& t) const {
  for (double tol : {1e-12, 1e-9}) {
    for (int s = 0; s < size(); ++s) {
      Location loc;
      loc.simplex = s;
      double sum = 0.0;
      bool inside = true;
      for (int j = 1; j <= dim_; ++j) {
        double lam = 0.0;
        for (int i = 0; i < dim_; ++i)
          lam += gradients_[s][j][i] * (t[i] - simplices_[s].vertex[0][i]);
        loc.barycentric[j] = lam;
        sum += lam;
        if (lam < -tol) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      loc.barycentric[0] = 1.0 - sum;
      if (loc.barycentric[0] < -tol) continue;
      return loc;
    }
  }
  throw ConstructionError("SimplicialPartition: point not covered: " +
                          std::to_string(t[0]) + "," + std::to_string(t[1]) +
                          "," + std::to_string(t[2]));
}

const Point& SimplicialPartition::barycentric_gradient(int simplex,
                                                       int vertex) const {
  return gradients_[simplex][vertex];
}

double SimplicialPartition::total_volume() const {
  double v = 0.0;
  for (double s : volumes_) v += s;
  return v;
}

namespace {

/// Canonical form for simplex comparison: translate so the barycenter lies in
/// [0,1)^d, then sort vertices lexicographically.
std::vector<std::array<double, kMaxDim>> canonical_simplex(
    const SimplicialPartition::Simplex& s, int dim, double sign) {
  Point bary{};
  for (int j = 0; j <= dim; ++j)
    for (int i = 0; i < dim; ++i) bary[i] += sign * s.vertex[j][i] / (dim + 1);
  MultiIndex shift{};
  for (int i = 0; i < dim; ++i)
    shift[i] = static_cast<int>(std::floor(bary[i] + 1e-9));
  std::vector<std::array<double, kMaxDim>> verts;
  for (int j = 0; j <= dim; ++j) {
    std::array<double, kMaxDim> v{};
    for (int i = 0; i < dim; ++i) v[i] = sign * s.vertex[j][i] - shift[i];
    verts.push_back(v);
  }
  std::sort(verts.begin(), verts.end(),
            [](const auto& a, const auto& b) {
              for (int i = 0; i < kMaxDim; ++i) {
                if (std::abs(a[i] - b[i]) > 1e-9) return a[i] < b[i];
              }
              return false;
            });
  return verts;
}

bool same_vertices(const std::vector<std::array<double, kMaxDim>>& a,
                   const std::vector<std::array<double, kMaxDim>>& b) {
  for (std::size_t j = 0; j < a.size(); ++j)
    for (int i = 0; i < kMaxDim; ++i)
      if (std::abs(a[j][i] - b[j][i]) > 1e-9) return false;
  return true;
}

}  // namespace

bool SimplicialPartition::symmetric() const {
  std::vector<bool> used(simplices_.size(), false);
  for (const Simplex& s : simplices_) {
    const auto reflected = canonical_simplex(s, dim_, -1.0);
    bool found = false;
    for (std::size_t k = 0; k < simplices_.size(); ++k) {
      if (used[k]) continue;
      if (same_vertices(reflected, canonical_simplex(simplices_[k], dim_, 1.0))) {
        used[k] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

void SimplicialPartition::validate() const {
  if (std::abs(total_volume() - 1.0) > 1e-12)
    throw ConstructionError(
        "SimplicialPartition: simplex volumes sum to " +
        std::to_string(total_volume()) + ", expected 1");
  if (!symmetric())
    throw ConstructionError("SimplicialPartition: not symmetric about origin");

  // Sampled coverage and conformity: a random piecewise-linear interpolant of
  // fixed vertex data must be continuous across faces and periodic copies.
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto interp = [&](const Point& x) {
    Point t = x;
    MultiIndex cell{};
    for (int i = 0; i < dim_; ++i) {
      cell[i] = lower_cell(x[i]);
      t[i] = x[i] - cell[i];
    }
    const Location loc = locate(t);
    double v = 0.0;
    for (int j = 0; j <= dim_; ++j) {
      Point w{};
      for (int i = 0; i < dim_; ++i)
        w[i] = cell[i] + simplices_[loc.simplex].vertex[j][i];
      // deterministic pseudo-random nodal data, hash of the vertex position
      double h = 0.4;
      for (int i = 0; i < dim_; ++i)
        h = std::fmod(101.0 * h + 7.31 * w[i] + 1.7, 3.0);
      v += loc.barycentric[j] * h;
    }
    return v;
  };
  for (int trial = 0; trial < 400; ++trial) {
    Point x{};
    for (int i = 0; i < dim_; ++i) x[i] = 2.0 * unif(rng) - 0.5;
    // pin one coordinate near a potential face to probe continuity
    const int axis = trial % dim_;
    x[axis] = std::round(2.0 * x[axis]) / 2.0;
    Point xm = x, xp = x;
    xm[axis] -= 1e-7;
    xp[axis] += 1e-7;
    const double gap = std::abs(interp(xp) - interp(xm));
    if (gap > 1e-5)
      throw ConstructionError(
          "SimplicialPartition: interpolant jump across a face (defect " +
          std::to_string(gap) + ")");
  }
}

std::vector<Hyperplane> SimplicialPartition::kink_planes(double span) const {
  std::map<std::array<long long, kMaxDim + 1>, Hyperplane> unique;
  const int r = static_cast<int>(std::ceil(span));
  IndexBox cells{MultiIndex{-r - 1, -r - 1, -r - 1},
                 MultiIndex{r, r, r}};
  for (int k = dim_; k < kMaxDim; ++k) {
    cells.lo[k] = 0;
    cells.hi[k] = 0;
  }
  for_each_index(cells, dim_, [&](const MultiIndex& cell) {
    for (const Simplex& s : simplices_) {
      for (int omit = 0; omit <= dim_; ++omit) {
        // Facet hyperplane of the simplex with vertex `omit` dropped.
        Point n{};
        double c = 0.0;
        if (dim_ == 1) {
          n[0] = 1.0;
          c = s.vertex[1 - omit][0];
        } else if (dim_ == 2) {
          const Point& a = s.vertex[(omit + 1) % 3];
          const Point& b = s.vertex[(omit + 2) % 3];
          n[0] = b[1] - a[1];
          n[1] = -(b[0] - a[0]);
          c = n[0] * a[0] + n[1] * a[1];
        } else {
          int idx[3], m = 0;
          for (int j = 0; j <= 3; ++j)
            if (j != omit) idx[m++] = j;
          const Point& a = s.vertex[idx[0]];
          Point u{}, v{};
          for (int i = 0; i < 3; ++i) {
            u[i] = s.vertex[idx[1]][i] - a[i];
            v[i] = s.vertex[idx[2]][i] - a[i];
          }
          n[0] = u[1] * v[2] - u[2] * v[1];
          n[1] = u[2] * v[0] - u[0] * v[2];
          n[2] = u[0] * v[1] - u[1] * v[0];
          c = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
        }
        // translate into this cell
        for (int i = 0; i < dim_; ++i) c += n[i] * cell[i];
        // canonical scaling: unit normal, first significant component > 0
        double len = 0.0;
        for (int i = 0; i < dim_; ++i) len += n[i] * n[i];
        len = std::sqrt(len);
        for (int i = 0; i < dim_; ++i) n[i] /= len;
        c /= len;
        for (int i = 0; i < dim_; ++i) {
          if (std::abs(n[i]) > 1e-9) {
            if (n[i] < 0) {
              for (int j = 0; j < dim_; ++j) n[j] = -n[j];
              c = -c;
            }
            break;
          }
        }
        std::array<long long, kMaxDim + 1> key{};
        for (int i = 0; i < dim_; ++i)
          key[i] = static_cast<long long>(std::llround(n[i] * 1e9));
        key[kMaxDim] = static_cast<long long>(std::llround(c * 1e9));
        unique.emplace(key, Hyperplane{n, c});
      }
    }
  });
  std::vector<Hyperplane> planes;
  planes.reserve(unique.size());
  for (const auto& [key, plane] : unique) planes.push_back(plane);
  return planes;
}

// ---------------------------------------------------------------------------
// Q1
// ---------------------------------------------------------------------------

namespace {

class Q1Basis final : public NodalBasis {
 public:
  explicit Q1Basis(int dim)
      : NodalBasis(dim, BasisFlavor::Q1, 1.0, true, std::sqrt(double(dim))) {}

  double value(const Point& x) const override {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= hat(x[k]);
    return v;
  }

  Point gradient(const Point& x) const override {
    Point g{};
    for (int i = 0; i < dim(); ++i) {
      double v = hat_deriv(x[i]);
      for (int k = 0; k < dim(); ++k)
        if (k != i) v *= hat(x[k]);
      g[i] = v;
    }
    return g;
  }

  std::vector<Hyperplane> kink_planes() const override {
    return axis_planes(dim(), 1.0);
  }
};

// ---------------------------------------------------------------------------
// P1 on a simplicial partition
// ---------------------------------------------------------------------------

class P1Basis final : public NodalBasis {
 public:
  P1Basis(int dim, SimplicialPartition partition)
      : NodalBasis(dim, BasisFlavor::P1, 1.0, true,
                   max_gradient(partition, dim)),
        partition_(std::move(partition)),
        planes_(partition_.kink_planes(1.0)) {}

  double value(const Point& x) const override {
    if (max_abs(x, dim()) >= support_radius()) return 0.0;
    MultiIndex cell{};
    Point t{};
    split(x, cell, t);
    const auto loc = partition_.locate(t);
    double v = 0.0;
    for (int j = 0; j <= dim(); ++j)
      v += loc.barycentric[j] * vertex_value(cell, loc.simplex, j);
    return v;
  }

  Point gradient(const Point& x) const override {
    Point g{};
    if (max_abs(x, dim()) >= support_radius()) return g;
    MultiIndex cell{};
    Point t{};
    split(x, cell, t);
    const auto loc = partition_.locate(t);
    for (int j = 0; j <= dim(); ++j) {
      const double w = vertex_value(cell, loc.simplex, j);
      const Point& bg = partition_.barycentric_gradient(loc.simplex, j);
      for (int i = 0; i < dim(); ++i) g[i] += w * bg[i];
    }
    return g;
  }

  std::vector<Hyperplane> kink_planes() const override { return planes_; }

  const SimplicialPartition* partition() const override { return &partition_; }

 private:
  void split(const Point& x, MultiIndex& cell, Point& t) const {
    for (int i = 0; i < dim(); ++i) {
      cell[i] = lower_cell(x[i]);
      t[i] = x[i] - cell[i];
    }
  }

  double vertex_value(const MultiIndex& cell, int simplex, int j) const {
    Point w{};
    for (int i = 0; i < dim(); ++i)
      w[i] = cell[i] + partition_.simplices()[simplex].vertex[j][i];
    return corner_weight(w, dim());
  }

  static double max_gradient(const SimplicialPartition& partition, int dim) {
    // sup |grad| over all simplices of the basis function, from the exact
    // piecewise gradients in the cells adjacent to the origin
    double best = 0.0;
    IndexBox cells{MultiIndex{-1, -1, -1}, MultiIndex{0, 0, 0}};
    for (int k = dim; k < kMaxDim; ++k) cells.lo[k] = 0;
    for_each_index(cells, dim, [&](const MultiIndex& cell) {
      for (int s = 0; s < partition.size(); ++s) {
        Point g{};
        for (int j = 0; j <= dim; ++j) {
          Point w{};
          for (int i = 0; i < dim; ++i)
            w[i] = cell[i] + partition.simplices()[s].vertex[j][i];
          const double val = corner_weight(w, dim);
          const Point& bg = partition.barycentric_gradient(s, j);
          for (int i = 0; i < dim; ++i) g[i] += val * bg[i];
        }
        double norm = 0.0;
        for (int i = 0; i < dim; ++i) norm += g[i] * g[i];
        best = std::max(best, std::sqrt(norm));
      }
    });
    return best;
  }

  SimplicialPartition partition_;
  std::vector<Hyperplane> planes_;
};

// ---------------------------------------------------------------------------
// 1D piecewise polynomial (extended hat, custom files)
// ---------------------------------------------------------------------------

double pw_piece_eval(const std::vector<double>& coeff, double x, int deriv) {
  // polynomial in x; Horner on the deriv-th derivative
  double v = 0.0;
  for (int j = static_cast<int>(coeff.size()) - 1; j >= deriv; --j) {
    double factor = 1.0;
    for (int k = 0; k < deriv; ++k) factor *= (j - k);
    v = v * x + coeff[j] * factor;
  }
  return v;
}

double pw_eval(const std::vector<double>& bp,
               const std::vector<std::vector<double>>& pieces, double x,
               int deriv) {
  if (x < bp.front() || x > bp.back()) return 0.0;
  if (x == bp.front() && deriv > 0) return 0.0;  // lower cell is outside
  // piece index i with bp[i] < x <= bp[i+1]; a breakpoint belongs to the
  // interval on its left (lower-cell convention)
  int lo = 0, hi = static_cast<int>(pieces.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (x > bp[mid])
      lo = mid;
    else
      hi = mid - 1;
  }
  return pw_piece_eval(pieces[lo], x, deriv);
}

void pw_validate(const std::vector<double>& bp,
                 const std::vector<std::vector<double>>& pieces) {
  if (bp.size() < 2 || pieces.size() + 1 != bp.size())
    throw ConstructionError("piecewise basis: breakpoints/pieces mismatch");
  for (std::size_t i = 1; i < bp.size(); ++i)
    if (bp[i] <= bp[i - 1])
      throw ConstructionError("piecewise basis: breakpoints not increasing");
  for (const auto& piece : pieces)
    if (piece.empty() || piece.size() > 4)
      throw ConstructionError(
          "piecewise basis: pieces must have degree 0..3");
}

bool pw_interpolatory(const std::vector<double>& bp,
                      const std::vector<std::vector<double>>& pieces) {
  const double r = std::max(std::abs(bp.front()), std::abs(bp.back()));
  const int span = static_cast<int>(std::ceil(r));
  for (int xi = -span; xi <= span; ++xi) {
    const double v = pw_eval(bp, pieces, xi, 0);
    const double expect = (xi == 0) ? 1.0 : 0.0;
    if (std::abs(v - expect) > 1e-14) return false;
  }
  return true;
}

double pw_max_slope(const std::vector<double>& bp,
                    const std::vector<std::vector<double>>& pieces) {
  double best = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (int k = 0; k <= 64; ++k) {
      const double x = bp[i] + (bp[i + 1] - bp[i]) * (k + 0.5) / 65.0;
      best = std::max(best, std::abs(pw_eval(bp, pieces, x, 1)));
    }
  }
  return best;
}

class Piecewise1DBasis final : public NodalBasis {
 public:
  Piecewise1DBasis(std::vector<double> breakpoints,
                   std::vector<std::vector<double>> pieces, BasisFlavor flavor)
      : NodalBasis(1, flavor,
                   std::max(std::abs(breakpoints.front()),
                            std::abs(breakpoints.back())),
                   pw_interpolatory(breakpoints, pieces),
                   pw_max_slope(breakpoints, pieces)),
        breakpoints_(std::move(breakpoints)),
        pieces_(std::move(pieces)) {}

  double value(const Point& x) const override {
    return pw_eval(breakpoints_, pieces_, x[0], 0);
  }

  Point gradient(const Point& x) const override {
    return Point{pw_eval(breakpoints_, pieces_, x[0], 1), 0.0, 0.0};
  }

  std::vector<Hyperplane> kink_planes() const override {
    std::vector<Hyperplane> planes;
    for (double b : breakpoints_)
      planes.push_back(Hyperplane{Point{1.0, 0.0, 0.0}, b});
    return planes;
  }

 private:
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> pieces_;
};

}  // namespace

NodalBasisPtr make_q1(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw InvalidParameterError("make_q1: dim must be in {1,2,3}");
  return std::make_shared<Q1Basis>(dim);
}

NodalBasisPtr make_p1(int dim, SimplicialPartition partition) {
  if (dim != partition.dim())
    throw InvalidParameterError("make_p1: partition dimension mismatch");
  partition.validate();
  return std::make_shared<P1Basis>(dim, std::move(partition));
}

NodalBasisPtr make_p1(int dim) {
  return make_p1(dim, SimplicialPartition::standard(dim));
}

NodalBasisPtr make_extended_hat() {
  const double t = 1.0 / 3.0;
  return std::make_shared<Piecewise1DBasis>(
      std::vector<double>{-2.0, -1.0, 1.0, 2.0},
      std::vector<std::vector<double>>{{2 * t, t}, {t}, {2 * t, -t}},
      BasisFlavor::ExtendedHat1D);
}

NodalBasisPtr make_piecewise_1d(
    const std::vector<double>& breakpoints,
    const std::vector<std::vector<double>>& pieces) {
  pw_validate(breakpoints, pieces);
  return std::make_shared<Piecewise1DBasis>(breakpoints, pieces,
                                            BasisFlavor::Custom);
}

NodalBasisPtr parse_basis(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  const std::string type = j.at("type").get<std::string>();
  if (type == "piecewise_poly_1d") {
    return make_piecewise_1d(j.at("breakpoints").get<std::vector<double>>(),
                             j.at("pieces").get<std::vector<std::vector<double>>>());
  }
  if (type == "p1_partition") {
    const int dim = j.at("dim").get<int>();
    std::vector<SimplicialPartition::Simplex> simplices;
    for (const auto& js : j.at("simplices")) {
      SimplicialPartition::Simplex s;
      if (static_cast<int>(js.size()) != dim + 1)
        throw ConstructionError("p1_partition: simplex needs dim+1 vertices");
      for (int v = 0; v <= dim; ++v)
        for (int i = 0; i < dim; ++i) s.vertex[v][i] = js[v][i].get<double>();
      simplices.push_back(s);
    }
    return make_p1(dim, SimplicialPartition(dim, std::move(simplices)));
  }
  throw ConstructionError("unknown basis type: " + type);
}

NodalBasisPtr load_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameterError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_basis(buf.str());
}

// ---------------------------------------------------------------------------
// Assumption audit
// ---------------------------------------------------------------------------

AssumptionReport verify_assumptions(const NodalBasis& basis, int samples,
                                    double tol, std::uint64_t seed) {
  if (samples < 1)
    throw InvalidParameterError("verify_assumptions: samples >= 1");
  AssumptionReport report;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = basis.dim();
  const double r = basis.support_radius();

  // Lipschitz: difference quotients against the declared bound.
  {
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      Point x{}, y{};
      for (int i = 0; i < d; ++i) {
        x[i] = (2.0 * unif(rng) - 1.0) * (r + 0.5);
        // steps well above the rounding floor keep the quotient noise below
        // the 1e-12 scale of the audit
        const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
        y[i] = x[i] + sign * (0.5e-3 + 1e-3 * unif(rng));
      }
      // measure the step actually realized in floating point
      double step = 0.0;
      for (int i = 0; i < d; ++i) step += (y[i] - x[i]) * (y[i] - x[i]);
      step = std::sqrt(step);
      const double q = std::abs(basis.value(y) - basis.value(x)) / step;
      worst = std::max(worst, q - basis.lipschitz_bound());
    }
    report.lipschitz.residual = std::max(worst, 0.0);
    report.lipschitz.pass = report.lipschitz.residual <= tol;
    report.lipschitz.detail =
        "difference quotients vs declared bound " +
        std::to_string(basis.lipschitz_bound());
  }

  // Locality: exact zero outside the declared support box.
  {
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      Point x{};
      const int out_axis = static_cast<int>(rng() % std::uint64_t(d));
      for (int i = 0; i < d; ++i)
        x[i] = (2.0 * unif(rng) - 1.0) * (r + 2.0);
      const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
      x[out_axis] = sign * (r + 2.0 * unif(rng) + 1e-12);
      worst = std::max(worst, std::abs(basis.value(x)));
    }
    report.locality.residual = worst;
    report.locality.pass = worst == 0.0;
    report.locality.detail = "samples outside the support box";
  }

  // Affine reproduction: random coefficients and evaluation points.
  {
    double worst = 0.0;
    const int span = static_cast<int>(std::ceil(r)) + 1;
    for (int s = 0; s < samples; ++s) {
      const double a = 2.0 * unif(rng) - 1.0;
      Point b{}, x{};
      for (int i = 0; i < d; ++i) {
        b[i] = 2.0 * unif(rng) - 1.0;
        x[i] = unif(rng);
      }
      double sum = 0.0;
      IndexBox box{};
      for (int i = 0; i < d; ++i) {
        box.lo[i] = static_cast<int>(std::floor(x[i])) - span;
        box.hi[i] = static_cast<int>(std::ceil(x[i])) + span;
      }
      for_each_index(box, d, [&](const MultiIndex& xi) {
        Point rel = to_point(xi);
        double affine = a;
        for (int i = 0; i < d; ++i) {
          rel[i] = x[i] - xi[i];
          affine += b[i] * xi[i];
        }
        sum += basis.value(rel) * affine;
      });
      worst = std::max(worst, std::abs(sum - (a + dot(b, x, d))));
    }
    report.affine_reproduction.residual = worst;
    report.affine_reproduction.pass = worst <= tol;
    report.affine_reproduction.detail =
        "shifted sums against a + b.x at random points";
  }

  // Interpolation: Kronecker delta on lattice points in the support box.
  {
    double worst = 0.0;
    MultiIndex worst_site{};
    double worst_value = 0.0;
    const int span = static_cast<int>(std::ceil(r));
    IndexBox box{};
    for (int i = 0; i < d; ++i) {
      box.lo[i] = -span;
      box.hi[i] = span;
    }
    for_each_index(box, d, [&](const MultiIndex& xi) {
      bool origin = true;
      for (int i = 0; i < d; ++i) origin = origin && xi[i] == 0;
      const double v = basis.value(to_point(xi));
      const double res = std::abs(v - (origin ? 1.0 : 0.0));
      if (res > worst) {
        worst = res;
        worst_site = xi;
        worst_value = v;
      }
    });
    report.interpolation.residual = worst;
    report.interpolation.pass = worst <= 1e-14;
    std::ostringstream detail;
    detail << "worst lattice value " << worst_value << " at "
           << format_index(worst_site, d);
    report.interpolation.detail = detail.str();
  }

  return report;
}

// ---------------------------------------------------------------------------
// Support boxes
// ---------------------------------------------------------------------------

RealBox support_box(const NodalBasis& basis, const MultiIndex& site) {
  RealBox box;
  for (int i = 0; i < basis.dim(); ++i) {
    box.lo[i] = site[i] - basis.support_radius();
    box.hi[i] = site[i] + basis.support_radius();
  }
  return box;
}

RealBox support_box(const SmoothedBasis& basis, const MultiIndex& site) {
  RealBox box;
  for (int i = 0; i < basis.dim(); ++i) {
    box.lo[i] = site[i] - basis.support_radius();
    box.hi[i] = site[i] + basis.support_radius();
  }
  return box;
}

}  // namespace gridfun
