#include "gridfun/quasi.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "gridfun/quadrature.hpp"

namespace gridfun {

namespace {

/// 1D restricted Gram of the cardinal cubic: entries over shifts -3..3,
/// integrated over the center support [-2, 2] by exact per-cell Gauss.
Eigen::MatrixXd gram_1d(const SmoothedBasis& sb1) {
  const GaussRule& rule = gauss_legendre(4);  // degree 7 >= product degree 6
  Eigen::MatrixXd g(7, 7);
  for (int a = -3; a <= 3; ++a) {
    for (int b = a; b <= 3; ++b) {
      double acc = 0.0;
      for (int cell = -2; cell < 2; ++cell) {
        for (int q = 0; q < rule.points(); ++q) {
          const double x = cell + rule.nodes[q];
          acc += rule.weights[q] * sb1.value(Point{x - a, 0, 0}) *
                 sb1.value(Point{x - b, 0, 0});
        }
      }
      g(a + 3, b + 3) = acc;
      g(b + 3, a + 3) = acc;
    }
  }
  return g;
}

}  // namespace

DualBasis::DualBasis(SmoothedBasis parent) : parent_(std::move(parent)) {
  if (parent_.backend() != SmoothedBasis::Backend::AnalyticTensorCubic)
    throw ConstructionError(
        "DualBasis: requires the analytic tensor-product backend");
  const int d = parent_.dim();

  // The restricted Gram factorizes over axes (product domain, product
  // integrand), so assembly and the solve reduce to one dimension.
  const SmoothedBasis sb1 = smoothed(make_q1(1));
  const Eigen::MatrixXd g1 = gram_1d(sb1);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      g1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond1 = svd.singularValues()(0) /
                       svd.singularValues()(svd.singularValues().size() - 1);
  gram_condition_ = std::pow(cond1, d);
  if (!(gram_condition_ < 1e12))
    throw ConstructionError(
        "DualBasis: restricted Gram condition estimate " +
        std::to_string(gram_condition_) + " exceeds 1e12");
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(7);
  e0(3) = 1.0;
  const Eigen::VectorXd a1 = svd.solve(e0);

  IndexBox box{};
  for (int k = 0; k < d; ++k) {
    box.lo[k] = -3;
    box.hi[k] = 3;
  }
  for_each_index(box, d, [&](const MultiIndex& xi) {
    double coeff = 1.0;
    for (int k = 0; k < d; ++k) coeff *= a1(xi[k] + 3);
    index_set_.push_back(xi);
    coeffs_.push_back(coeff);
  });
}

double DualBasis::coefficient(const MultiIndex& shift) const {
  for (std::size_t i = 0; i < index_set_.size(); ++i)
    if (index_set_[i] == shift) return coeffs_[i];
  return 0.0;
}

double DualBasis::value(const Point& x) const {
  const int d = dim();
  const double r = parent_.support_radius();
  for (int k = 0; k < d; ++k)
    if (std::abs(x[k]) >= r) return 0.0;  // hard truncation
  double acc = 0.0;
  for (std::size_t i = 0; i < index_set_.size(); ++i) {
    Point rel{};
    bool live = true;
    for (int k = 0; k < d; ++k) {
      rel[k] = x[k] - index_set_[i][k];
      live = live && std::abs(rel[k]) < r;
    }
    if (live) acc += coeffs_[i] * parent_.value(rel);
  }
  return acc;
}

RealBox DualBasis::support() const {
  RealBox box;
  for (int k = 0; k < dim(); ++k) {
    box.lo[k] = -parent_.support_radius();
    box.hi[k] = parent_.support_radius();
  }
  return box;
}

DualBasis build_dual(const SmoothedBasis& basis) { return DualBasis(basis); }

// ---------------------------------------------------------------------------
// QuasiInterpolant
// ---------------------------------------------------------------------------

QuasiInterpolant::QuasiInterpolant(DualBasis dual, int gauss_points)
    : dual_(std::move(dual)), gauss_points_(gauss_points) {
  if (gauss_points < 2)
    throw InvalidParameterError("QuasiInterpolant: gauss_points >= 2");
}

double QuasiInterpolant::coefficient(
    const std::function<double(const Point&)>& v, const MultiIndex& site) const {
  const int d = dual_.dim();
  const double r = dual_.parent().support_radius();
  const GaussRule& rule = gauss_legendre(gauss_points_);
  const int span = static_cast<int>(std::ceil(r));
  IndexBox cells{};
  for (int k = 0; k < d; ++k) {
    cells.lo[k] = -span;
    cells.hi[k] = span - 1;
  }
  double acc = 0.0;
  for_each_index(cells, d, [&](const MultiIndex& cell) {
    std::array<int, kMaxDim> q{};
    while (true) {
      Point rel{}, x{};
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        rel[k] = cell[k] + rule.nodes[q[k]];
        x[k] = site[k] + rel[k];
        w *= rule.weights[q[k]];
      }
      acc += w * dual_.value(rel) * v(x);
      int axis = d - 1;
      while (axis >= 0) {
        if (++q[axis] < rule.points()) break;
        q[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  });
  return acc;
}

double QuasiInterpolant::evaluate(const std::function<double(const Point&)>& v,
                                  const Point& x) const {
  const int d = dual_.dim();
  const double r = dual_.parent().support_radius();
  IndexBox box{};
  for (int k = 0; k < d; ++k) {
    box.lo[k] = static_cast<int>(std::ceil(x[k] - r));
    box.hi[k] = static_cast<int>(std::floor(x[k] + r));
  }
  double acc = 0.0;
  for_each_index(box, d, [&](const MultiIndex& xi) {
    Point rel{};
    for (int k = 0; k < d; ++k) rel[k] = x[k] - xi[k];
    acc += coefficient(v, xi) * dual_.parent().value(rel);
  });
  return acc;
}

InterpolantField QuasiInterpolant::interpolate(
    const std::function<double(const Point&)>& v, const LatticeDomain& domain,
    double spacing) const {
  const int d = dual_.dim();
  domain.require_supports(dual_.parent().support_radius());

  // Moment weights repeat site-periodically: tabulate offset/weight pairs.
  struct Term {
    Point offset{};
    double weight = 0.0;
  };
  std::vector<Term> terms;
  const double r = dual_.parent().support_radius();
  const GaussRule& rule = gauss_legendre(gauss_points_);
  const int span = static_cast<int>(std::ceil(r));
  IndexBox cells{};
  for (int k = 0; k < d; ++k) {
    cells.lo[k] = -span;
    cells.hi[k] = span - 1;
  }
  for_each_index(cells, d, [&](const MultiIndex& cell) {
    std::array<int, kMaxDim> q{};
    while (true) {
      Term t;
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        t.offset[k] = cell[k] + rule.nodes[q[k]];
        w *= rule.weights[q[k]];
      }
      t.weight = w * dual_.value(t.offset);
      if (t.weight != 0.0) terms.push_back(t);
      int axis = d - 1;
      while (axis >= 0) {
        if (++q[axis] < rule.points()) break;
        q[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  });

  LatticeFunction coeffs = LatticeFunction::build(
      domain, 1, [&](const MultiIndex& site, double* out) {
        double acc = 0.0;
        for (const Term& t : terms) {
          Point x{};
          for (int k = 0; k < d; ++k)
            x[k] = spacing * (site[k] + t.offset[k]);
          acc += t.weight * v(x);
        }
        out[0] = acc;
      });
  return convolution_interpolant(std::move(coeffs), dual_.parent());
}

// ---------------------------------------------------------------------------
// Cubic preimage
// ---------------------------------------------------------------------------

namespace {

/// Free-space smoothed-basis expansion of polynomial samples.
double smoothed_sum(const Polynomial& p, const SmoothedBasis& sb,
                    const Point& x) {
  const int d = sb.dim();
  const double r = sb.support_radius();
  IndexBox box{};
  for (int k = 0; k < d; ++k) {
    box.lo[k] = static_cast<int>(std::ceil(x[k] - r));
    box.hi[k] = static_cast<int>(std::floor(x[k] + r));
  }
  double acc = 0.0;
  for_each_index(box, d, [&](const MultiIndex& xi) {
    Point rel{};
    for (int k = 0; k < d; ++k) rel[k] = x[k] - xi[k];
    const double w = sb.value(rel);
    if (w != 0.0) acc += w * p(to_point(xi));
  });
  return acc;
}

}  // namespace

LatticeFunction cubic_preimage(const Polynomial& p, const SmoothedBasis& basis,
                               const LatticeDomain& domain) {
  if (p.total_degree() > 3)
    throw InvalidParameterError("cubic_preimage: polynomial degree exceeds 3");
  const int d = basis.dim();
  if (p.dim() != d || domain.dim() != d)
    throw InvalidParameterError("cubic_preimage: dimension mismatch");

  // The expansion of the samples differs from the polynomial by an affine
  // field; recover it from d+1 evaluations and subtract it from the samples.
  auto defect = [&](const Point& x) {
    return smoothed_sum(p, basis, x) - p(x);
  };
  const double alpha = defect(Point{});
  Point beta{};
  for (int k = 0; k < d; ++k) {
    Point plus{}, minus{};
    plus[k] = 0.5;
    minus[k] = -0.5;
    beta[k] = defect(plus) - defect(minus);
  }

  // Self-check: the defect must actually be affine.
  std::mt19937_64 rng(7u);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  for (int s = 0; s < 16; ++s) {
    Point x{};
    for (int k = 0; k < d; ++k) x[k] = unif(rng);
    const double res = std::abs(defect(x) - (alpha + dot(beta, x, d)));
    if (res > 1e-9)
      throw ConstructionError(
          "cubic_preimage: correction is not affine (residual " +
          std::to_string(res) + "); basis assumptions violated?");
  }

  return LatticeFunction::build(
      domain, 1, [&](const MultiIndex& site, double* out) {
        const Point x = to_point(site);
        out[0] = p(x) - alpha - dot(beta, x, d);
      });
}

// ---------------------------------------------------------------------------
// Two-basis difference check
// ---------------------------------------------------------------------------

namespace {

/// Memoizing free-space evaluator on the finite set of grid offsets.
class SmoothedMemo {
 public:
  explicit SmoothedMemo(SmoothedBasis basis) : basis_(std::move(basis)) {}

  double value(const Point& x) {
    const int d = basis_.dim();
    for (int k = 0; k < d; ++k)
      if (std::abs(x[k]) >= basis_.support_radius()) return 0.0;
    std::array<long long, kMaxDim> key{};
    for (int k = 0; k < d; ++k) key[k] = std::llround(x[k] * (1LL << 20));
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = basis_.value(x);
    cache_.emplace(key, v);
    return v;
  }

 private:
  SmoothedBasis basis_;
  std::map<std::array<long long, kMaxDim>, double> cache_;
};

}  // namespace

double two_basis_difference_check(const NodalBasisPtr& basis1,
                                  const NodalBasisPtr& basis2,
                                  const Polynomial& p, const RealBox& window,
                                  double grid_step) {
  if (!basis1 || !basis2)
    throw InvalidParameterError("two_basis_difference: null basis");
  if (basis1->dim() != basis2->dim())
    throw InvalidParameterError("two_basis_difference: dimension mismatch");
  if (p.total_degree() > 3)
    throw InvalidParameterError("two_basis_difference: degree exceeds 3");
  const int d = basis1->dim();
  SmoothedMemo s1(smoothed(basis1));
  SmoothedMemo s2(smoothed(basis2));
  const double radius =
      2.0 * std::max(basis1->support_radius(), basis2->support_radius());

  // Grid over the window.
  std::vector<Point> grid;
  Point x = window.lo;
  while (true) {
    grid.push_back(x);
    int axis = d - 1;
    while (axis >= 0) {
      x[axis] += grid_step;
      if (x[axis] <= window.hi[axis] + 1e-12) break;
      x[axis] = window.lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }

  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    IndexBox box{};
    for (int k = 0; k < d; ++k) {
      box.lo[k] = static_cast<int>(std::ceil(grid[i][k] - radius));
      box.hi[k] = static_cast<int>(std::floor(grid[i][k] + radius));
    }
    double acc = 0.0;
    for_each_index(box, d, [&](const MultiIndex& xi) {
      Point rel{};
      for (int k = 0; k < d; ++k) rel[k] = grid[i][k] - xi[k];
      const double diff = s2.value(rel) - s1.value(rel);
      if (diff != 0.0) acc += p(to_point(xi)) * diff;
    });
    values[i] = acc;
  }

  // Best affine fit by least squares, then the max deviation.
  Eigen::MatrixXd design(grid.size(), d + 1);
  Eigen::VectorXd rhs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    design(i, 0) = 1.0;
    for (int k = 0; k < d; ++k) design(i, 1 + k) = grid[i][k];
    rhs(i) = values[i];
  }
  const Eigen::VectorXd fit =
      design.colPivHouseholderQr().solve(rhs);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double affine = fit(0);
    for (int k = 0; k < d; ++k) affine += fit(1 + k) * grid[i][k];
    worst = std::max(worst, std::abs(values[i] - affine));
  }
  return worst;
}

}  // namespace gridfun
