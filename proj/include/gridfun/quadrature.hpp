#pragma once

#include <vector>

#include "gridfun/common.hpp"

namespace gridfun {

/// One-dimensional Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int points() const { return static_cast<int>(nodes.size()); }
  /// Exact for polynomials of degree <= 2n - 1.
  int exact_degree() const { return 2 * points() - 1; }
};

/// Nodes and weights on [0, 1] via Newton iteration on Legendre polynomials.
const GaussRule& gauss_legendre(int points);

/// Integrates f over [a, b] with a single application of the rule.
template <typename F>
double gauss_integrate(const GaussRule& rule, double a, double b, F&& f) {
  const double len = b - a;
  double s = 0.0;
  for (int i = 0; i < rule.points(); ++i)
    s += rule.weights[i] * f(a + len * rule.nodes[i]);
  return s * len;
}

}  // namespace gridfun
