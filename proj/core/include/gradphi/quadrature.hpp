#pragma once

#include <cstddef>
#include <vector>

namespace gradphi {

/// Gauss-Legendre rule on [-1, 1]. Nodes ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Integrate `f` over [a, b].
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      acc += weights[k] * f(mid + half * nodes[k]);
    }
    return half * acc;
  }
};

/// Rules are cached per order; the returned reference stays valid.
const GaussLegendre& gauss_legendre(int order);

}  // namespace gradphi
