#pragma once

// Adaptive Gauss-Kronrod integration, a thin front of Boost.Math's G7/K15
// rule.  Serves the difficulty functional at runtime and the numeric oracles
// in the test suite.

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dfcv {

template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                 int max_depth = 15) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      std::forward<F>(f), a, b, max_depth, rel_tol);
}

}  // namespace dfcv
