#pragma once

// One-dimensional search utilities: geometric grids, golden-section interval
// refinement and the grid-then-refine driver every criterion minimizer in the
// library goes through.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dfcv {

//! m points, geometrically spaced, from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int m) {
  if (!(lo > 0) || !(hi > lo) || m < 2) {
    throw std::invalid_argument("log_grid: need 0 < lo < hi and m >= 2");
  }
  std::vector<double> g(m);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < m; ++i) {
    g[i] = std::exp(llo + (lhi - llo) * i / (m - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

//! Golden-section minimization on [a, b].  Stops once the interval shrinks
//! below rel_tol relative to the magnitude of the current minimizer.
template <class F>
GoldenResult golden_min(F&& f, double a, double b, double rel_tol,
                        int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  GoldenResult res;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
    if (b - a <= rel_tol * (std::abs(a) + std::abs(b)) * 0.5) {
      res.converged = true;
      break;
    }
  }
  if (f1 < f2) {
    res.x = x1;
    res.fx = f1;
  } else {
    res.x = x2;
    res.fx = f2;
  }
  return res;
}

//! A criterion evaluated on a bandwidth grid together with its refined
//! minimizer.  `refined` is false when the grid minimum sat on an edge and
//! no interior bracket was available.
struct CriterionCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double minimizer = 0.0;
  double min_value = 0.0;
  bool refined = false;
  int iterations = 0;
};

//! Evaluate `f` on a geometric grid, then golden-refine in log space inside
//! the bracketing triple around the grid argmin.  Non-finite criterion values
//! (e.g. +inf from empty leave-one-out neighborhoods) are skipped when
//! locating the minimum; if no finite value exists, throws.
template <class F>
CriterionCurve minimize_on_log_grid(F&& f, double lo, double hi, int points,
                                    double rel_tol = 1e-6) {
  if (!(lo > 0) || !(hi > lo)) {
    throw std::invalid_argument("minimize_on_log_grid: need 0 < lo < hi");
  }
  CriterionCurve curve;
  curve.grid = log_grid(lo, hi, points);
  curve.values.reserve(curve.grid.size());
  int best = -1;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    double v = f(curve.grid[i]);
    curve.values.push_back(v);
    if (std::isfinite(v) && (best < 0 || v < curve.values[best])) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    throw std::runtime_error(
        "minimize_on_log_grid: criterion not finite anywhere on the grid");
  }
  curve.minimizer = curve.grid[best];
  curve.min_value = curve.values[best];
  if (best > 0 && best + 1 < static_cast<int>(curve.grid.size())) {
    auto in_log = [&](double t) { return f(std::exp(t)); };
    auto gr = golden_min(in_log, std::log(curve.grid[best - 1]),
                         std::log(curve.grid[best + 1]), rel_tol);
    curve.refined = gr.converged;
    curve.iterations = gr.iterations;
    if (gr.fx < curve.min_value) {
      curve.minimizer = std::exp(gr.x);
      curve.min_value = gr.fx;
    }
  }
  return curve;
}

}  // namespace dfcv
