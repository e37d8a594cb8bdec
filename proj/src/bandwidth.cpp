#include "dfcv/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "dfcv/math.hpp"
#include "dfcv/oracle.hpp"

namespace dfcv {

namespace {

constexpr double kRoughK = kInvSqrt2Pi / kSqrt2;  // R(K) = 1/(2 sqrt(pi))
constexpr int kInnerPoints = 120;
constexpr double kRelTol = 1e-6;

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) +
                                " must be positive and finite");
  }
}

void check_not_degenerate(const Sample& s, const char* where) {
  if (s.degenerate()) {
    throw std::runtime_error(std::string(where) +
                             ": all observations equal; criterion has no "
                             "interior minimum");
  }
}

//! sum_{i<j} k(X_i - X_j) for a Gaussian comb, one pair pass per atom.
double comb_pair_sum(const Sample& s, const GaussComb& k) {
  double acc = 0.0;
  for (const auto& a : k.atoms) {
    acc += a.c * (kInvSqrt2Pi / a.s) * exp_pair_sum(s, a.s);
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// SCV bandwidth.

AlphaComb alpha_comb(double h) {
  check_positive(h, "alpha_comb: h");
  return {GaussComb{{GaussAtom{1.0, kSqrt2 * h}, GaussAtom{-2.0, h}}}, h};
}

GaussComb alpha_convolve(const AlphaComb& a, const GaussComb& k) {
  GaussComb out = convolve(a.gaussian_part, k);
  out.atoms.insert(out.atoms.end(), k.atoms.begin(), k.atoms.end());
  return out;
}

double psi_alpha_objective(const Sample& s, double h, double g) {
  check_positive(h, "psi_alpha_objective: h");
  check_positive(g, "psi_alpha_objective: g");
  const double n = s.n();
  const AlphaComb a = alpha_comb(h);
  const GaussComb al = alpha_convolve(a, scaled(kernel_l(), g));
  const GaussComb an = alpha_convolve(a, scaled(kernel_n(), g));
  const double no_diag = 4.0 * comb_pair_sum(s, al) / (n * (n - 1.0));
  const double v_stat = (n * an(0.0) + 2.0 * comb_pair_sum(s, an)) / (n * n);
  return no_diag - v_stat;
}

namespace {

struct InnerCtl {
  bool warm = false;
  double g = 0.0;
};

PsiAlphaResult inner_psi_alpha(const Sample& s, double h, InnerCtl& ctl) {
  const double lo = s.min_gap() / 3.0, hi = s.range();
  auto value = [&](double g) { return psi_alpha_objective(s, h, g); };
  auto neg_log = [&](double t) { return -value(std::exp(t)); };

  double g_star = 0.0, v_star = 0.0;
  bool certified = false;
  if (ctl.warm) {
    const double a = std::max(lo, 0.5 * ctl.g);
    const double b = std::min(hi, 2.0 * ctl.g);
    if (a < b) {
      const auto gr = golden_min(neg_log, std::log(a), std::log(b), kRelTol);
      g_star = std::exp(gr.x);
      v_star = -gr.fx;
      // +-1% local-optimality certificate; a failure means the warm bracket
      // lost the interior maximum, so redo the full grid search.
      const double slack = 1e-12 * (1.0 + std::abs(v_star));
      certified = value(0.99 * g_star) <= v_star + slack &&
                  value(1.01 * g_star) <= v_star + slack;
    }
  }
  if (!certified) {
    const auto curve = minimize_on_log_grid(
        [&](double g) { return -value(g); }, lo, hi, kInnerPoints, kRelTol);
    g_star = curve.minimizer;
    v_star = -curve.min_value;
  }
  ctl = {true, g_star};
  return {v_star, g_star};
}

}  // namespace

PsiAlphaResult psi_alpha_h_hat(const Sample& s, double h) {
  check_positive(h, "psi_alpha_h_hat: h");
  check_not_degenerate(s, "psi_alpha_h_hat");
  InnerCtl cold;
  return inner_psi_alpha(s, h, cold);
}

double m_hat(const Sample& s, double h) {
  return kRoughK / (s.n() * h) + psi_alpha_h_hat(s, h).estimate;
}

HHatResult h_hat(const Sample& s) {
  check_not_degenerate(s, "h_hat");
  const double sd = s.sd();
  const int n = s.n();

  HHatResult res;
  res.curve.grid = log_grid(sd / n, 2.0 * sd, 60);
  res.curve.values.reserve(res.curve.grid.size());
  res.inner_g.reserve(res.curve.grid.size());

  InnerCtl ctl;
  auto m_at = [&](double h) {
    const auto inner = inner_psi_alpha(s, h, ctl);
    res.inner_g.push_back(inner.g_inner);  // recorded for grid points only
    return kRoughK / (n * h) + inner.estimate;
  };

  int best = 0;
  for (std::size_t i = 0; i < res.curve.grid.size(); ++i) {
    res.curve.values.push_back(m_at(res.curve.grid[i]));
    if (res.curve.values[i] < res.curve.values[best]) {
      best = static_cast<int>(i);
    }
  }
  res.h = res.curve.grid[best];
  res.m_min = res.curve.values[best];
  res.curve.minimizer = res.h;
  res.curve.min_value = res.m_min;

  if (best > 0 && best + 1 < static_cast<int>(res.curve.grid.size())) {
    auto in_log = [&](double t) {
      const double h = std::exp(t);
      const auto inner = inner_psi_alpha(s, h, ctl);
      return kRoughK / (n * h) + inner.estimate;
    };
    const auto gr = golden_min(in_log, std::log(res.curve.grid[best - 1]),
                               std::log(res.curve.grid[best + 1]), kRelTol);
    res.curve.refined = gr.converged;
    res.curve.iterations = gr.iterations;
    if (gr.fx < res.m_min) {
      res.h = std::exp(gr.x);
      res.m_min = gr.fx;
      res.curve.minimizer = res.h;
      res.curve.min_value = res.m_min;
    }
  }
  return res;
}

double exact_kde_mise(const NormalMixture& f, int n, double h) {
  if (n < 2) throw std::invalid_argument("exact_kde_mise: need n >= 2");
  check_positive(h, "exact_kde_mise: h");
  const double rl = r_functional(kernel_l(), f, h);
  const double rn = r_functional(kernel_n(), f, h);
  return kRoughK / (n * h) + (1.0 - 1.0 / n) * rn - 2.0 * rl + f.true_psi();
}

double kde_h_mise(const NormalMixture& f, int n) {
  const double sd = std::sqrt(f.variance());
  const auto curve = minimize_on_log_grid(
      [&](double h) { return exact_kde_mise(f, n, h); }, sd / n, 8.0 * sd,
      200, 1e-7);
  return curve.minimizer;
}

// ---------------------------------------------------------------------------
// Histograms.

namespace {

long long cell_index(double x, double width) {
  return static_cast<long long>(std::floor(x / width));
}

}  // namespace

HistogramSpec histogram_counts(const Sample& s, double b) {
  check_positive(b, "histogram_counts: binwidth");
  const auto& x = s.sorted();
  const double extreme = std::max(std::abs(x.front()), std::abs(x.back()));
  if (extreme / b > 9e15) {
    throw std::invalid_argument(
        "histogram_counts: binwidth too small for the data magnitude");
  }
  HistogramSpec spec;
  spec.binwidth = b;
  spec.n = s.n();
  long long run_cell = cell_index(x[0], b);
  int run = 0;
  for (double v : x) {
    const long long k = cell_index(v, b);
    if (k != run_cell) {
      spec.counts.emplace_back(run_cell, run);
      run_cell = k;
      run = 0;
    }
    ++run;
  }
  spec.counts.emplace_back(run_cell, run);
  return spec;
}

double hist_cv(const Sample& s, double b) {
  const auto spec = histogram_counts(s, b);
  const double n = s.n();
  double sum_sq = 0.0;
  for (const auto& [k, m] : spec.counts) sum_sq += double(m) * m;
  return 2.0 / ((n - 1.0) * b) - (n + 1.0) * sum_sq / (n * n * (n - 1.0) * b);
}

double hist_v_stat(const Sample& s, double b) {
  const auto spec = histogram_counts(s, b);
  const double n = s.n();
  double sum_sq = 0.0;
  for (const auto& [k, m] : spec.counts) sum_sq += double(m) * m;
  return sum_sq / (n * n * b);
}

double hist_u_stat(const Sample& s, double b) {
  const auto spec = histogram_counts(s, b);
  const double n = s.n();
  double pairs = 0.0;  // sum over k of nu_k (nu_k - 1), the i != j count
  for (const auto& [k, m] : spec.counts) pairs += double(m) * (m - 1.0);
  return pairs / (n * n * b);
}

PsiBreveResult hist_psi_breve(const Sample& s) {
  check_not_degenerate(s, "hist_psi_breve");
  auto curve =
      minimize_on_log_grid([&](double b) { return hist_cv(s, b); },
                           s.min_gap() / 3.0, s.range(), kInnerPoints, kRelTol);
  return {-curve.min_value, curve.minimizer, std::move(curve)};
}

double cell_overlap(long long k, double b, long long l, double c) {
  const double lo = std::max(k * b, l * c);
  const double hi = std::min((k + 1.0) * b, (l + 1.0) * c);
  return std::max(0.0, hi - lo);
}

namespace {

// sum_k A_k^2 with A_k = sum_l nu_l lambda(B_k cap C_l), plus the i = j
// correction sum_l nu_l sum_k lambda(B_k cap C_l)^2, both in length^2 units.
// B_k cells interior to one C_l have A_k = nu_l b exactly, so only the
// O(#occupied) breakpoint-containing cells are accumulated explicitly.
struct VbcParts {
  double sum_a2 = 0.0;
  double corr = 0.0;
};

VbcParts vbc_parts(const HistogramSpec& pilot, double b) {
  const double c = pilot.binwidth;
  VbcParts out;
  std::vector<long long> special;
  special.reserve(2 * pilot.counts.size());
  for (const auto& [l, m] : pilot.counts) {
    const double l_lo = l * c, l_hi = (l + 1.0) * c;
    const long long k_lo = cell_index(l_lo, b);
    const long long k_hi = cell_index(l_hi, b);
    const double interior = k_hi > k_lo ? double(k_hi - k_lo - 1) : 0.0;
    out.sum_a2 += interior * (m * b) * (m * b);
    out.corr += interior * double(m) * b * b;
    const double lam_lo = std::min((k_lo + 1.0) * b, l_hi) - l_lo;
    out.corr += m * lam_lo * lam_lo;
    if (k_hi > k_lo) {
      const double lam_hi = l_hi - std::max(k_hi * b, l_lo);
      out.corr += m * lam_hi * lam_hi;
    }
    special.push_back(k_lo);
    special.push_back(k_hi);
  }
  std::sort(special.begin(), special.end());
  special.erase(std::unique(special.begin(), special.end()), special.end());

  for (long long k : special) {
    const double k_hi_x = (k + 1.0) * b;
    const long long l_first = cell_index(k * b, c) - 1;
    auto it = std::lower_bound(
        pilot.counts.begin(), pilot.counts.end(), l_first,
        [](const std::pair<long long, int>& p, long long v) {
          return p.first < v;
        });
    double a = 0.0;
    for (; it != pilot.counts.end() && it->first * c < k_hi_x; ++it) {
      a += it->second * cell_overlap(k, b, it->first, c);
    }
    out.sum_a2 += a * a;
  }
  return out;
}

double vbc_scale(const Sample& s, double b, double c) {
  const double n = s.n();
  return 1.0 / (b * n * n * c * c);
}

}  // namespace

double hist_v_bc(const Sample& s, double b, double c) {
  check_positive(b, "hist_v_bc: b");
  check_positive(c, "hist_v_bc: c");
  return vbc_parts(histogram_counts(s, c), b).sum_a2 * vbc_scale(s, b, c);
}

double hist_u_bc(const Sample& s, double b, double c) {
  check_positive(b, "hist_u_bc: b");
  check_positive(c, "hist_u_bc: c");
  const auto parts = vbc_parts(histogram_counts(s, c), b);
  return (parts.sum_a2 - parts.corr) * vbc_scale(s, b, c);
}

double hist_inner_theta(const Sample& s, double b) {
  check_positive(b, "hist_inner_theta: b");
  check_not_degenerate(s, "hist_inner_theta");
  auto value = [&](double c) {
    const auto parts = vbc_parts(histogram_counts(s, c), b);
    return (parts.sum_a2 - 2.0 * parts.corr) * vbc_scale(s, b, c);
  };
  const auto grid = log_grid(s.min_gap() / 3.0, s.range(), kInnerPoints);
  int best = 0;
  double best_v = value(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = value(grid[i]);
    if (v >= best_v) {  // ties break toward the smoother (larger) pilot
      best = static_cast<int>(i);
      best_v = v;
    }
  }
  if (best > 0 && best + 1 < static_cast<int>(grid.size())) {
    auto neg_log = [&](double t) { return -value(std::exp(t)); };
    const auto gr = golden_min(neg_log, std::log(grid[best - 1]),
                               std::log(grid[best + 1]), kRelTol);
    if (-gr.fx > best_v) best_v = -gr.fx;
  }
  return std::max(0.0, best_v);
}

HistScvResult hist_scv_binwidth(const Sample& s) {
  check_not_degenerate(s, "hist_scv_binwidth");
  const double n = s.n();
  // Exact-MISE form with b^{-1} sum p_k^2 estimated; R(f) dropped (constant).
  auto crit = [&](double b) {
    return 1.0 / (n * b) - (1.0 + 1.0 / n) * hist_inner_theta(s, b);
  };
  auto curve = minimize_on_log_grid(crit, s.min_gap() / 3.0, s.range(),
                                    kInnerPoints, kRelTol);
  return {curve.minimizer, curve.min_value, std::move(curve)};
}

}  // namespace dfcv
