#pragma once

#include <cstdint>
#include <vector>

#include "dfcv/kernels.hpp"
#include "dfcv/mixtures.hpp"
#include "dfcv/optimize.hpp"
#include "dfcv/sample.hpp"

namespace dfcv {

// ---------------------------------------------------------------------------
// Pilot-free SCV bandwidth selection for the Gaussian kernel estimator.

// alpha = K*K - 2K + K_0: a proper Gaussian comb plus one unit Dirac atom.
// R_{alpha,h}(f) is the integrated squared bias of the kde at bandwidth h.
struct AlphaComb {
  GaussComb gaussian_part;  // (K*K)_h - 2 K_h
  double h = 0.0;           // the implicit Dirac atom carries weight one
};

AlphaComb alpha_comb(double h);

// alpha_h * k: the Dirac atom reproduces k, the Gaussian part convolves.
GaussComb alpha_convolve(const AlphaComb& a, const GaussComb& k);

// Inner maximand at pilot bandwidth g:
//   2 {n(n-1)}^{-1} sum_{i!=j} (alpha_h*L_g)(X_i-X_j)
//     - n^{-2} sum_{i,j} {alpha_h*(L*L)_g}(X_i-X_j).
double psi_alpha_objective(const Sample& s, double h, double g);

struct PsiAlphaResult {
  double estimate;  // max_g of the objective
  double g_inner;
};

// Full inner search on the cv_core pilot grid [min_gap/3, range].
PsiAlphaResult psi_alpha_h_hat(const Sample& s, double h);

// SCV criterion M_hat(h) = (nh)^{-1} R(K) + psi_alpha_h_hat.
double m_hat(const Sample& s, double h);

struct HHatResult {
  double h;          // argmin of M_hat
  double m_min;      // M_hat at the minimizer
  CriterionCurve curve;
  std::vector<double> inner_g;  // pilot maximizer per outer grid point
};

// Outer minimization of M_hat over h in [sd/n, 2 sd], 60 log points plus
// golden refinement; the inner search is warm-started from the previous h's
// pilot and falls back to the full grid whenever the warm result fails a
// +-1% local-optimality certificate.
HHatResult h_hat(const Sample& s);

// Exact MISE of the Gaussian-kernel density estimate under a normal mixture,
// and its minimizer: the oracle the selector is judged against.
double exact_kde_mise(const NormalMixture& f, int n, double h);
double kde_h_mise(const NormalMixture& f, int n);

// ---------------------------------------------------------------------------
// Histogram binwidth selection, bins B_k = [kb, (k+1)b) anchored at 0.

struct HistogramSpec {
  double binwidth = 0.0;
  int n = 0;
  std::vector<std::pair<long long, int>> counts;  // occupied cells, ascending
};

HistogramSpec histogram_counts(const Sample& s, double b);

// CV(b) = 2/{(n-1)b} - (n+1)/{n^2(n-1)b} sum_k nu_k^2, unbiased for
// MISE(b) - R(f).
double hist_cv(const Sample& s, double b);

// V(b) = (n^2 b)^{-1} sum_k nu_k^2 and its no-diagonal companion
// U(b) = V(b) - (nb)^{-1}.
double hist_v_stat(const Sample& s, double b);
double hist_u_stat(const Sample& s, double b);

struct PsiBreveResult {
  double estimate;  // -min_b CV(b)
  double b_cv;
  CriterionCurve curve;
};

PsiBreveResult hist_psi_breve(const Sample& s);

// Smoothed histogram statistics with pilot binwidth c on cells
// C_l = [lc, (l+1)c):
//   V_b(c) = b^{-1}(nc)^{-2} sum_k { sum_l nu_l(c) lambda(B_k cap C_l) }^2,
// U_b(c) restricts the data double sum to i != j.
double hist_v_bc(const Sample& s, double b, double c);
double hist_u_bc(const Sample& s, double b, double c);

// Interval overlap length lambda(B_k cap C_l).
double cell_overlap(long long k, double b, long long l, double c);

// Inner estimate of b^{-1} sum_k p_k^2: max_c {2 U_b(c) - V_b(c)}, clipped
// at zero (the target is nonnegative); ties on the c-grid break toward the
// smoother pilot (larger c).
double hist_inner_theta(const Sample& s, double b);

struct HistScvResult {
  double binwidth;  // argmin of the SCV-type criterion
  double crit_min;
  CriterionCurve curve;
};

// (nb)^{-1} - (1 + n^{-1}) * hist_inner_theta(b), minimized over b.  This is
// the exact-MISE form with the unknown b^{-1} sum p_k^2 replaced by its
// smoothed estimate; the R(f) constant is dropped (it does not move the
// minimizer).
HistScvResult hist_scv_binwidth(const Sample& s);

}  // namespace dfcv
