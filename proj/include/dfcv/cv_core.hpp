#pragma once

#include "dfcv/optimize.hpp"
#include "dfcv/sample.hpp"

namespace dfcv {

// Kernel estimators of psi = integral of f^2, Gaussian kernel L = phi.
// "_d" variants keep the i = j diagonal terms, "_nd" ones drop them, "star"
// uses the convolved kernel L*L, "bullet" the twicing kernel 2L - L*L.
double psi_tilde_nd(const Sample& s, double g);
double psi_tilde_d(const Sample& s, double g);
double psi_tilde_nd_star(const Sample& s, double g);
double psi_tilde_d_star(const Sample& s, double g);
double psi_tilde_bullet_nd(const Sample& s, double g);

// Unbiased criterion for MISE(g) - psi:
// CV(g) = (ng)^{-1} R(L) + {n(n-1)}^{-1} sum_{i!=j} {(1-1/n)(L*L)_g - 2 L_g}.
double cv(const Sample& s, double g);

// Penalty W(g) = psi_bullet_nd - 2 psi_nd + psi_d_star, in [0, (ng)^{-1}R(L)].
double penalty_w(const Sample& s, double g);

struct PsiHatResult {
  double estimate;  // -min_g CV(g)
  double g_cv;
  CriterionCurve curve;
};

// Tuning-free estimate: 120-point log grid on [min_gap/3, range] plus golden
// refinement.  Rejects samples whose observations all coincide (CV is then
// unbounded below as g -> 0).
PsiHatResult psi_hat(const Sample& s);

}  // namespace dfcv
