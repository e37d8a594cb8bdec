#pragma once

#include "dfcv/sample.hpp"

namespace dfcv {

// Staging record for the two plug-in benchmark estimators of psi = int f^2.
// Both run the same ladder -- a normal-reference start, a kernel estimate of
// psi_2 = int f'' f at a pilot bandwidth, and a final diagonals-in estimate
// of psi -- so one trace type serves both.
struct PlugInTrace {
  double sigma_hat = 0.0;  // robust scale min(sd, iqr/1.349)
  double psi4_ns = 0.0;    // normal-scale psi_4 feeding the pilot stage
  double g1 = 0.0;         // pilot bandwidth for the psi_2 estimate
  double psi2_hat = 0.0;   // diagonals-in kernel estimate of psi_2
  double g2 = 0.0;         // final bandwidth of the diagonals-in psi estimate
  double estimate = 0.0;
  // psi2_hat >= 0 would break the stage-2 bandwidth formula.  For the
  // Gaussian kernel this cannot happen (-L'' is positive definite, so the
  // diagonals-in psi_2 estimate is strictly negative); the flag guards a
  // future change of kernel.
  bool psi2_fallback = false;
  // Solve-the-equation only: no sign change over the search bracket, so the
  // direct plug-in bandwidth was used instead.
  bool solve_fallback = false;
};

struct PlugInResult {
  double estimate = 0.0;
  PlugInTrace trace;
};

// psi_r = int f^{(r)} f for f = N(0, sigma^2), r even:
//   (-1)^{r/2} r! / ((2 sigma)^{r+1} (r/2)! sqrt(pi)),
// the normal-reference constant of the plug-in literature (Wand & Jones
// 1995, section 3.5).  Rejects odd or negative r and sigma <= 0.
double normal_scale_psi(int r, double sigma);

// Diagonals-in kernel estimate of psi_2 at pilot bandwidth g:
//   n^{-2} sum_{i,j} L_g''(X_i - X_j),  L = phi.
// Strictly negative for any sample (positive definiteness of -L'').
double psi2_kernel(const Sample& s, double g);

// Two-stage direct plug-in estimator of psi (Jones & Sheather 1991).
// Stage 0: psi_4 from a normal reference at the robust scale; stage 1:
// psi_2 estimated with the bias-cancelling pilot g1 = {2 phi(0) /
// (psi_4 n)}^{1/5}; stage 2: the diagonals-in estimate psi_tilde_D(g2) at
// g2 = {-2 phi(0) / (psi2_hat n)}^{1/3}.  The 1/(r+3) exponents make the
// n^{-1} g^{-(r+1)} diagonal bias cancel the g^2 smoothing bias.
PlugInResult psi_js(const Sample& s);

// Two-stage solve-the-equation estimator of psi (Sheather, Hettmansperger
// & Donald 1994).  The stage-2 relation g = {-2 phi(0) / (psi2(gamma) n)}^{1/3}
// is solved for g with the pilot written as a function of g,
//   gamma(g) = (2 sigma^2 g^3 / 3)^{1/5},
// obtained by eliminating n between the two bias-cancelling bandwidth rules
// and normal-referencing the ratio psi_2/psi_4 = -2 sigma^2 / 3.  Root by
// bisection on log g over [g_JS/50, 50 g_JS]; no sign change falls back to
// the direct plug-in bandwidth with solve_fallback set.
PlugInResult psi_shd(const Sample& s);

}  // namespace dfcv
