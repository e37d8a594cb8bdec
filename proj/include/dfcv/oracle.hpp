#pragma once

#include <vector>

#include "dfcv/kernels.hpp"
#include "dfcv/mixtures.hpp"

namespace dfcv {

// Exact finite-sample error theory for the fixed-bandwidth estimator
// psi_check(g) = -(ng)^{-1} R(L) + U_{M_g} + n^{-1} U_{N_g}, with the twicing
// kernel M = 2L - L*L and N = L*L.  Everything reduces to the smoothed
// quadratic functionals R and T below, which have closed forms for
// Gaussian-comb kernels and normal-mixture densities.

// R_{phi,g}(f) = integral of (phi_g * f) f.
double r_functional(const GaussComb& phi, const NormalMixture& f, double g);

// T_{phi,chi,g}(f) = integral of (phi_g * f)(chi_g * f) f, via two successive
// Gaussian product reductions.
double t_functional(const GaussComb& phi, const GaussComb& chi,
                    const NormalMixture& f, double g);

double exact_bias(const NormalMixture& f, int n, double g);
double exact_variance(const NormalMixture& f, int n, double g);
double exact_mse(const NormalMixture& f, int n, double g);
double exact_mise(const NormalMixture& f, int n, double g);

// Minimizers of the exact curves (log grid plus golden refinement); throw a
// runtime error when the minimum sits on the search boundary.
double g_mse(const NormalMixture& f, int n);
double g_mise(const NormalMixture& f, int n);

// c0(f, L) = {R(L) (nu!)^2 / (2 nu R(f^(nu)) m_nu(L)^2)}^{1/(2nu+1)} at
// nu = 2, so g_MISE ~ c0 n^{-1/5}.
double asymptotic_c0(const NormalMixture& f);

struct ExactErrorReport {
  int n = 0;
  std::vector<double> grid;
  std::vector<double> bias;
  std::vector<double> variance;
  std::vector<double> mse;
  std::vector<double> mise;
  double g_mse = 0.0;
  double mse_min = 0.0;
  double g_mise = 0.0;
  double mise_min = 0.0;
};

ExactErrorReport exact_error_report(const NormalMixture& f, int n,
                                    int grid_points = 200);

}  // namespace dfcv
