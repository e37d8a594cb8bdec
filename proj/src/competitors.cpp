#include "dfcv/competitors.hpp"

#include <cmath>
#include <stdexcept>

#include "dfcv/cv_core.hpp"
#include "dfcv/math.hpp"

namespace dfcv {

namespace {

void check_sample(const Sample& s) {
  if (s.degenerate()) {
    throw std::invalid_argument(
        "competitors: all observations coincide; plug-in stages need a "
        "positive scale");
  }
}

// Robust scale for the normal-reference stages.  iqr can be zero when more
// than half the observations tie even though the sample is not degenerate;
// fall back to the sd, which non-degeneracy keeps positive.
double reference_scale(const Sample& s) {
  const double sig = s.robust_sigma();
  return sig > 0.0 ? sig : s.sd();
}

}  // namespace

double normal_scale_psi(int r, double sigma) {
  if (r < 0 || r % 2 != 0) {
    throw std::invalid_argument("normal_scale_psi: order must be even and >= 0");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("normal_scale_psi: scale must be > 0");
  }
  const double sign = (r / 2) % 2 == 0 ? 1.0 : -1.0;
  const double ratio =
      std::tgamma(r + 1.0) / std::tgamma(r / 2 + 1.0);  // r! / (r/2)!
  return sign * ratio / (std::pow(2.0 * sigma, r + 1.0) * kSqrtPi);
}

double psi2_kernel(const Sample& s, double g) {
  check_sample(s);
  if (!(g > 0.0)) throw std::invalid_argument("psi2_kernel: bandwidth must be > 0");
  const double n = s.n();
  // L_g''(d) = He_2(d/g) phi(d/g) / g^3, with He_2(0) = -1 on the diagonal.
  const double sum = 2.0 * hermite_pair_sum(s, g, 2) - n;
  return kInvSqrt2Pi * sum / (g * g * g * n * n);
}

PlugInResult psi_js(const Sample& s) {
  check_sample(s);
  const double n = s.n();

  PlugInTrace t;
  t.sigma_hat = reference_scale(s);
  t.psi4_ns = normal_scale_psi(4, t.sigma_hat);  // 3 / (8 sqrt(pi) sigma^5)

  // Bias-cancelling pilot for psi_2: g = {-2 L''(0) / (psi_4 n)}^{1/5} with
  // L''(0) = -phi(0)  [Jones & Sheather 1991].
  t.g1 = std::pow(2.0 * kInvSqrt2Pi / (t.psi4_ns * n), 0.2);
  t.psi2_hat = psi2_kernel(s, t.g1);
  if (t.psi2_hat >= 0.0) {  // unreachable for a Gaussian kernel; see header
    t.psi2_hat = normal_scale_psi(2, t.sigma_hat);
    t.psi2_fallback = true;
  }

  // Final stage, r = 0: g = {-2 L(0) / (psi_2 n)}^{1/3}.
  t.g2 = std::cbrt(-2.0 * kInvSqrt2Pi / (t.psi2_hat * n));
  t.estimate = psi_tilde_d(s, t.g2);
  return {t.estimate, t};
}

PlugInResult psi_shd(const Sample& s) {
  check_sample(s);
  const double n = s.n();

  PlugInTrace t;
  t.sigma_hat = reference_scale(s);
  t.psi4_ns = normal_scale_psi(4, t.sigma_hat);

  // Pilot-as-a-function-of-g: eliminate n between the two bandwidth rules
  // gamma = {2 phi(0)/(psi_4 n)}^{1/5} and g = {-2 phi(0)/(psi_2 n)}^{1/3},
  // then replace psi_2/psi_4 by its normal-scale value -2 sigma^2/3:
  //   gamma(g) = {-psi_2 g^3 / psi_4}^{1/5} = (2 sigma^2 g^3 / 3)^{1/5}.
  const double sig2 = t.sigma_hat * t.sigma_hat;
  auto gamma_of = [sig2](double g) {
    return std::pow(2.0 * sig2 * g * g * g / 3.0, 0.2);
  };
  // Fixed points of g = {-2 phi(0)/(psi2(gamma(g)) n)}^{1/3} are zeros of
  // the continuous residual below; it tends to -2 phi(0) as g -> 0 and to
  // +infinity as g grows, so a wide bracket almost surely straddles a root.
  auto resid = [&](double g) {
    return -n * g * g * g * psi2_kernel(s, gamma_of(g)) - 2.0 * kInvSqrt2Pi;
  };

  const double g_js = psi_js(s).trace.g2;
  double lo = std::log(g_js / 50.0);
  double hi = std::log(50.0 * g_js);
  const double f_lo = resid(std::exp(lo));
  const double f_hi = resid(std::exp(hi));
  if (!(f_lo < 0.0) || !(f_hi > 0.0)) {
    t.g1 = gamma_of(g_js);
    t.psi2_hat = psi2_kernel(s, t.g1);
    t.g2 = g_js;
    t.solve_fallback = true;
    t.estimate = psi_tilde_d(s, t.g2);
    return {t.estimate, t};
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (resid(std::exp(mid)) < 0.0 ? lo : hi) = mid;
  }

  t.g2 = std::exp(0.5 * (lo + hi));
  t.g1 = gamma_of(t.g2);
  t.psi2_hat = psi2_kernel(s, t.g1);
  t.estimate = psi_tilde_d(s, t.g2);
  return {t.estimate, t};
}

}  // namespace dfcv
