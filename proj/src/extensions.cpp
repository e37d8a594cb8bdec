#include "dfcv/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "dfcv/kernels.hpp"
#include "dfcv/math.hpp"

namespace dfcv {

namespace {

constexpr int kGridPoints = 120;
constexpr double kRelTol = 1e-6;

// Sum of exp_neg(scale * a[k]) over the whole array, blocked so the
// elementwise exponential vectorizes; Kahan across block totals.
double exp_neg_array_sum(const std::vector<double>& a, double scale) {
  constexpr std::size_t kBlk = 256;
  double buf[kBlk];
  Kahan total;
  const std::size_t m = a.size();
  for (std::size_t base = 0; base < m; base += kBlk) {
    const std::size_t len = std::min(kBlk, m - base);
    for (std::size_t k = 0; k < len; ++k) buf[k] = exp_neg(scale * a[base + k]);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t k = 0;
    for (; k + 4 <= len; k += 4) {
      s0 += buf[k];
      s1 += buf[k + 1];
      s2 += buf[k + 2];
      s3 += buf[k + 3];
    }
    for (; k < len; ++k) s0 += buf[k];
    total.add((s0 + s1) + (s2 + s3));
  }
  return total.value();
}

double reduce_angle(double a) {
  double t = std::fmod(a, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;  // fmod rounding can land exactly on 2pi
  return t;
}

void check_order(int r, const char* where) {
  if (r != 1 && r != 2) {
    throw std::invalid_argument(std::string(where) +
                                ": unsupported derivative order r=" +
                                std::to_string(r) + " (must be 1 or 2)");
  }
}

void check_bandwidth(double g, const char* where) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw std::invalid_argument(std::string(where) +
                                ": bandwidth must be positive and finite");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Entropy.

EntropyResult entropy_hat(const Sample& s) {
  if (s.degenerate()) {
    throw std::runtime_error(
        "entropy_hat: all observations equal; the leave-one-out likelihood "
        "has no maximum");
  }
  const int n = s.n();
  auto criterion = [&](double g) {
    const auto loo = loo_exp_sums(s, g);
    Kahan acc;
    for (double v : loo) {
      if (v <= 0.0) return std::numeric_limits<double>::infinity();
      acc.add(std::log(v));
    }
    // f_i(X_i; g) = loo[i] * phi(0) / ((n-1) g); fold the common factor in
    // once instead of per term.
    const double log_norm = std::log(kInvSqrt2Pi / ((n - 1.0) * g));
    return -(acc.value() / n + log_norm);
  };
  auto curve =
      minimize_on_log_grid(criterion, s.min_gap() / 3.0, s.range(),
                           kGridPoints, kRelTol);
  return {curve.min_value, curve.minimizer, std::move(curve)};
}

// ---------------------------------------------------------------------------
// Circular psi.

CircularSample::CircularSample(std::vector<double> angles) {
  if (angles.size() < 2) {
    throw std::invalid_argument("CircularSample: need at least 2 angles");
  }
  for (double a : angles) {
    if (!std::isfinite(a)) {
      throw std::invalid_argument("CircularSample: angles must be finite");
    }
  }
  theta_.reserve(angles.size());
  for (double a : angles) theta_.push_back(reduce_angle(a));

  const std::size_t n = theta_.size();
  const std::size_t pairs = n * (n - 1) / 2;
  cos_m1_.reserve(pairs);
  cos_half_.reserve(pairs);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // One cosine per pair: cos d = 2 cos^2(d/2) - 1.
      const double ch = std::cos(0.5 * (theta_[j] - theta_[i]));
      cos_m1_.push_back(2.0 * (ch * ch - 1.0));  // cos d - 1, in [-2, 0]
      cos_half_.push_back(std::abs(ch));
    }
  }
}

double circular_squared_integral(const CircularSample& s, double nu) {
  check_bandwidth(nu, "circular_squared_integral");
  const double n = s.n();
  const double lg_i0 = log_bessel_i0(nu);
  Kahan sc;
  for (double c : s.pair_cos_half()) {
    sc.add(std::exp(log_bessel_i0(2.0 * nu * c) - 2.0 * lg_i0));
  }
  const double diag = std::exp(log_bessel_i0(2.0 * nu) - 2.0 * lg_i0);
  return (n * diag + 2.0 * sc.value()) / (kTwoPi * n * n);
}

double circular_cv(const CircularSample& s, double nu) {
  check_bandwidth(nu, "circular_cv");
  const double n = s.n();
  // Leave-one-out mean: K_nu(d) = exp(nu (cos d - 1)) * exp(nu - log I0(nu)) / 2pi,
  // so the shifted exponent stays in exp_neg territory for any nu.
  const double k_norm = std::exp(nu - log_bessel_i0(nu)) / kTwoPi;
  const double sk = exp_neg_array_sum(s.pair_cos_m1(), nu);
  // Plain 1/(n-1) leave-one-out average: together with the diagonal-inclusive
  // squared integral this gives E CV(nu) = MISE(nu) - psi with no extra
  // finite-n correction (both pieces are exactly unbiased).
  const double loo_term = 4.0 * sk * k_norm / (n * (n - 1.0));
  return circular_squared_integral(s, nu) - loo_term;
}

CircularPsiResult circular_psi_hat(const CircularSample& s) {
  // nu is an inverse squared bandwidth, so the search window widens with n.
  const double lo = 0.1;
  const double hi = static_cast<double>(s.n());
  auto criterion = [&](double nu) { return circular_cv(s, nu); };
  auto curve = minimize_on_log_grid(criterion, lo, hi, 60, kRelTol);
  return {-curve.min_value, curve.minimizer, std::move(curve)};
}

std::vector<double> sample_von_mises(int n, double mu, double kappa,
                                     std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_von_mises: need n >= 1");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("sample_von_mises: kappa must be >= 0");
  }
  Rng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(n));
  if (kappa < 1e-12) {
    for (auto& t : out) t = reduce_angle(mu + kTwoPi * rng.uniform());
    return out;
  }
  // Best & Fisher (1979) wrapped-Cauchy envelope rejection sampler.
  const double a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
  const double r = (1.0 + b * b) / (2.0 * b);
  for (auto& t : out) {
    double f;
    for (;;) {
      const double z = std::cos(kPi * rng.uniform());
      f = (1.0 + r * z) / (r + z);
      const double c = kappa * (r - f);
      const double u2 = rng.uniform();
      if (c * (2.0 - c) - u2 > 0.0) break;
      if (std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    const double sign = rng.uniform() > 0.5 ? 1.0 : -1.0;
    t = reduce_angle(mu + sign * std::acos(std::clamp(f, -1.0, 1.0)));
  }
  return out;
}

std::vector<double> sample_circular_uniform(int n, std::uint64_t seed) {
  return sample_von_mises(n, 0.0, 0.0, seed);
}

// ---------------------------------------------------------------------------
// Integrated squared density derivatives.

double kde_deriv_roughness(const Sample& s, int r, double g) {
  check_order(r, "kde_deriv_roughness");
  check_bandwidth(g, "kde_deriv_roughness");
  const double n = s.n();
  const double sc = g * kSqrt2;  // (L*L)_g is the Gaussian at scale g sqrt(2)
  const double off = hermite_pair_sum(s, sc, 2 * r);
  const double diag = hermite(2 * r, 0.0);  // He_2(0) = -1, He_4(0) = 3
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  return sign * (n * diag + 2.0 * off) * kInvSqrt2Pi /
         (std::pow(sc, 2 * r + 1) * n * n);
}

double cv_r(const Sample& s, int r, double g) {
  check_order(r, "cv_r");
  check_bandwidth(g, "cv_r");
  const double n = s.n();
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  const double off = hermite_pair_sum(s, g, 2 * r);
  const double loo = sign * 4.0 * off * kInvSqrt2Pi /
                     (std::pow(g, 2 * r + 1) * n * (n - 1.0));
  return kde_deriv_roughness(s, r, g) - loo;
}

ThetaResult theta_r_hat(const Sample& s, int r) {
  check_order(r, "theta_r_hat");
  if (s.degenerate()) {
    throw std::runtime_error(
        "theta_r_hat: all observations equal; CV_r has no minimum");
  }
  auto criterion = [&](double g) { return cv_r(s, r, g); };
  auto curve =
      minimize_on_log_grid(criterion, s.min_gap() / 3.0, s.range(),
                           kGridPoints, kRelTol);
  return {-curve.min_value, curve.minimizer, std::move(curve)};
}

}  // namespace dfcv
