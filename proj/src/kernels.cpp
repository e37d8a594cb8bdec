#include "dfcv/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfcv/math.hpp"

namespace dfcv {

double GaussComb::operator()(double x) const {
  double v = 0.0;
  for (const auto& a : atoms) v += a.c * phi(x / a.s) / a.s;
  return v;
}

double GaussComb::deriv(double x, int r) const {
  if (r < 0) throw std::invalid_argument("deriv: negative order");
  double sign = (r % 2 == 0) ? 1.0 : -1.0;
  double v = 0.0;
  for (const auto& a : atoms) {
    double u = x / a.s;
    v += a.c * sign * hermite(r, u) * phi(u) / std::pow(a.s, r + 1);
  }
  return v;
}

double GaussComb::integral() const {
  double v = 0.0;
  for (const auto& a : atoms) v += a.c;
  return v;
}

GaussComb kernel_l() { return {{{1.0, 1.0}}}; }

GaussComb kernel_n() { return {{{1.0, kSqrt2}}}; }

GaussComb kernel_m() { return {{{2.0, 1.0}, {-1.0, kSqrt2}}}; }

GaussComb scaled(const GaussComb& k, double g) {
  if (!(g > 0)) throw std::invalid_argument("scaled: bandwidth must be > 0");
  GaussComb out;
  out.atoms.reserve(k.atoms.size());
  for (const auto& a : k.atoms) out.atoms.push_back({a.c, a.s * g});
  return out;
}

GaussComb convolve(const GaussComb& a, const GaussComb& b) {
  GaussComb out;
  out.atoms.reserve(a.atoms.size() * b.atoms.size());
  for (const auto& p : a.atoms)
    for (const auto& q : b.atoms)
      out.atoms.push_back({p.c * q.c, std::hypot(p.s, q.s)});
  return out;
}

GaussComb pointwise_product(const GaussComb& a, const GaussComb& b) {
  GaussComb out;
  out.atoms.reserve(a.atoms.size() * b.atoms.size());
  for (const auto& p : a.atoms)
    for (const auto& q : b.atoms) {
      double pooled = std::hypot(p.s, q.s);
      double c = p.c * q.c * kInvSqrt2Pi / pooled;
      out.atoms.push_back({c, p.s * q.s / pooled});
    }
  return out;
}

double roughness(const GaussComb& k, int r) {
  // Integral of K^{(r)} G^{(r)} for atoms at scales s1, s2 reduces by parts to
  // (2r-1)!! phi(0) / (s1^2+s2^2)^{(2r+1)/2}.
  if (r < 0) throw std::invalid_argument("roughness: negative order");
  double dfact = odd_double_factorial(r);
  double v = 0.0;
  for (const auto& p : k.atoms)
    for (const auto& q : k.atoms) {
      double pooled2 = p.s * p.s + q.s * q.s;
      v += p.c * q.c * dfact * kInvSqrt2Pi /
           std::pow(pooled2, (2 * r + 1) / 2.0);
    }
  return v;
}

double moment(const GaussComb& k, int ell) {
  if (ell < 0) throw std::invalid_argument("moment: negative order");
  if (ell % 2 == 1) return 0.0;
  double dfact = odd_double_factorial(ell / 2);  // (ell-1)!! for even ell
  double v = 0.0;
  for (const auto& a : k.atoms) v += a.c * dfact * std::pow(a.s, ell);
  return v;
}

namespace {

// I0 power series: sum over k of (x^2/4)^k / (k!)^2.
double i0_series(double x) {
  double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Asymptotic correction factor S(x) with I0(x) = e^x / sqrt(2 pi x) * S(x).
// Terms are summed until they stop decreasing (optimal truncation).
double i0_asymptotic_factor(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 60; ++k) {
    double next = term * (2 * k + 1) * (2 * k + 1) / (8.0 * x * (k + 1));
    if (next >= term || next < sum * 1e-18) break;
    term = next;
    sum += term;
  }
  return sum;
}

constexpr double kI0Switch = 15.0;

}  // namespace

double bessel_i0(double x) {
  x = std::abs(x);
  if (x <= kI0Switch) return i0_series(x);
  double lg = x - 0.5 * std::log(kTwoPi * x);
  if (lg > 709.0) return std::numeric_limits<double>::infinity();
  return std::exp(lg) * i0_asymptotic_factor(x);
}

double log_bessel_i0(double x) {
  x = std::abs(x);
  if (x <= kI0Switch) return std::log(i0_series(x));
  return x - 0.5 * std::log(kTwoPi * x) + std::log(i0_asymptotic_factor(x));
}

double vm_kernel(double t, double nu) {
  if (!(nu > 0)) throw std::invalid_argument("vm_kernel: nu must be > 0");
  return std::exp(nu * std::cos(t) - log_bessel_i0(nu)) / kTwoPi;
}

double vm_conv(double delta, double nu) {
  if (!(nu > 0)) throw std::invalid_argument("vm_conv: nu must be > 0");
  double c = std::abs(std::cos(0.5 * delta));
  return std::exp(log_bessel_i0(2.0 * nu * c) - 2.0 * log_bessel_i0(nu)) /
         kTwoPi;
}

}  // namespace dfcv
