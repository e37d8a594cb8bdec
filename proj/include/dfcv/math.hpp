#pragma once

// Scalar building blocks shared across the library: normal density values,
// probabilists' Hermite polynomials, compensated accumulation, seeding and
// a branch-free exp() for nonpositive arguments that compilers can keep
// inside vectorized loops.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace dfcv {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // phi(0)
inline constexpr double kSqrtPi = 1.77245385090551602730;

//! Standard normal density.
inline double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

//! Standard normal distribution function, via erfc for tail accuracy.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

//! exp(x) on x <= 0, accurate to a few ulp, flushed to zero once the result
//! would leave the normal double range (x < -708).  Straight-line arithmetic
//! only, so loops over arrays of exponents vectorize.
inline double exp_neg(double x) {
  constexpr double kInvLn2 = 1.44269504088896340736;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  constexpr double kShift = 6755399441055744.0;  // 1.5 * 2^52

  double kd = std::fma(x, kInvLn2, kShift);
  auto k = static_cast<std::int32_t>(std::bit_cast<std::uint64_t>(kd));
  kd -= kShift;
  double r = std::fma(-kd, kLn2Hi, x);
  r = std::fma(-kd, kLn2Lo, r);

  // exp(r) on |r| <= ln2/2 by a degree-11 Taylor polynomial (Estrin form).
  double r2 = r * r;
  double r4 = r2 * r2;
  double r8 = r4 * r4;
  double p01 = 1.0 + r;
  double p23 = std::fma(r, 1.0 / 6, 0.5);
  double p45 = std::fma(r, 1.0 / 120, 1.0 / 24);
  double p67 = std::fma(r, 1.0 / 5040, 1.0 / 720);
  double p89 = std::fma(r, 1.0 / 362880, 1.0 / 40320);
  double pab = std::fma(r, 1.0 / 39916800, 1.0 / 3628800);
  double q = std::fma(r2, p23, p01);
  double q1 = std::fma(r2, p67, p45);
  double q2 = std::fma(r2, pab, p89);
  double poly = std::fma(r8, q2, std::fma(r4, q1, q));

  double scale =
      std::bit_cast<double>(static_cast<std::uint64_t>(
                                static_cast<std::int64_t>(k) + 1023)
                            << 52);
  return x < -708.0 ? 0.0 : poly * scale;
}

//! Probabilists' Hermite polynomial He_r(x):
//! He_0 = 1, He_1 = x, He_{r+1} = x He_r - r He_{r-1}.
inline double hermite(int r, double x) {
  if (r == 0) return 1.0;
  double hm = 1.0, h = x;
  for (int k = 1; k < r; ++k) {
    double next = x * h - k * hm;
    hm = h;
    h = next;
  }
  return h;
}

//! Double factorial (2r-1)!! with the empty product equal to one.
inline double odd_double_factorial(int r) {
  double v = 1.0;
  for (int k = 3; k <= 2 * r - 1; k += 2) v *= k;
  return r >= 1 ? v : 1.0;
}

//! Kahan compensated accumulator.
struct Kahan {
  double sum = 0.0, carry = 0.0;
  void add(double v) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

//! SplitMix64 step, used for seed derivation only.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Replicate seed for cell (a, b, c) under a base seed.  Distinct cells get
//! decorrelated streams and the value is independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = splitmix64(base ^ 0x243f6a8885a308d3ULL);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  return s;
}

//! Deterministic random source.  The engine sequence is fixed by the
//! standard; normal deviates use Box-Muller rather than std::normal_distribution,
//! whose algorithm is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  //! Uniform on [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1p-53; }

  //! Standard normal deviate (two uniforms per draw).
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace dfcv
