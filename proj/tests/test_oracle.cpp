#include "dfcv/oracle.hpp"

#include <cmath>
#include <vector>

#include "dfcv/cv_core.hpp"
#include "dfcv/math.hpp"
#include "dfcv/quadrature.hpp"
#include "doctest.h"

using namespace dfcv;

namespace {

// phi_g * f evaluated directly from the atom/component closed form.
double smoothed_at(const GaussComb& phi, const NormalMixture& f, double g,
                   double x) {
  double v = 0.0;
  for (const auto& a : phi.atoms) {
    const double var = a.s * g * a.s * g;
    for (const auto& c : f.components()) {
      const double vv = var + c.sigma * c.sigma;
      v += a.c * c.w * kInvSqrt2Pi / std::sqrt(vv) *
           std::exp(-0.5 * (x - c.mu) * (x - c.mu) / vv);
    }
  }
  return v;
}

}  // namespace

TEST_CASE("r_functional: limits and quadrature") {
  const auto& f1 = catalog(1);
  const GaussComb l = kernel_l();
  CHECK(r_functional(l, f1, 1e-8) ==
        doctest::Approx(f1.true_psi()).epsilon(1e-9));
  CHECK(1e6 * r_functional(l, f1, 1e6) ==
        doctest::Approx(0.3989423).epsilon(1e-7));

  const auto& f6 = catalog(6);
  for (const GaussComb& phi : {kernel_l(), kernel_n(), kernel_m()}) {
    for (double g : {0.1, 1.0, 10.0}) {
      const double quad = integrate(
          [&](double x) { return smoothed_at(phi, f6, g, x) * f6.pdf(x); },
          f6.support_lo(), f6.support_hi(), 1e-12);
      CHECK(r_functional(phi, f6, g) == doctest::Approx(quad).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(r_functional(l, f1, 0.0), std::invalid_argument);
}

TEST_CASE("t_functional: limits and quadrature") {
  const auto& f1 = catalog(1);
  const GaussComb l = kernel_l();
  CHECK(t_functional(l, l, f1, 1e-8) ==
        doctest::Approx(f1.integral_f_cubed()).epsilon(1e-6));

  const GaussComb m = kernel_m();
  const GaussComb nk = kernel_n();
  const double g_inf = 1e6;
  CHECK(g_inf * g_inf * t_functional(m, m, f1, g_inf) ==
        doctest::Approx(m(0.0) * m(0.0)).epsilon(1e-6));
  CHECK(g_inf * g_inf * t_functional(m, nk, f1, g_inf) ==
        doctest::Approx(m(0.0) * nk(0.0)).epsilon(1e-6));

  const auto& f6 = catalog(6);
  for (double g : {0.1, 1.0, 10.0}) {
    const double quad = integrate(
        [&](double x) {
          return smoothed_at(m, f6, g, x) * smoothed_at(nk, f6, g, x) *
                 f6.pdf(x);
        },
        f6.support_lo(), f6.support_hi(), 1e-12);
    CHECK(t_functional(m, nk, f6, g) == doctest::Approx(quad).epsilon(1e-8));
  }
}

TEST_CASE("bias is minus the exact MISE, and MISE matches quadrature") {
  const auto& f = catalog(6);
  for (int n : {10, 200}) {
    for (double g : {0.05, 0.3, 2.0}) {
      const double b = exact_bias(f, n, g);
      const double mise = exact_mise(f, n, g);
      CHECK(std::abs(b + mise) < 1e-12 * std::max(1.0, std::abs(mise)));
    }
  }
  // independent decomposition: MISE = (ng)^{-1}R(L) - n^{-1} R_{N,g}
  //                                   + integral of (L_g*f - f)^2
  const int n = 50;
  const double g = 0.3;
  const GaussComb l = kernel_l();
  const double isb = integrate(
      [&](double x) {
        const double d = smoothed_at(l, f, g, x) - f.pdf(x);
        return d * d;
      },
      f.support_lo(), f.support_hi(), 1e-12);
  const double expect = roughness(l) / (n * g) -
                        r_functional(kernel_n(), f, g) / n + isb;
  CHECK(exact_mise(f, n, g) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("exact variance against Monte Carlo") {
  const auto& f = catalog(1);
  const int n = 20;
  const double g = 0.4;
  const int reps = 2000;
  Kahan sum, sumsq;
  for (int rep = 0; rep < reps; ++rep) {
    Sample s(f.sample(n, derive_seed(0x0DDC0FFE, 1, n, rep)));
    const double v = -cv(s, g);  // psi_check(g)
    sum.add(v);
    sumsq.add(v * v);
  }
  const double mean = sum.value() / reps;
  const double var = (sumsq.value() - reps * mean * mean) / (reps - 1.0);
  // SE of a sample variance ~ var * sqrt(2/(reps-1)) near normality; kurtosis
  // of psi_check inflates it a bit, so allow 3 of the kurtosis-free SE times 2.
  const double se = var * std::sqrt(2.0 / (reps - 1.0));
  CHECK(std::abs(var - exact_variance(f, n, g)) < 6.0 * se);

  const double mean_expect = f.true_psi() + exact_bias(f, n, g);
  CHECK(std::abs(mean - mean_expect) < 3.0 * std::sqrt(var / reps));
}

TEST_CASE("MSE consistency and large-g limit") {
  const auto& f = catalog(9);
  for (int n : {5, 100}) {
    for (double g : {0.02, 0.4, 3.0}) {
      const double b = exact_bias(f, n, g);
      const double v = exact_variance(f, n, g);
      const double mse = exact_mse(f, n, g);
      CHECK(std::abs(mse - (b * b + v)) < 1e-12 * std::max(1.0, mse));
    }
  }
  const double psi = catalog(1).true_psi();
  CHECK(exact_mse(catalog(1), 100, 1e6) ==
        doctest::Approx(psi * psi).epsilon(1e-5));
}

TEST_CASE("variance scaling: n V(g_n) approaches 4 Var f(X1)") {
  const auto& f = catalog(1);
  const double tau2 = f.integral_f_cubed() - f.true_psi() * f.true_psi();
  const int n = 100000;
  const double g = asymptotic_c0(f) * std::pow(n, -0.2);
  CHECK(n * exact_variance(f, n, g) == doctest::Approx(4.0 * tau2).epsilon(0.05));
}

TEST_CASE("small-g expansion of the twicing functional is quartic") {
  const auto& f = catalog(1);
  const double psi = f.true_psi();
  const double v1 = std::abs(r_functional(kernel_m(), f, 1e-3) - psi);
  const double v2 = std::abs(r_functional(kernel_m(), f, 1e-2) - psi);
  const double slope = (std::log(v2) - std::log(v1)) / std::log(10.0);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.0125));
}

TEST_CASE("bandwidth minimizers and the second-order constant") {
  CHECK(asymptotic_c0(catalog(1)) ==
        doctest::Approx(std::pow(4.0 / 3.0, 0.2)).epsilon(1e-12));

  NormalMixture scaled_normal({{1.0, 0.0, 2.5}});
  CHECK(asymptotic_c0(scaled_normal) ==
        doctest::Approx(2.5 * std::pow(4.0 / 3.0, 0.2)).epsilon(1e-10));

  const auto& f1 = catalog(1);
  const int big = 1000000;
  const double ns_rule = std::pow(4.0 / (3.0 * big), 0.2);
  CHECK(g_mise(f1, big) == doctest::Approx(ns_rule).epsilon(0.02));
  CHECK(g_mise(f1, big) * std::pow(big, 0.2) ==
        doctest::Approx(asymptotic_c0(f1)).epsilon(0.02));

  double prev_ng = 0.0;
  double prev_ratio = 2.0;
  for (int n : {100, 1000, 10000}) {
    const double gm = g_mse(f1, n);
    CHECK(gm * n > prev_ng);  // n g_MSE grows
    prev_ng = gm * n;
    const double ratio = gm / g_mise(f1, n);
    CHECK(ratio > 1.0);  // over this range the exact ratio sits above 1
    CHECK(ratio < prev_ratio);  // and decreases toward 1
    prev_ratio = ratio;
  }
}

TEST_CASE("exact error report invariants") {
  const auto& f = catalog(3);
  auto rep = exact_error_report(f, 100, 60);
  REQUIRE(rep.grid.size() == 60);
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    CHECK(std::abs(rep.mse[i] - (rep.bias[i] * rep.bias[i] + rep.variance[i])) <
          1e-12 * std::max(1.0, rep.mse[i]));
    CHECK(std::abs(rep.bias[i] + rep.mise[i]) <
          1e-12 * std::max(1.0, std::abs(rep.mise[i])));
    CHECK(rep.mse_min <= rep.mse[i] + 1e-15);
    CHECK(rep.mise_min <= rep.mise[i] + 1e-15);
  }
  CHECK(rep.g_mse > 0.0);
  CHECK(rep.g_mise > 0.0);
}
