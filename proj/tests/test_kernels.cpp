#include "dfcv/kernels.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "dfcv/math.hpp"
#include "dfcv/quadrature.hpp"
#include "doctest.h"

using namespace dfcv;

TEST_CASE("exp_neg tracks std::exp over the nonpositive range") {
  Rng rng(1234);
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    double x = -708.0 * rng.uniform();
    double got = exp_neg(x);
    double want = std::exp(x);
    worst = std::max(worst, std::abs(got - want) / want);
  }
  CHECK(worst < 5e-14);
  CHECK(exp_neg(0.0) == 1.0);
  CHECK(exp_neg(-708.5) == 0.0);
  CHECK(exp_neg(-1e18) == 0.0);
  CHECK(std::isfinite(exp_neg(-4.0)));
}

TEST_CASE("standard combs and scaling") {
  auto l = kernel_l();
  CHECK(l(0.3) == doctest::Approx(phi(0.3)).epsilon(1e-15));

  auto lg = scaled(l, 0.25);
  CHECK(lg(0.1) == doctest::Approx(phi(0.1 / 0.25) / 0.25).epsilon(1e-15));

  auto m = kernel_m();
  CHECK(m.integral() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kernel_n().integral() == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(scaled(l, 0.0), std::invalid_argument);
}

TEST_CASE("convolution matches the direct integral") {
  auto n = kernel_n();  // L * L
  double direct = integrate([](double y) { return phi(y) * phi(1.0 - y); },
                            -40.0, 40.0, 1e-12);
  CHECK(n(1.0) == doctest::Approx(direct).epsilon(1e-10));

  // An asymmetricly weighted comb convolved with itself.
  GaussComb k{{{0.7, 0.5}, {0.3, 2.0}}};
  auto kk = convolve(k, k);
  double direct2 = integrate([&](double y) { return k(y) * k(0.8 - y); },
                             -60.0, 60.0, 1e-12);
  CHECK(kk(0.8) == doctest::Approx(direct2).epsilon(1e-10));
  CHECK(kk.integral() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pointwise product is exact") {
  auto l = kernel_l();
  auto sq = pointwise_product(l, l);
  for (double x : {0.0, 0.4, 1.3, -2.2}) {
    CHECK(sq(x) == doctest::Approx(phi(x) * phi(x)).epsilon(1e-12));
  }
  CHECK(sq.integral() == doctest::Approx(1.0 / (2.0 * kSqrtPi)).epsilon(1e-14));

  auto m = kernel_m();
  auto mn = pointwise_product(m, kernel_n());
  for (double x : {0.0, 0.7, -1.9}) {
    CHECK(mn(x) == doctest::Approx(m(x) * kernel_n()(x)).epsilon(1e-12));
  }
}

TEST_CASE("roughness against quadrature and closed forms") {
  auto l = kernel_l();
  CHECK(roughness(l, 0) ==
        doctest::Approx(1.0 / (2.0 * kSqrtPi)).epsilon(1e-14));
  CHECK(roughness(l, 1) == doctest::Approx(0.141047395886939).epsilon(1e-12));
  CHECK(roughness(l, 2) ==
        doctest::Approx(3.0 / (8.0 * kSqrtPi)).epsilon(1e-14));

  auto m = kernel_m();
  for (int r = 0; r <= 3; ++r) {
    double quad = integrate(
        [&](double x) {
          double d = m.deriv(x, r);
          return d * d;
        },
        -30.0, 30.0, 1e-12);
    CHECK(roughness(m, r) == doctest::Approx(quad).epsilon(1e-9));
  }
}

TEST_CASE("moments and the twicing cancellation") {
  auto l = kernel_l();
  auto m = kernel_m();
  CHECK(moment(l, 0) == doctest::Approx(1.0));
  CHECK(moment(l, 2) == doctest::Approx(1.0));
  CHECK(moment(l, 4) == doctest::Approx(3.0));
  CHECK(moment(l, 3) == 0.0);
  CHECK(moment(m, 2) == doctest::Approx(0.0));
  // m_4(M) = -4! m_2(L)^2 / (2!)^2
  CHECK(moment(m, 4) == doctest::Approx(-6.0));
}

TEST_CASE("derivatives match finite differences") {
  auto m = kernel_m();
  double h = 1e-3;
  for (double x : {0.2, 1.1, -0.8}) {
    for (int r = 1; r <= 4; ++r) {
      auto lower = [&](double y) { return m.deriv(y, r - 1); };
      double fd = (lower(x + h) - lower(x - h)) / (2.0 * h);
      CHECK(m.deriv(x, r) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("twicing kernel characteristic function stays within [0, 1]") {
  auto cf = [](const GaussComb& k, double t) {
    double v = 0.0;
    for (const auto& a : k.atoms) v += a.c * std::exp(-0.5 * a.s * a.s * t * t);
    return v;
  };
  auto l = kernel_l();
  auto m = kernel_m();
  for (double t = 0.0; t <= 12.0; t += 0.05) {
    double u = cf(l, t);
    CHECK(cf(m, t) == doctest::Approx((2.0 - u) * u).epsilon(1e-13));
    CHECK(cf(m, t) <= 1.0 + 1e-15);
    CHECK(cf(m, t) >= 0.0 - 1e-15);
  }
}

TEST_CASE("bessel_i0 against a reference implementation") {
  for (double x : {0.0, 0.1, 1.0, 5.0, 14.9, 15.1, 30.0, 120.0, 700.0}) {
    double ref = boost::math::cyl_bessel_i(0.0, x);
    CHECK(bessel_i0(x) == doctest::Approx(ref).epsilon(5e-13));
  }
  CHECK(bessel_i0(-3.0) == bessel_i0(3.0));

  // Series and asymptotic branches agree where they meet (one ulp apart).
  double lo = bessel_i0(15.0);
  double hi = bessel_i0(std::nextafter(15.0, 16.0));
  CHECK(lo == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("log_bessel_i0 extends beyond the overflow point") {
  for (double x : {0.5, 3.0, 10.0, 50.0, 300.0}) {
    CHECK(log_bessel_i0(x) ==
          doctest::Approx(std::log(bessel_i0(x))).epsilon(1e-13));
  }
  double big = log_bessel_i0(5000.0);
  CHECK(std::isfinite(big));
  // Leading behaviour x - log(sqrt(2 pi x)).
  CHECK(big == doctest::Approx(5000.0 - 0.5 * std::log(kTwoPi * 5000.0))
                   .epsilon(1e-4));
}

TEST_CASE("von Mises kernel normalizes and convolves correctly") {
  for (double nu : {0.5, 2.0, 20.0}) {
    double mass =
        integrate([&](double t) { return vm_kernel(t, nu); }, 0.0, kTwoPi,
                  1e-12);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

    for (double delta : {0.0, 1.0, 2.5}) {
      double direct = integrate(
          [&](double t) { return vm_kernel(t, nu) * vm_kernel(t + delta, nu); },
          0.0, kTwoPi, 1e-12);
      CHECK(vm_conv(delta, nu) == doctest::Approx(direct).epsilon(1e-8));
      CHECK(vm_conv(-delta, nu) == vm_conv(delta, nu));
    }
  }

  // Large concentrations stay in range via the log form.
  double v = vm_conv(0.3, 2000.0);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
}
