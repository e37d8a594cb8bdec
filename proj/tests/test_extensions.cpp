#include "dfcv/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dfcv/kernels.hpp"
#include "dfcv/math.hpp"
#include "dfcv/mixtures.hpp"
#include "dfcv/quadrature.hpp"
#include "doctest.h"

using namespace dfcv;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// Leave-one-out log-likelihood criterion rebuilt from scratch (direct double
// loop, std::exp), independent of the pair-sum machinery under test.
double entropy_criterion_direct(const std::vector<double>& x, double g) {
  const int n = static_cast<int>(x.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double fi = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      fi += phi((x[i] - x[j]) / g);
    }
    total += std::log(fi / ((n - 1.0) * g));
  }
  return -total / n;
}

// Kernel density derivative f_hat^{(r)}(t; g) assembled test-side.
double kde_deriv_at(const std::vector<double>& x, double g, int r, double t) {
  double acc = 0.0;
  for (double xi : x) {
    const double u = (t - xi) / g;
    acc += hermite(r, u) * phi(u);
  }
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  return sign * acc / (x.size() * std::pow(g, r + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Entropy.

TEST_CASE("entropy criterion matches a direct reimplementation") {
  auto x = catalog(6).sample(80, derive_seed(0xE0, 80, 0, 0));
  Sample s(x);
  auto res = entropy_hat(s);
  // Spot-check a spread of grid points, including both curve ends.
  for (std::size_t idx : {std::size_t{0}, std::size_t{30}, std::size_t{60},
                          std::size_t{90}, res.curve.grid.size() - 1}) {
    const double g = res.curve.grid[idx];
    const double direct = entropy_criterion_direct(x, g);
    if (std::isfinite(res.curve.values[idx])) {
      CHECK(res.curve.values[idx] == doctest::Approx(direct).epsilon(1e-10));
    }
  }
  CHECK(res.estimate == doctest::Approx(entropy_criterion_direct(x, res.g_lcv))
                            .epsilon(1e-10));
}

TEST_CASE("entropy recovers the normal closed form at n = 1000") {
  const double truth = 0.5 * std::log(kTwoPi * std::exp(1.0));  // 1.4189385
  std::vector<double> est;
  for (int rep = 0; rep < 100; ++rep) {
    Sample s(catalog(1).sample(1000, derive_seed(0xE1, rep, 0, 0)));
    est.push_back(entropy_hat(s).estimate);
  }
  CHECK(median(est) == doctest::Approx(truth).epsilon(0.05 / truth));
}

TEST_CASE("entropy is exactly location invariant, scale adds log|a|") {
  // Values on a 1/64 lattice keep x + 3 exact, so the shifted sample has
  // bitwise-identical differences and hence a bitwise-identical criterion.
  auto raw = catalog(6).sample(40, derive_seed(0xE2, 0, 0, 0));
  std::vector<double> x, shifted, scaled;
  for (double v : raw) x.push_back(std::round(v * 64.0) / 64.0);
  for (double v : x) shifted.push_back(v + 3.0);
  for (double v : x) scaled.push_back(-2.5 * v);

  auto base = entropy_hat(Sample(x));
  auto loc = entropy_hat(Sample(shifted));
  CHECK(loc.estimate == base.estimate);
  CHECK(loc.g_lcv == base.g_lcv);

  auto sc = entropy_hat(Sample(scaled));
  CHECK(sc.estimate ==
        doctest::Approx(base.estimate + std::log(2.5)).epsilon(1e-6));
  CHECK(sc.g_lcv == doctest::Approx(2.5 * base.g_lcv).epsilon(1e-3));
}

TEST_CASE("entropy rejects a degenerate sample") {
  Sample tied({1.5, 1.5, 1.5});
  CHECK_THROWS_AS(entropy_hat(tied), std::runtime_error);
}

// ---------------------------------------------------------------------------
// Circular psi.

TEST_CASE("circular sample validation and angle reduction") {
  CHECK_THROWS_AS(CircularSample({0.3}), std::invalid_argument);
  CHECK_THROWS_AS(CircularSample({0.3, std::nan("")}), std::invalid_argument);

  CircularSample s({-1.0, 7.0, kTwoPi, 2.5});
  for (double a : s.angles()) {
    CHECK(a >= 0.0);
    CHECK(a < kTwoPi);
  }
  CHECK(s.angles()[0] == doctest::Approx(kTwoPi - 1.0));
  CHECK(s.angles()[1] == doctest::Approx(7.0 - kTwoPi));
  CHECK(s.angles()[2] == 0.0);
}

TEST_CASE("circular CV equals its naive von Mises assembly") {
  auto ang = sample_von_mises(25, 1.1, 1.5, derive_seed(0xC0, 0, 0, 0));
  CircularSample s(ang);
  const int n = s.n();
  for (double nu : {0.7, 12.0}) {
    double sq = 0.0, loo = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        sq += vm_conv(ang[i] - ang[j], nu);
        if (j != i) loo += vm_kernel(ang[i] - ang[j], nu);
      }
    }
    const double naive = sq / (n * n) - 2.0 * loo / (n * (n - 1.0));
    CHECK(circular_cv(s, nu) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("circular squared integral matches trapezoid quadrature") {
  auto ang = sample_von_mises(40, 0.4, 1.5, derive_seed(0xC1, 0, 0, 0));
  CircularSample s(ang);
  const int m = 2048;
  for (double nu : {0.5, 5.0, 50.0}) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
      const double t = kTwoPi * k / m;
      double fh = 0.0;
      for (double a : ang) fh += vm_kernel(t - a, nu);
      fh /= s.n();
      acc += fh * fh;
    }
    acc *= kTwoPi / m;  // periodic rectangle rule: spectrally accurate
    CHECK(std::abs(circular_squared_integral(s, nu) - acc) < 1e-8);
  }
}

TEST_CASE("circular psi medians: uniform and von Mises truths") {
  std::vector<double> unif, vm;
  for (int rep = 0; rep < 15; ++rep) {
    CircularSample u(sample_circular_uniform(500, derive_seed(0xC2, rep, 0, 0)));
    unif.push_back(circular_psi_hat(u).estimate);
    CircularSample v(
        sample_von_mises(500, 2.0, 2.0, derive_seed(0xC3, rep, 0, 0)));
    vm.push_back(circular_psi_hat(v).estimate);
  }
  const double psi_unif = 1.0 / kTwoPi;
  const double psi_vm = vm_conv(0.0, 2.0);  // I0(2k)/(2 pi I0(k)^2) at k = 2
  CHECK(std::abs(median(unif) - psi_unif) < 0.012);
  CHECK(std::abs(median(vm) - psi_vm) < 0.025);
}

TEST_CASE("circular estimate is rotation invariant") {
  auto ang = sample_von_mises(300, 0.8, 2.0, derive_seed(0xC4, 0, 0, 0));
  auto rot = ang;
  for (double& a : rot) a += 1.234;  // CircularSample reduces mod 2pi
  auto r1 = circular_psi_hat(CircularSample(ang));
  auto r2 = circular_psi_hat(CircularSample(rot));
  CHECK(std::abs(r1.estimate - r2.estimate) < 1e-10);
  CHECK(r1.nu_cv == doctest::Approx(r2.nu_cv).epsilon(1e-4));
}

TEST_CASE("circular CV is unbiased for MISE - psi") {
  // Both CV pieces are exactly unbiased: E integral(f_hat^2) has the
  // diagonal-inclusive closed form and the leave-one-out mean estimates
  // 2 E K_nu(Theta_1 - Theta_2).  The difference of two von Mises angles has
  // density vm_conv(. ; kappa), which turns both expectations into smooth
  // periodic 1-D integrals.
  const double kappa = 2.0, nu = 5.0;
  const int n = 50, reps = 400, m = 4096;
  double e_conv = 0.0, e_k = 0.0;
  for (int k = 0; k < m; ++k) {
    const double d = kTwoPi * k / m;
    const double w = vm_conv(d, kappa);
    e_conv += vm_conv(d, nu) * w;
    e_k += vm_kernel(d, nu) * w;
  }
  e_conv *= kTwoPi / m;
  e_k *= kTwoPi / m;
  const double truth =
      (n * vm_conv(0.0, nu) + n * (n - 1.0) * e_conv) / (double(n) * n) -
      2.0 * e_k;

  Kahan sum, sumsq;
  for (int rep = 0; rep < reps; ++rep) {
    CircularSample s(
        sample_von_mises(n, 0.0, kappa, derive_seed(0xC5, rep, 0, 0)));
    const double v = circular_cv(s, nu);
    sum.add(v);
    sumsq.add(v * v);
  }
  const double mean = sum.value() / reps;
  const double var = (sumsq.value() - reps * mean * mean) / (reps - 1.0);
  const double se = std::sqrt(var / reps);
  CHECK(std::abs(mean - truth) < 3.0 * se);
}

TEST_CASE("von Mises sampler: determinism and first moments") {
  auto a = sample_von_mises(4000, 1.0, 2.0, 99);
  auto b = sample_von_mises(4000, 1.0, 2.0, 99);
  CHECK(a == b);
  double c = 0.0, s = 0.0;
  for (double t : a) {
    c += std::cos(t - 1.0);
    s += std::sin(t - 1.0);
  }
  c /= a.size();
  s /= a.size();
  // E cos(Theta - mu) = I1(2)/I0(2) ~ 0.6977747, E sin(Theta - mu) = 0.
  CHECK(c == doctest::Approx(0.6977747).epsilon(0.05));
  CHECK(std::abs(s) < 0.05);
  CHECK_THROWS_AS(sample_von_mises(3, 0.0, -1.0, 1), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// theta_r.

TEST_CASE("kde derivative roughness matches quadrature") {
  auto x = catalog(6).sample(60, derive_seed(0xD0, 0, 0, 0));
  Sample s(x);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  for (int r : {1, 2}) {
    for (double g : {0.3, 1.0}) {
      const double quad = integrate(
          [&](double t) {
            const double d = kde_deriv_at(x, g, r, t);
            return d * d;
          },
          *lo - 10.0 * g, *hi + 10.0 * g, 1e-12);
      CHECK(kde_deriv_roughness(s, r, g) ==
            doctest::Approx(quad).epsilon(1e-7));
    }
  }
}

TEST_CASE("CV_r is unbiased for MISE_r - theta_r") {
  struct Setting {
    int r, n, reps;
    double g;
  };
  for (const auto& cfg : {Setting{1, 100, 60, 0.5}, Setting{2, 80, 40, 0.6}}) {
    const auto& f = catalog(1);
    const double theta = f.true_theta_r(cfg.r);
    Kahan sum, sumsq;
    for (int rep = 0; rep < cfg.reps; ++rep) {
      auto x = f.sample(cfg.n, derive_seed(0xD1, cfg.r, rep, 0));
      Sample s(x);
      // Paired difference CV_r - ISE_r + theta_r has mean 0; pairing strips
      // almost all of the replicate-to-replicate variance.
      const double ise = integrate(
          [&](double t) {
            const double d = kde_deriv_at(x, cfg.g, cfg.r, t) -
                             f.pdf_deriv(t, cfg.r);
            return d * d;
          },
          -12.0, 12.0, 1e-10);
      const double v = cv_r(s, cfg.r, cfg.g) - ise + theta;
      sum.add(v);
      sumsq.add(v * v);
    }
    const double mean = sum.value() / cfg.reps;
    const double var =
        (sumsq.value() - cfg.reps * mean * mean) / (cfg.reps - 1.0);
    const double se = std::sqrt(var / cfg.reps);
    CHECK(std::abs(mean) < 3.0 * se);
  }
}

TEST_CASE("theta_1 median lands near the normal truth") {
  const auto& f = catalog(1);
  const double truth = f.true_theta_r(1);  // 1/(4 sqrt(pi))
  std::vector<double> est;
  for (int rep = 0; rep < 21; ++rep) {
    Sample s(f.sample(500, derive_seed(0xD2, rep, 0, 0)));
    est.push_back(theta_r_hat(s, 1).estimate);
  }
  CHECK(std::abs(median(est) - truth) < 0.3 * truth);
}

TEST_CASE("theta_r rejects unsupported orders and degenerate input") {
  Sample s(catalog(1).sample(30, derive_seed(0xD3, 0, 0, 0)));
  CHECK_THROWS_AS(theta_r_hat(s, 0), std::invalid_argument);
  CHECK_THROWS_AS(theta_r_hat(s, 3), std::invalid_argument);
  CHECK_THROWS_AS(cv_r(s, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(cv_r(s, 1, 0.0), std::invalid_argument);
  Sample tied({2.0, 2.0});
  CHECK_THROWS_AS(theta_r_hat(tied, 1), std::runtime_error);
}
