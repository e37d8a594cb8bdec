#include "dfcv/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dfcv/math.hpp"
#include "dfcv/optimize.hpp"

namespace dfcv {

namespace {

double normal0(double x, double var) {
  return kInvSqrt2Pi / std::sqrt(var) * std::exp(-0.5 * x * x / var);
}

void check_args(int n, double g) {
  if (n < 2) throw std::invalid_argument("oracle: need n >= 2");
  if (!(g > 0.0)) throw std::invalid_argument("oracle: bandwidth must be > 0");
}

struct SmoothedAtom {
  double c;  // coefficient
  double m;  // mean
  double v;  // variance
};

// phi_g * f as an explicit Gaussian mixture.
std::vector<SmoothedAtom> smooth(const GaussComb& phi, const NormalMixture& f,
                                 double g) {
  std::vector<SmoothedAtom> out;
  out.reserve(phi.atoms.size() * f.components().size());
  for (const auto& a : phi.atoms) {
    const double sg = a.s * g;
    for (const auto& c : f.components()) {
      out.push_back({a.c * c.w, c.mu, sg * sg + c.sigma * c.sigma});
    }
  }
  return out;
}

// The three data-independent pointwise-product combs in the variance formula.
const GaussComb& comb_m2() {
  static const GaussComb k = pointwise_product(kernel_m(), kernel_m());
  return k;
}
const GaussComb& comb_mn() {
  static const GaussComb k = pointwise_product(kernel_m(), kernel_n());
  return k;
}
const GaussComb& comb_n2() {
  static const GaussComb k = pointwise_product(kernel_n(), kernel_n());
  return k;
}

struct BandLimits {
  double lo;
  double hi;
};

BandLimits oracle_band(const NormalMixture& f, int n) {
  const double sigma = std::sqrt(f.variance());
  return {sigma / static_cast<double>(n), 8.0 * sigma};
}

double refine_minimizer(const char* what, const NormalMixture& f, int n,
                        double (*value)(const NormalMixture&, int, double)) {
  const BandLimits band = oracle_band(f, n);
  CriterionCurve curve = minimize_on_log_grid(
      [&](double g) { return value(f, n, g); }, band.lo, band.hi, 200, 1e-7);
  if (!curve.refined) {
    std::ostringstream msg;
    msg << what << ": minimum not bracketed on [" << band.lo << ", " << band.hi
        << "], argmin " << curve.minimizer << ", value " << curve.min_value;
    throw std::runtime_error(msg.str());
  }
  return curve.minimizer;
}

}  // namespace

double r_functional(const GaussComb& phi, const NormalMixture& f, double g) {
  if (!(g > 0.0)) throw std::invalid_argument("r_functional: g must be > 0");
  double sum = 0.0;
  for (const auto& a : phi.atoms) {
    const double sg2 = a.s * g * a.s * g;
    for (const auto& ci : f.components()) {
      for (const auto& cj : f.components()) {
        const double var = sg2 + ci.sigma * ci.sigma + cj.sigma * cj.sigma;
        sum += a.c * ci.w * cj.w * normal0(ci.mu - cj.mu, var);
      }
    }
  }
  return sum;
}

double t_functional(const GaussComb& phi, const GaussComb& chi,
                    const NormalMixture& f, double g) {
  if (!(g > 0.0)) throw std::invalid_argument("t_functional: g must be > 0");
  const auto pa = smooth(phi, f, g);
  const auto pb = smooth(chi, f, g);
  double sum = 0.0;
  for (const auto& p : pa) {
    for (const auto& q : pb) {
      // N_p N_q = N(p.m - q.m; 0, p.v + q.v) * N(x; m12, v12)
      const double front = normal0(p.m - q.m, p.v + q.v);
      const double m12 = (p.m * q.v + q.m * p.v) / (p.v + q.v);
      const double v12 = p.v * q.v / (p.v + q.v);
      const double cc = p.c * q.c * front;
      for (const auto& r : f.components()) {
        sum += cc * r.w * normal0(r.mu - m12, v12 + r.sigma * r.sigma);
      }
    }
  }
  return sum;
}

double exact_bias(const NormalMixture& f, int n, double g) {
  check_args(n, g);
  const double nn = static_cast<double>(n);
  return -roughness(kernel_l()) / (nn * g) + r_functional(kernel_m(), f, g) +
         r_functional(kernel_n(), f, g) / nn - f.true_psi();
}

double exact_mise(const NormalMixture& f, int n, double g) {
  check_args(n, g);
  const double nn = static_cast<double>(n);
  return roughness(kernel_l()) / (nn * g) - r_functional(kernel_m(), f, g) -
         r_functional(kernel_n(), f, g) / nn + f.true_psi();
}

double exact_variance(const NormalMixture& f, int n, double g) {
  check_args(n, g);
  const double nn = static_cast<double>(n);
  const double pairs = nn * (nn - 1.0);
  const GaussComb m = kernel_m();
  const GaussComb nk = kernel_n();
  const double t_part = t_functional(m, m, f, g) +
                        2.0 / nn * t_functional(m, nk, f, g) +
                        t_functional(nk, nk, f, g) / (nn * nn);
  const double rm = r_functional(m, f, g);
  const double rn = r_functional(nk, f, g);
  const double r_part = rm * rm + 2.0 / nn * rm * rn + rn * rn / (nn * nn);
  const double sq_part = r_functional(comb_m2(), f, g) +
                         2.0 / nn * r_functional(comb_mn(), f, g) +
                         r_functional(comb_n2(), f, g) / (nn * nn);
  return 4.0 * (nn - 2.0) / pairs * t_part - (4.0 * nn - 6.0) / pairs * r_part +
         2.0 / (g * pairs) * sq_part;
}

double exact_mse(const NormalMixture& f, int n, double g) {
  check_args(n, g);
  const double b = exact_mise(f, n, g);  // MSE's first braces equal MISE(g)
  return b * b + exact_variance(f, n, g);
}

double g_mse(const NormalMixture& f, int n) {
  return refine_minimizer("g_mse", f, n, &exact_mse);
}

double g_mise(const NormalMixture& f, int n) {
  return refine_minimizer("g_mise", f, n, &exact_mise);
}

double asymptotic_c0(const NormalMixture& f) {
  constexpr int nu = 2;
  constexpr double nu_fact = 2.0;  // nu!
  const double m_nu = moment(kernel_l(), nu);
  const double rough_f_nu = f.true_theta_r(nu);
  const double base = roughness(kernel_l()) * nu_fact * nu_fact /
                      (2.0 * nu * rough_f_nu * m_nu * m_nu);
  return std::pow(base, 1.0 / (2.0 * nu + 1.0));
}

ExactErrorReport exact_error_report(const NormalMixture& f, int n,
                                    int grid_points) {
  if (n < 2) throw std::invalid_argument("oracle: need n >= 2");
  if (grid_points < 2) {
    throw std::invalid_argument("oracle: need at least 2 grid points");
  }
  const BandLimits band = oracle_band(f, n);
  ExactErrorReport rep;
  rep.n = n;
  rep.grid = log_grid(band.lo, band.hi, grid_points);
  rep.bias.reserve(rep.grid.size());
  rep.variance.reserve(rep.grid.size());
  rep.mse.reserve(rep.grid.size());
  rep.mise.reserve(rep.grid.size());
  for (double g : rep.grid) {
    rep.bias.push_back(exact_bias(f, n, g));
    rep.variance.push_back(exact_variance(f, n, g));
    rep.mse.push_back(exact_mse(f, n, g));
    rep.mise.push_back(exact_mise(f, n, g));
  }
  rep.g_mse = g_mse(f, n);
  rep.mse_min = exact_mse(f, n, rep.g_mse);
  rep.g_mise = g_mise(f, n);
  rep.mise_min = exact_mise(f, n, rep.g_mise);
  return rep;
}

}  // namespace dfcv
