#include "dfcv/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dfcv/catalog_data.hpp"
#include "dfcv/math.hpp"
#include "dfcv/optimize.hpp"
#include "dfcv/quadrature.hpp"

namespace dfcv {

namespace {

// Centered normal density with the given variance.
double normal0(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(kTwoPi * var);
}

}  // namespace

NormalMixture::NormalMixture(std::vector<MixtureComponent> components)
    : comps_(std::move(components)) {
  if (comps_.empty()) {
    throw std::invalid_argument("NormalMixture: empty component list");
  }
  double total = 0.0;
  for (const auto& c : comps_) {
    if (!(c.w > 0)) throw std::invalid_argument("NormalMixture: weight <= 0");
    if (!(c.sigma > 0)) throw std::invalid_argument("NormalMixture: sd <= 0");
    total += c.w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("NormalMixture: weights sum to " +
                                std::to_string(total));
  }
  cum_w_.reserve(comps_.size());
  double acc = 0.0;
  for (const auto& c : comps_) {
    acc += c.w;
    cum_w_.push_back(acc);
  }
  cum_w_.back() = 1.0;
  double mu_lo = comps_[0].mu, mu_hi = comps_[0].mu, s_max = comps_[0].sigma;
  for (const auto& c : comps_) {
    mu_lo = std::min(mu_lo, c.mu);
    mu_hi = std::max(mu_hi, c.mu);
    s_max = std::max(s_max, c.sigma);
  }
  lo_ = mu_lo - 10.0 * s_max;
  hi_ = mu_hi + 10.0 * s_max;
}

double NormalMixture::pdf(double x) const {
  double v = 0.0;
  for (const auto& c : comps_) v += c.w * phi((x - c.mu) / c.sigma) / c.sigma;
  return v;
}

double NormalMixture::pdf_deriv(double x, int r) const {
  if (r < 0 || r > 8) {
    throw std::invalid_argument("pdf_deriv: order must be in 0..8");
  }
  double sign = (r % 2 == 0) ? 1.0 : -1.0;
  double v = 0.0;
  for (const auto& c : comps_) {
    double u = (x - c.mu) / c.sigma;
    v += c.w * sign * hermite(r, u) * phi(u) / std::pow(c.sigma, r + 1);
  }
  return v;
}

double NormalMixture::cdf(double x) const {
  double v = 0.0;
  for (const auto& c : comps_) v += c.w * normal_cdf((x - c.mu) / c.sigma);
  return v;
}

double NormalMixture::mean() const {
  double m = 0.0;
  for (const auto& c : comps_) m += c.w * c.mu;
  return m;
}

double NormalMixture::variance() const {
  double m = mean(), v = 0.0;
  for (const auto& c : comps_) {
    v += c.w * (c.sigma * c.sigma + (c.mu - m) * (c.mu - m));
  }
  return v;
}

double NormalMixture::true_psi() const {
  double v = 0.0;
  for (const auto& a : comps_)
    for (const auto& b : comps_) {
      double var = a.sigma * a.sigma + b.sigma * b.sigma;
      v += a.w * b.w * normal0(a.mu - b.mu, var);
    }
  return v;
}

double NormalMixture::true_theta_r(int r) const {
  if (r < 0 || r > 4) {
    throw std::invalid_argument("true_theta_r: order must be in 0..4");
  }
  // theta_r = (-1)^r integral f^{(2r)} f; each pair contributes the 2r-th
  // derivative of the pooled Gaussian at the mean difference.
  double sign = (r % 2 == 0) ? 1.0 : -1.0;
  double v = 0.0;
  for (const auto& a : comps_)
    for (const auto& b : comps_) {
      double s = std::hypot(a.sigma, b.sigma);
      double u = (a.mu - b.mu) / s;
      v += a.w * b.w * sign * hermite(2 * r, u) * phi(u) /
           std::pow(s, 2 * r + 1);
    }
  return v;
}

double NormalMixture::integral_f_cubed() const {
  // Two successive Gaussian product reductions collapse the triple integral.
  double v = 0.0;
  for (const auto& a : comps_)
    for (const auto& b : comps_) {
      double vab = a.sigma * a.sigma + b.sigma * b.sigma;
      double front = normal0(a.mu - b.mu, vab);
      double m_ab =
          (a.mu * b.sigma * b.sigma + b.mu * a.sigma * a.sigma) / vab;
      double v_ab = a.sigma * a.sigma * b.sigma * b.sigma / vab;
      for (const auto& c : comps_) {
        v += a.w * b.w * c.w * front *
             normal0(c.mu - m_ab, v_ab + c.sigma * c.sigma);
      }
    }
  return v;
}

std::vector<double> NormalMixture::sample(int n, std::uint64_t seed) const {
  if (n < 2) throw std::invalid_argument("sample: need n >= 2");
  Rng rng(seed);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    auto it = std::lower_bound(cum_w_.begin(), cum_w_.end(), u);
    if (it == cum_w_.end()) --it;
    const auto& c = comps_[it - cum_w_.begin()];
    out[i] = c.mu + c.sigma * rng.normal();
  }
  return out;
}

double NormalMixture::q_difficulty() const {
  auto rho = [](double t) {
    return 2.0 * phi(t) + t * (2.0 * normal_cdf(t) - 1.0);
  };
  auto inner = [&](double u) {
    double u5 = u * u * u * u * u;
    return integrate(
               [&](double x) {
                 double f = pdf(x);
                 if (f < 1e-300) return 0.0;
                 double root = std::sqrt(f);
                 return root * rho(u5 * pdf_deriv(x, 2) / root);
               },
               lo_, hi_, 1e-9) /
           u;
  };
  auto grid = log_grid(1e-3, 1e3, 50);
  int best = 0;
  double best_val = inner(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double v = inner(grid[i]);
    if (v < best_val) {
      best_val = v;
      best = static_cast<int>(i);
    }
  }
  if (best == 0 || best + 1 == static_cast<int>(grid.size())) {
    throw std::runtime_error(
        "q_difficulty: outer minimum at search boundary, u = " +
        std::to_string(grid[best]));
  }
  auto gr = golden_min([&](double t) { return inner(std::exp(t)); },
                       std::log(grid[best - 1]), std::log(grid[best + 1]),
                       1e-8);
  return std::min(best_val, gr.fx);
}

std::vector<double> NormalMixture::cell_probs(double binwidth, long k_lo,
                                              long k_hi) const {
  if (!(binwidth > 0)) throw std::invalid_argument("cell_probs: binwidth <= 0");
  if (k_hi < k_lo) throw std::invalid_argument("cell_probs: empty range");
  std::vector<double> p;
  p.reserve(k_hi - k_lo + 1);
  for (long k = k_lo; k <= k_hi; ++k) {
    p.push_back(cdf((k + 1) * binwidth) - cdf(k * binwidth));
  }
  return p;
}

std::map<int, NormalMixture> parse_catalog(std::istream& in) {
  auto parse_number = [](const std::string& tok) {
    auto slash = tok.find('/');
    if (slash == std::string::npos) return std::stod(tok);
    return std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1));
  };
  std::map<int, std::vector<MixtureComponent>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int id;
    std::string w, mu, sd;
    if (!(ls >> id >> w >> mu >> sd)) continue;
    rows[id].push_back(
        {parse_number(w), parse_number(mu), parse_number(sd)});
  }
  std::map<int, NormalMixture> out;
  for (auto& [id, comps] : rows) out.emplace(id, NormalMixture(comps));
  return out;
}

const NormalMixture& catalog(int id) {
  static const std::map<int, NormalMixture> table = [] {
    std::istringstream in(detail::kCatalogText);
    return parse_catalog(in);
  }();
  auto it = table.find(id);
  if (it == table.end()) {
    throw std::invalid_argument("catalog: unknown density id " +
                                std::to_string(id));
  }
  return it->second;
}

}  // namespace dfcv
