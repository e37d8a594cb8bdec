#pragma once

// Normal-mixture test densities: the catalog of benchmark models, exact
// functionals (psi, theta_r, integral of f^3), sampling, histogram cell
// probabilities and the estimation-difficulty functional Q(f).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace dfcv {

struct MixtureComponent {
  double w;      //!< weight, > 0; weights sum to 1
  double mu;     //!< mean
  double sigma;  //!< standard deviation, > 0
};

class NormalMixture {
 public:
  //! Validates weights (positive, sum to 1 within 1e-12) and scales.
  explicit NormalMixture(std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const { return comps_; }

  double pdf(double x) const;

  //! Exact r-th derivative of the density, r <= 8.
  double pdf_deriv(double x, int r) const;

  double cdf(double x) const;

  double mean() const;
  double variance() const;

  //! Bounds outside which the density carries < 1e-20 mass:
  //! [min mu - 10 max sigma, max mu + 10 max sigma].
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  //! psi = integral of f^2, closed form over component pairs.
  double true_psi() const;

  //! theta_r = integral of (f^{(r)})^2, closed form, r <= 4.
  double true_theta_r(int r) const;

  //! Integral of f^3, closed form over component triples.
  double integral_f_cubed() const;

  //! n i.i.d. draws; deterministic for a fixed seed regardless of caller
  //! threading.  Component choice by cdf inversion, then a Gaussian deviate.
  std::vector<double> sample(int n, std::uint64_t seed) const;

  //! Difficulty functional
  //!   Q(f) = inf_u u^{-1} integral f^{1/2} rho(u^5 f'' f^{-1/2}),
  //! rho(t) = E|Z - t| = 2 phi(t) + t (2 Phi(t) - 1).
  double q_difficulty() const;

  //! P(k b <= X < (k+1) b) for k in [k_lo, k_hi], cells anchored at 0.
  std::vector<double> cell_probs(double binwidth, long k_lo, long k_hi) const;

 private:
  std::vector<MixtureComponent> comps_;
  std::vector<double> cum_w_;  // cumulative weights for sampling
  double lo_, hi_;
};

//! Benchmark density by catalog id (1..16), parsed once from the table
//! compiled in from data/densities.txt.
const NormalMixture& catalog(int id);

//! Parse a catalog table (same format as data/densities.txt).
std::map<int, NormalMixture> parse_catalog(std::istream& in);

}  // namespace dfcv
