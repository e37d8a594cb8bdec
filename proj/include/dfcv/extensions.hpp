#pragma once

#include <cstdint>
#include <vector>

#include "dfcv/optimize.hpp"
#include "dfcv/sample.hpp"

namespace dfcv {

// ---------------------------------------------------------------------------
// Entropy via likelihood cross-validation.

struct EntropyResult {
  double estimate;  // min_g of the leave-one-out criterion
  double g_lcv;
  CriterionCurve curve;
};

// H_hat = min_g { -n^{-1} sum_i log f_i(X_i; g) } with the leave-one-out kde
// f_i(x; g) = {(n-1)g}^{-1} sum_{j != i} L((x - X_j)/g).  Grid points where
// some leave-one-out density underflows to zero get value +inf and are
// excluded from refinement, not treated as errors.
EntropyResult entropy_hat(const Sample& s);

// ---------------------------------------------------------------------------
// Circular data: psi = integral of f^2 over the circle, von Mises kernel.

class CircularSample {
 public:
  explicit CircularSample(std::vector<double> angles);

  int n() const { return static_cast<int>(theta_.size()); }
  const std::vector<double>& angles() const { return theta_; }  // in [0, 2pi)

  // Pairwise caches over i<j, shared by every concentration on the grid:
  // cos(d) - 1 for the kernel sums and |cos(d/2)| for the convolution sums.
  const std::vector<double>& pair_cos_m1() const { return cos_m1_; }
  const std::vector<double>& pair_cos_half() const { return cos_half_; }

 private:
  std::vector<double> theta_;
  std::vector<double> cos_m1_;
  std::vector<double> cos_half_;
};

struct CircularPsiResult {
  double estimate;  // -min_nu CV(nu)
  double nu_cv;
  CriterionCurve curve;
};

// CV(nu) = integral of f_hat(.; nu)^2 - 2 n^{-1} sum_i f_hat_{-i}(Theta_i).
// The squared integral is closed form through the von Mises convolution
// identity; the leave-one-out mean uses the plain 1/(n-1) average, which
// makes E CV(nu) = MISE(nu) - psi exact (no extra finite-n correction).
double circular_cv(const CircularSample& s, double nu);

// The integral of f_hat^2 alone (exposed for the quadrature cross-check).
double circular_squared_integral(const CircularSample& s, double nu);

// Search on a log grid nu in [0.1, n] with golden refinement.
CircularPsiResult circular_psi_hat(const CircularSample& s);

// Samplers used by tests and the harness (deterministic in the seed).
std::vector<double> sample_von_mises(int n, double mu, double kappa,
                                     std::uint64_t seed);
std::vector<double> sample_circular_uniform(int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Integrated squared density derivatives theta_r, r in {1, 2}.

struct ThetaResult {
  double estimate;  // -min_g CV_r(g)
  double g_cv;
  CriterionCurve curve;
};

// R(f_hat^{(r)}(.; g)) = (-1)^r n^{-2} sum_{i,j} (L*L)_g^{(2r)}(X_i - X_j),
// diagonals included.
double kde_deriv_roughness(const Sample& s, int r, double g);

// CV_r(g) = R(f_hat^{(r)}) - 2 (-1)^r {n(n-1)}^{-1} sum_{i!=j} L_g^{(2r)}.
double cv_r(const Sample& s, int r, double g);

ThetaResult theta_r_hat(const Sample& s, int r);

}  // namespace dfcv
