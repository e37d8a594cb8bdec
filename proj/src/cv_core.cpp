#include "dfcv/cv_core.hpp"

#include <stdexcept>
#include <utility>

#include "dfcv/math.hpp"

namespace dfcv {

namespace {

// R(L) = (L*L)(0) = 1/(2 sqrt(pi)) for the Gaussian kernel.  One shared
// constant keeps the CV identity with psi_tilde_d_star exact in floating
// point, not just algebraically.
constexpr double kRoughL = kInvSqrt2Pi / kSqrt2;

void check_g(double g) {
  if (!(g > 0.0)) throw std::invalid_argument("cv_core: bandwidth must be > 0");
}

struct Normalized {
  double nd;       // psi_tilde_nd
  double nd_star;  // psi_tilde_nd_star
};

// All estimators draw on one pair-sum pass so the algebraic identities among
// them survive rounding.
Normalized normalized_sums(const Sample& s, double g) {
  check_g(g);
  const KernelPairSums ps = gauss_pair_sums(s, g);
  const double n = static_cast<double>(s.n());
  const double off_diag = n * (n - 1.0);
  return {2.0 * ps.l * kInvSqrt2Pi / (g * off_diag),
          2.0 * ps.ll * kInvSqrt2Pi / (g * kSqrt2 * off_diag)};
}

}  // namespace

double psi_tilde_nd(const Sample& s, double g) { return normalized_sums(s, g).nd; }

double psi_tilde_d(const Sample& s, double g) {
  const double n = static_cast<double>(s.n());
  return (1.0 - 1.0 / n) * psi_tilde_nd(s, g) + kInvSqrt2Pi / g / n;
}

double psi_tilde_nd_star(const Sample& s, double g) {
  return normalized_sums(s, g).nd_star;
}

double psi_tilde_d_star(const Sample& s, double g) {
  const double n = static_cast<double>(s.n());
  return (1.0 - 1.0 / n) * psi_tilde_nd_star(s, g) + kRoughL / (n * g);
}

double psi_tilde_bullet_nd(const Sample& s, double g) {
  const Normalized p = normalized_sums(s, g);
  return 2.0 * p.nd - p.nd_star;
}

double cv(const Sample& s, double g) {
  const Normalized p = normalized_sums(s, g);
  const double n = static_cast<double>(s.n());
  const double mise_part = (1.0 - 1.0 / n) * p.nd_star + kRoughL / (n * g);
  return mise_part - 2.0 * p.nd;
}

double penalty_w(const Sample& s, double g) {
  const Normalized p = normalized_sums(s, g);
  const double n = static_cast<double>(s.n());
  const double bullet = 2.0 * p.nd - p.nd_star;
  const double d_star = (1.0 - 1.0 / n) * p.nd_star + kRoughL / (n * g);
  return bullet - 2.0 * p.nd + d_star;
}

PsiHatResult psi_hat(const Sample& s) {
  if (s.degenerate()) {
    throw std::runtime_error(
        "psi_hat: all observations equal; CV has no minimum");
  }
  CriterionCurve curve = minimize_on_log_grid(
      [&](double g) { return cv(s, g); }, s.min_gap() / 3.0, s.range(), 120,
      1e-6);
  return {-curve.min_value, curve.minimizer, std::move(curve)};
}

}  // namespace dfcv
