#pragma once

// Gaussian kernel algebra.  Every kernel used by the estimators is a finite
// combination of centered scaled Gaussians ("comb"), which is closed under
// scaling, convolution and pointwise multiplication, so exact convolutions,
// roughness values and derivatives are available everywhere downstream.
// Also hosts the von Mises kernel for circular data and the Bessel I0
// routines it needs.

#include <vector>

namespace dfcv {

//! One term c * phi_s(x), with phi_s(x) = phi(x/s)/s.
struct GaussAtom {
  double c;  //!< coefficient (may be negative, e.g. in the twicing kernel)
  double s;  //!< scale, > 0
};

//! Finite combination of centered scaled Gaussians.
struct GaussComb {
  std::vector<GaussAtom> atoms;

  double operator()(double x) const;

  //! r-th derivative at x:  sum of c * He_r(x/s) * phi(x/s) * (-1)^r / s^{r+1}.
  double deriv(double x, int r) const;

  //! Integral over the line, i.e. the sum of coefficients.
  double integral() const;
};

//! Standard normal kernel L.
GaussComb kernel_l();

//! N = L * L (convolution), a single Gaussian at scale sqrt(2).
GaussComb kernel_n();

//! Twicing kernel M = 2L - L*L.
GaussComb kernel_m();

//! K_g(x) = K(x/g)/g: every atom scale is multiplied by g.
GaussComb scaled(const GaussComb& k, double g);

//! Convolution; atoms pair up with pooled scales sqrt(s1^2 + s2^2).
GaussComb convolve(const GaussComb& a, const GaussComb& b);

//! Pointwise product as a comb:
//!   phi_{s1} * phi_{s2} = phi_{sqrt(s1^2+s2^2)}(0) * phi_{s1 s2 / sqrt(s1^2+s2^2)}.
GaussComb pointwise_product(const GaussComb& a, const GaussComb& b);

//! Roughness of the r-th derivative, R(K^{(r)}) = integral of (K^{(r)})^2.
double roughness(const GaussComb& k, int r = 0);

//! Moment integral x^ell K(x) dx (zero for odd ell by symmetry).
double moment(const GaussComb& k, int ell);

//! Modified Bessel function I0.  Power series up to |x| = 15, asymptotic
//! expansion beyond; overflows to +inf past x ~ 709 (use the log form there).
double bessel_i0(double x);

//! log I0(x), finite for all representable x.
double log_bessel_i0(double x);

//! von Mises kernel exp(nu cos t) / (2 pi I0(nu)), evaluated in log space so
//! large concentrations do not overflow.
double vm_kernel(double t, double nu);

//! Convolution integral of two von Mises kernels with angular separation
//! delta:  I0(2 nu cos(delta/2)) / (2 pi I0(nu)^2).
double vm_conv(double delta, double nu);

}  // namespace dfcv
