#pragma once

// Scalar kernels shared by the strategy, coefficient and price-drift formulas:
//
//   zeta(y)  = (1 - e^{-y}) / y            zeta(0)  = 1
//   omega(y) = (e^{-y} - 1 + y) / y^2      omega(0) = 1/2
//
// together with their derivatives, the exponential integral Ei and the
// auxiliary integral L(r, lambda, t) = r * int_0^t e^{lambda s} / (2 + r s) ds.

namespace mih {

struct StabilityConfig {
  // |y| below which the zeta family is evaluated by its Taylor series.
  double series_threshold = 0.5;
  // Relative tolerance of the adaptive quadrature oracles.
  double quad_rel_tol = 1e-12;
  // Maximum bisection depth of the adaptive quadrature oracles.
  unsigned max_quad_subdivisions = 20;

  void validate() const;
};

struct ZetaFamily {
  double zeta;
  double zeta_prime;
  double omega;
  double omega_prime;
};

ZetaFamily zeta_family(double y, const StabilityConfig& cfg = {});

// Convenience accessors using the default configuration.
double zeta(double y);
double omega(double y);
double omega_prime(double y);

// Ei(y) = -PV int_{-y}^{inf} e^{-u}/u du.  Throws std::domain_error at y == 0.
double expint(double y);

// L(r, lambda, t) through the Ei closed form (lambda != 0) or log1p (lambda == 0).
double aux_L(double r, double lambda, double t);

// Same integral by adaptive Gauss-Kronrod quadrature of the definition.
// Test oracle only.
double aux_L_quadrature(double r, double lambda, double t, const StabilityConfig& cfg = {});

}  // namespace mih
