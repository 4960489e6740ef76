#include "mih/special_functions.hpp"

#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mih {

namespace {

constexpr int kSeriesTerms = 24;
constexpr double kEulerGamma = 0.57721566490153286060651209;

// inv_fact[n] = 1/n!
constexpr std::array<double, kSeriesTerms + 3> make_inverse_factorials() {
  std::array<double, kSeriesTerms + 3> out{};
  double f = 1.0;
  out[0] = 1.0;
  for (int n = 1; n < kSeriesTerms + 3; ++n) {
    f *= n;
    out[n] = 1.0 / f;
  }
  return out;
}

constexpr auto kInvFact = make_inverse_factorials();

// sum_{n=0}^{N} (-y)^n / (n + shift)!  and its derivative in y.
void shifted_exp_series(double y, int shift, double& value, double& derivative) {
  double v = 0.0;
  double d = 0.0;
  for (int n = kSeriesTerms; n >= 1; --n) {
    const double c = (n % 2 == 0 ? 1.0 : -1.0) * kInvFact[n + shift];
    v = v * y + c;
    d = d * y + n * c;
  }
  // v currently holds sum_{n>=1} c_n y^{n-1}; d holds sum n c_n y^{n-1}.
  value = kInvFact[shift] + y * v;
  derivative = d;
}

// E1(x) for x > 0.
double expint_e1(double x) {
  if (x <= 1.0) {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= -x / k;
      const double add = term / k;
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) - sum;
  }
  // Modified Lentz evaluation of the continued fraction
  // E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

// Ei(x) for x > 0.
double expint_positive(double x) {
  if (x < 40.0) {
    // Ei(x) = gamma + ln x + sum_{k>=1} x^k / (k k!), all terms positive.
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 1000; ++k) {
      term *= x / k;
      const double add = term / k;
      sum += add;
      if (add < 1e-17 * sum) break;
    }
    return kEulerGamma + std::log(x) + sum;
  }
  // Asymptotic expansion e^x/x sum k!/x^k, truncated at the smallest term.
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double next = term * k / x;
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(x) / x * sum;
}

}  // namespace

void StabilityConfig::validate() const {
  if (!(series_threshold > 0.0) || !std::isfinite(series_threshold)) {
    throw std::invalid_argument("series_threshold must be positive");
  }
  if (!(quad_rel_tol > 0.0)) {
    throw std::invalid_argument("quad_rel_tol must be positive");
  }
  if (max_quad_subdivisions == 0) {
    throw std::invalid_argument("max_quad_subdivisions must be at least 1");
  }
}

ZetaFamily zeta_family(double y, const StabilityConfig& cfg) {
  if (!std::isfinite(y)) {
    throw std::domain_error("zeta_family: non-finite argument");
  }
  ZetaFamily out{};
  if (std::abs(y) < cfg.series_threshold) {
    shifted_exp_series(y, 1, out.zeta, out.zeta_prime);
    shifted_exp_series(y, 2, out.omega, out.omega_prime);
    return out;
  }
  const double em1 = std::expm1(-y);  // e^{-y} - 1
  const double e = em1 + 1.0;
  out.zeta = -em1 / y;
  out.zeta_prime = (e - out.zeta) / y;
  out.omega = (em1 + y) / (y * y);
  out.omega_prime = (-2.0 * em1 - y * (2.0 + em1)) / (y * y * y);
  return out;
}

double zeta(double y) { return zeta_family(y).zeta; }
double omega(double y) { return zeta_family(y).omega; }
double omega_prime(double y) { return zeta_family(y).omega_prime; }

double expint(double y) {
  if (y == 0.0) {
    throw std::domain_error("expint: logarithmic singularity at 0");
  }
  if (!std::isfinite(y)) {
    throw std::domain_error("expint: non-finite argument");
  }
  return y > 0.0 ? expint_positive(y) : -expint_e1(-y);
}

double aux_L(double r, double lambda, double t) {
  if (!(r > 0.0)) throw std::invalid_argument("aux_L: r must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("aux_L: t must be nonnegative");
  if (t == 0.0) return 0.0;
  if (lambda == 0.0) return std::log1p(0.5 * r * t);
  const double lo = 2.0 * lambda / r;
  const double hi = lambda * (2.0 + r * t) / r;
  assert((lo > 0.0) == (hi > 0.0));
  return std::exp(-lo) * (expint(hi) - expint(lo));
}

double aux_L_quadrature(double r, double lambda, double t, const StabilityConfig& cfg) {
  if (!(r > 0.0)) throw std::invalid_argument("aux_L_quadrature: r must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("aux_L_quadrature: t must be nonnegative");
  if (t == 0.0) return 0.0;
  auto f = [r, lambda](double s) { return r * std::exp(lambda * s) / (2.0 + r * s); };
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, 0.0, t, cfg.max_quad_subdivisions, cfg.quad_rel_tol);
}

}  // namespace mih
