#include "mih/strategy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mih {

namespace {

using boost::math::quadrature::gauss_kronrod;

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGlNodes = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
constexpr std::array<double, 5> kGlWeights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};

// Largest beta T for which the Theta sums stay representable.
constexpr double kMaxBetaT = 600.0;

// (1/2 - omega(y)) / y, finite at y = 0 where it equals 1/6.
double omega_gap(double y, const StabilityConfig& cfg) {
  if (std::abs(y) >= cfg.series_threshold) return (0.5 - zeta_family(y, cfg).omega) / y;
  // sum_n (-y)^n / (n + 3)!
  double term = 1.0 / 6.0;
  double sum = term;
  for (int n = 1; n < 24; ++n) {
    term *= -y / (n + 3);
    sum += term;
  }
  return sum;
}

std::size_t grid_intervals(double T, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be positive");
  const double n = std::ceil(T / step - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, n));
}

}  // namespace

// ---------------------------------------------------------- ExecutionProblem

ExecutionProblem::ExecutionProblem(HawkesSpec spec_in, ImpactParams params_in, double x0_in, double T_in,
                                   double D0_in, double S0_in)
    : spec(std::move(spec_in)),
      params(params_in),
      x0(x0_in),
      T(T_in),
      D0(D0_in),
      S0(S0_in),
      delta0(spec.delta0()),
      Sigma0(spec.sigma0()) {
  validate();
}

void ExecutionProblem::validate() const {
  params.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive");
  if (!std::isfinite(x0) || !std::isfinite(D0) || !std::isfinite(S0)) {
    throw std::invalid_argument("x0, D0 and S0 must be finite");
  }
  if (Sigma0 < std::abs(delta0)) throw std::invalid_argument("Sigma0 must be at least |delta0|");
  if (spec.marks().m1() == 0.0 && spec.moments().alpha_tilde != 0.0) {
    throw std::invalid_argument("inconsistent mark law");
  }
}

MarketState ExecutionProblem::initial_state() const {
  MarketState s;
  s.S = S0;
  s.D = D0;
  s.X = x0;
  return s;
}

void StrategyNumerics::validate() const {
  if (!(ode_step > 0.0) || !std::isfinite(ode_step)) throw std::invalid_argument("ode_step must be positive");
  if (!(eta_threshold >= 0.0)) throw std::invalid_argument("eta_threshold must be nonnegative");
  stability.validate();
}

// ------------------------------------------------------------ CoefficientSet

CoefficientSet::CoefficientSet(const ExecutionProblem& problem, StrategyNumerics numerics)
    : problem_(problem), numerics_(numerics) {
  problem_.validate();
  numerics_.validate();
  const auto& p = problem_.params;
  const auto& mom = problem_.spec.moments();
  rho_ = p.rho;
  eps_ = p.epsilon;
  nu_ = p.nu;
  q_ = p.q;
  m1_ = problem_.spec.marks().m1();
  m2_ = problem_.spec.marks().m2();
  T_ = problem_.T;
  beta_ = problem_.spec.beta();
  alpha_ = mom.alpha;
  eta_ = beta_ - alpha_;
  iota_c_ = mom.iota_c;
  alpha_tilde_ = mom.alpha_tilde;
  alpha_2_ = mom.alpha_2;
  kappa_infty_ = problem_.spec.kappa_infty();
  integrate();
}

double CoefficientSet::G(double u) const {
  const auto z = zeta_family(eta_ * u, numerics_.stability);
  return z.zeta + nu_ * rho_ * u * z.omega;
}

double CoefficientSet::K(double u) const { return 2.0 + rho_ * u * (1.0 + G(u)); }

double CoefficientSet::k(double u) const { return m1_ / (2.0 * rho_) * K(u) / (2.0 + rho_ * u); }

CoefficientValues CoefficientSet::at(double u) const {
  if (!(u >= 0.0) || u > T_ * (1.0 + 1e-12)) throw std::invalid_argument("coefficients: u outside [0, T]");
  const auto z = zeta_family(eta_ * u, numerics_.stability);
  const double ru = rho_ * u;
  const double den = 2.0 + ru;
  const double inv1e = 1.0 / (1.0 - eps_);
  const double g = z.zeta + nu_ * ru * z.omega;
  const double mr = m1_ / rho_;
  CoefficientValues v{};
  v.G = g;
  v.a = inv1e * (1.0 / den - 0.5 * eps_);
  v.j = 1.0 / den;
  v.b = inv1e * (ru / den) * mr * g;
  v.k = m1_ / (2.0 * rho_) * (2.0 + ru * (1.0 + g)) / den;
  const double d = eta_ - nu_ * rho_;
  v.c_hat = inv1e * d * d * (rho_ * u * u * u / 8.0) * z.omega_prime * z.zeta;
  v.c = -inv1e * (0.5 * ru / den) * mr * mr * g * g + v.c_hat * mr * mr;
  return v;
}

double CoefficientSet::b_rhs(double u) const {
  const double b = at(u).b;
  const double den = 2.0 + rho_ * u;
  return (-eta_ - rho_ / den) * b + m1_ / (1.0 - eps_) * (1.0 + nu_ * rho_ * u) / den;
}

double CoefficientSet::c_rhs(double u) const {
  const auto v = at(u);
  return -2.0 * eta_ * v.c + (1.0 - nu_) * m1_ * v.b - rho_ / (1.0 - eps_) * v.k * v.k;
}

double CoefficientSet::e_rhs(double u, double e) const {
  const auto v = at(std::min(u, T_));
  return -(eta_ - 2.0 * iota_c_) * e + alpha_tilde_ * (1.0 - nu_) * v.b + alpha_2_ * v.c +
         (1.0 - nu_) * (1.0 - nu_) * m2_ / (1.0 - eps_) * (1.0 / (2.0 + rho_ * u) - 0.5);
}

void CoefficientSet::integrate() {
  const std::size_t n = grid_intervals(T_, numerics_.ode_step);
  step_ = T_ / static_cast<double>(n);
  e_.assign(n + 1, 0.0);
  g_.assign(n + 1, 0.0);
  const double h = step_;
  const double gk = 2.0 * beta_ * kappa_infty_;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) * h;
    const double e = e_[i];
    const double k1 = e_rhs(u, e);
    const double k2 = e_rhs(u + 0.5 * h, e + 0.5 * h * k1);
    const double k3 = e_rhs(u + 0.5 * h, e + 0.5 * h * k2);
    const double k4 = e_rhs(u + h, e + h * k3);
    e_[i + 1] = e + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // g' = gk e, so the stage values of g are the e stages.
    const double ge1 = e;
    const double ge2 = e + 0.5 * h * k1;
    const double ge3 = e + 0.5 * h * k2;
    const double ge4 = e + h * k3;
    g_[i + 1] = g_[i] + h / 6.0 * gk * (ge1 + 2.0 * ge2 + 2.0 * ge3 + ge4);
  }
}

EG CoefficientSet::eg(double u) const {
  if (!(u >= 0.0) || u > T_ * (1.0 + 1e-12)) throw std::invalid_argument("eg: u outside [0, T]");
  u = std::min(u, T_);
  const std::size_t n = e_.size() - 1;
  std::size_t i = static_cast<std::size_t>(u / step_);
  if (i >= n) i = n - 1;
  const double h = step_;
  const double u0 = static_cast<double>(i) * h;
  const double s = (u - u0) / h;
  // Cubic Hermite interpolation with the exact derivatives from the equations.
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  const double gk = 2.0 * beta_ * kappa_infty_;
  const double e0 = e_[i];
  const double e1 = e_[i + 1];
  const double de0 = e_rhs(u0, e0);
  const double de1 = e_rhs(u0 + h, e1);
  EG out{};
  out.e = h00 * e0 + h10 * h * de0 + h01 * e1 + h11 * h * de1;
  out.g = h00 * g_[i] + h10 * h * gk * e0 + h01 * g_[i + 1] + h11 * h * gk * e1;
  return out;
}

void CoefficientSet::override_eg(std::vector<double> e, std::vector<double> g) {
  if (e.size() != e_.size() || g.size() != g_.size()) throw std::invalid_argument("override_eg: size mismatch");
  e_ = std::move(e);
  g_ = std::move(g);
}

double CoefficientSet::phi_eta(double t) const {
  const double w = T_ - t;
  const auto z = zeta_family(eta_ * w, numerics_.stability);
  const double big_k = 2.0 + rho_ * w * (1.0 + z.zeta + nu_ * rho_ * w * z.omega);
  return 0.5 * (1.0 + std::exp(-eta_ * w) + nu_ * rho_ * w * z.zeta + beta_ / rho_ * big_k) / (2.0 + rho_ * w);
}

double CoefficientSet::phi_zero(double t) const {
  const double w = T_ - t;
  const double big_k = 2.0 + rho_ * w * (2.0 + 0.5 * nu_ * rho_ * w);
  return 0.5 * (2.0 + nu_ * rho_ * w + beta_ / rho_ * big_k) / (2.0 + rho_ * w);
}

double CoefficientSet::Phi_closed(double s, double t) const {
  if (eta_ == 0.0) throw std::domain_error("Phi_closed requires eta != 0");
  const double inv_eta = 1.0 / eta_;
  const double nre = nu_ * rho_ * inv_eta;
  const double c1 = 1.0 + nu_ * (rho_ - 2.0 * beta_) * inv_eta + beta_ * inv_eta * (1.0 - nre);
  const double c2 = 1.0 - nre - beta_ * inv_eta * (1.0 - nre);
  const double ebT = std::exp(-beta_ * T_) / (2.0 * rho_);
  return 0.5 * (1.0 / rho_ + nu_ * inv_eta) * (std::exp(-beta_ * s) - std::exp(-beta_ * t)) +
         ebT * c1 * (aux_L(rho_, beta_, T_ - s) - aux_L(rho_, beta_, T_ - t)) +
         ebT * c2 * (aux_L(rho_, alpha_, T_ - s) - aux_L(rho_, alpha_, T_ - t));
}

double CoefficientSet::Phi_zero(double s, double t) const {
  const double es = std::exp(-beta_ * s);
  const double et = std::exp(-beta_ * t);
  // (e^{-beta s} - e^{-beta t}) / beta without the beta = 0 singularity.
  const double dexp = es * (t - s) * zeta_family(beta_ * (t - s), numerics_.stability).zeta;
  const double br = beta_ / rho_;
  return (br + 0.5 * nu_ * (0.5 - br)) * dexp +
         (1.0 - nu_) * (1.0 - br) * std::exp(-beta_ * T_) / rho_ *
             (aux_L(rho_, beta_, T_ - s) - aux_L(rho_, beta_, T_ - t)) +
         0.25 * nu_ * ((T_ - s) * es - (T_ - t) * et);
}

double CoefficientSet::Phi_near_zero(double s, double t) const {
  if (t <= s) return 0.0;
  const auto& st = numerics_.stability;
  // phi_eta - phi_0 with every term carrying its factor eta (T - u) explicitly.
  auto f = [this, &st](double u) {
    const double w = T_ - u;
    const double y = eta_ * w;
    const auto z = zeta_family(y, st);
    const double nrw = nu_ * rho_ * w;
    const double diff = -y * (z.zeta + nrw * z.omega + beta_ * w * (z.omega + nrw * omega_gap(y, st)));
    return 0.5 * diff / (2.0 + rho_ * w) * std::exp(-beta_ * u);
  };
  return Phi_zero(s, t) + gauss_kronrod<double, 31>::integrate(f, s, t, st.max_quad_subdivisions, st.quad_rel_tol);
}

double CoefficientSet::Phi(double s, double t) const {
  if (std::abs(eta_) * T_ < numerics_.eta_threshold) return Phi_near_zero(s, t);
  return Phi_closed(s, t);
}

// ------------------------------------------------------------- eta = 0 forms

EG eg_critical(const ExecutionProblem& problem, double u, const StabilityConfig& cfg) {
  const auto& p = problem.params;
  const auto& mom = problem.spec.moments();
  const double beta = problem.spec.beta();
  const double eta = beta - mom.alpha;
  if (std::abs(eta) > 1e-12 * std::max(1.0, beta)) throw std::domain_error("eg_critical requires eta = 0");
  if (u == 0.0) return {0.0, 0.0};
  const double rho = p.rho;
  const double nu = p.nu;
  const double inv1e = 1.0 / (1.0 - p.epsilon);
  const double m1 = problem.spec.marks().m1();
  const double m2 = problem.spec.marks().m2();
  const double ic = mom.iota_c;
  const double at = mom.alpha_tilde;
  const double a2 = mom.alpha_2;
  const double bk = beta * problem.spec.kappa_infty();

  auto I = [&](int pw) {
    auto f = [&](double s) { return std::pow(s, pw) * std::exp(2.0 * ic * (u - s)); };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, u, cfg.max_quad_subdivisions, cfg.quad_rel_tol);
  };
  const double I0 = I(0), I1 = I(1), I2 = I(2), I3 = I(3), I4 = I(4);
  const double eL = std::exp(2.0 * ic * u) * aux_L(rho, -2.0 * ic, u);
  const double lg = std::log1p(0.5 * rho * u);
  // [e^{2 ic u} L - ln(1 + rho u / 2)] / (2 ic rho), with its ic -> 0 limit.
  double bracket;
  if (std::abs(ic) * u > 1e-2) {
    bracket = (eL - lg) / (2.0 * ic * rho);
  } else {
    auto f = [&](double s) {
      const double w = u - s;
      return w * zeta_family(-2.0 * ic * w, cfg).zeta / (2.0 + rho * s);
    };
    bracket = gauss_kronrod<double, 31>::integrate(f, 0.0, u, cfg.max_quad_subdivisions, cfg.quad_rel_tol);
  }

  const double big_a = m2 - m1 * (2.0 * at * rho - a2 * m1) / (rho * rho);
  const double n1 = (1.0 - nu) * (1.0 - nu) * inv1e * big_a;
  const double mix = nu * (1.0 - nu) * m1 * inv1e * (at - a2 * m1 / rho);
  const double quad = a2 * nu * nu * m1 * m1 * inv1e;
  const double r2 = rho * rho, r3 = r2 * rho, r4 = r3 * rho, r5 = r4 * rho;

  EG out{};
  out.e = -n1 * (0.5 * I0 - eL / rho) + mix / (2.0 * r2) * r2 * I1 -
          quad / (4.0 * r3) * (r2 * I1 + 0.5 * r3 * I2 + r4 * I3 / 12.0);
  out.g = -2.0 * bk * n1 * (0.5 * I1 - bracket) + bk * mix / (2.0 * r3) * r3 * I2 -
          bk * quad / (4.0 * r4) * (r3 * I2 + r4 * I3 / 3.0 + r5 * I4 / 24.0);
  return out;
}

// ------------------------------------------------------------ OW benchmark

OwSchedule ow_schedule(double x0, double T, double P0, const ImpactParams& params) {
  params.validate();
  if (!(T > 0.0)) throw std::invalid_argument("ow_schedule: T must be positive");
  const double den = 2.0 + params.rho * T;
  OwSchedule out;
  out.schedule.initial_block = -x0 / den;
  out.schedule.terminal_block = -x0 / den;
  out.schedule.rate.push_back({0.0, T, -params.rho * x0 / den});
  out.expected_cost = -P0 * x0 + ((1.0 - params.epsilon) / den + 0.5 * params.epsilon) * x0 * x0 / params.q;
  return out;
}

// ------------------------------------------------------------ value function

double value_function(const CoefficientSet& coeffs, double t, double x, double d, double z, double delta,
                      double Sigma) {
  const auto& pr = coeffs.problem();
  if (!(t >= 0.0) || t > pr.T * (1.0 + 1e-12)) throw std::invalid_argument("value_function: t outside [0, T]");
  const double tau = std::max(0.0, pr.T - t);
  const double q = pr.params.q;
  const double eps = pr.params.epsilon;
  const double rho = pr.params.rho;
  const double rt = rho * tau;
  const double den = 2.0 + rt;
  const auto v = coeffs.at(tau);
  const double mr = coeffs.m1() / rho;
  const double w = q * d - v.G * delta * mr;
  const auto eg = coeffs.eg(tau);
  const double qc = -q * (z + d) * x + ((1.0 - eps) / den + 0.5 * eps) * x * x + (rt / den) * w * x -
                    (1.0 / (1.0 - eps)) * (0.5 * rt / den) * w * w + v.c_hat * (delta * mr) * (delta * mr) +
                    eg.e * Sigma + eg.g;
  return qc / q;
}

double reaction_block(const CoefficientSet& coeffs, double tau, double dN, double dI) {
  const auto& pr = coeffs.problem();
  if (!(tau > 0.0) || !(tau < pr.T)) throw std::invalid_argument("reaction_block: tau outside (0, T)");
  const double rho = pr.params.rho;
  const double nu = pr.params.nu;
  const double u = pr.T - tau;
  const double ru = rho * u;
  const double m1 = coeffs.m1();
  const double eta = coeffs.eta();
  const double om = zeta_family(eta * u, coeffs.numerics().stability).omega;
  const double num = (1.0 + ru) / (2.0 + ru) * (m1 / rho * dI - (1.0 - nu) * dN) +
                     m1 / (2.0 * rho) * (nu * rho - eta) * (rho * u * u * om / (2.0 + ru)) * dI;
  return num / (1.0 - pr.params.epsilon);
}

// ------------------------------------------------------------ execution

namespace {

struct Breakpoint {
  double t;
  std::size_t first_event;  // index range of events at t
  std::size_t last_event;
};

// Grid points, event times and any extra times in (0, T], each once.
std::vector<Breakpoint> breakpoints(const EventPath& path, double T, double grid_step,
                                    const std::vector<double>& extra = {}) {
  const std::size_t n = grid_intervals(T, grid_step);
  std::vector<double> times;
  times.reserve(n + path.size() + extra.size());
  for (std::size_t k = 1; k <= n; ++k) {
    times.push_back(k == n ? T : T * static_cast<double>(k) / static_cast<double>(n));
  }
  for (const auto& e : path.events()) times.push_back(e.tau);
  for (double x : extra) {
    if (x > 0.0 && x <= T) times.push_back(x);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const auto& ev = path.events();
  std::vector<Breakpoint> out;
  out.reserve(times.size());
  std::size_t ie = 0;
  for (double t : times) {
    const std::size_t first = ie;
    while (ie < ev.size() && ev[ie].tau <= t) ++ie;
    out.push_back({t, first, ie});
  }
  return out;
}

}  // namespace

ExecutionResult execute_optimal(const EventPath& path, const CoefficientSet& coeffs, ExecutionMode mode,
                                double grid_step) {
  const auto& pr = coeffs.problem();
  const double T = pr.T;
  if (std::abs(path.horizon() - T) > 1e-12 * T) throw std::invalid_argument("path horizon differs from T");
  const auto& params = pr.params;
  const double q = params.q;
  const double eps = params.epsilon;
  const double rho = params.rho;
  const double nu = params.nu;
  const double m1 = coeffs.m1();
  const double beta = coeffs.beta();
  const auto& ev = path.events();
  const auto bps = breakpoints(path, T, grid_step);

  ExecutionResult res;
  auto& sched = res.schedule;
  sched.rate.reserve(bps.size());
  res.trajectory.reserve(bps.size() + 1);

  MarketState st = pr.initial_state();
  double delta = pr.delta0;
  double N = 0.0;

  // Feedback target: (1 - eps) X = -A q D + B delta at time-to-go u.
  auto A_of = [&](double u) { return 1.0 + rho * u; };
  auto B_of = [&](double u) { return (2.0 + rho * u) * coeffs.k(u); };
  auto implicit_block = [&](double u) {
    const double A = A_of(u);
    return (-A * q * st.D + B_of(u) * delta - (1.0 - eps) * st.X) / ((1.0 - eps) * (1.0 + A));
  };

  // Explicit-mode running sums.
  const bool explicit_mode = mode == ExecutionMode::explicit_formulas;
  if (explicit_mode && beta * T > kMaxBetaT) {
    throw std::domain_error("explicit execution needs beta T <= 600");
  }
  const double den_T = 2.0 + rho * T;
  const double ow_rate = -rho * pr.x0 / den_T;
  const double KT = coeffs.K(T);
  double theta = 0.0;          // Theta_{chi}
  double tau_chi = 0.0;        // tau_{chi}
  double theta_phi_sum = 0.0;  // sum_{i < chi} Theta_i Phi(tau_i, tau_{i+1})
  double sum_n = 0.0;          // sum (1 - nu) dN / (2 + rho (T - tau))
  double sum_i = 0.0;          // sum K(T - tau) / (2 + rho (T - tau)) dI
  std::size_t chi = 0;

  auto explicit_rate_at = [&](double t) {
    const double phi = coeffs.phi_eta(t);
    const double ebt = std::exp(-beta * t);
    const double phi0t = coeffs.Phi(0.0, t);
    const double phichi = chi > 0 ? coeffs.Phi(tau_chi, t) : 0.0;
    const double trend = pr.delta0 * m1 / (2.0 * rho) * (KT / den_T - 2.0 * rho * phi0t - 2.0 * phi * ebt) * rho +
                         rho * q * pr.D0 / den_T;
    const double dyn = -m1 * phi * theta * ebt + rho * sum_n + 0.5 * m1 * sum_i -
                       rho * m1 * (theta * phichi + theta_phi_sum);
    return ow_rate + (trend + dyn) / (1.0 - eps);
  };

  // Initial block.
  double block0;
  if (explicit_mode) {
    res.trend_initial_block =
        (pr.delta0 * m1 / (2.0 * rho) * KT - (1.0 + rho * T) * q * pr.D0) / (den_T * (1.0 - eps));
    block0 = -pr.x0 / den_T + res.trend_initial_block;
  } else {
    block0 = implicit_block(T);
  }
  sched.initial_block = block0;
  res.trajectory.push_back({0.0, st.X, block0, 0.0, st.D, st.P(), N, delta});
  st = apply_block(st, block0, params).state;

  double t0 = 0.0;
  for (const auto& bp : bps) {
    const double t1 = bp.t;
    const double h = t1 - t0;
    double rate;
    if (explicit_mode) {
      double acc = 0.0;
      for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
        acc += kGlWeights[i] * explicit_rate_at(t0 + 0.5 * h * (1.0 + kGlNodes[i]));
      }
      rate = 0.5 * acc;
    } else {
      const double u1 = T - t1;
      const double A1 = A_of(u1);
      const double e1 = std::exp(-rho * h);
      const double hz = h * zeta_family(rho * h).zeta;
      const double delta1 = delta * std::exp(-beta * h);
      rate = (-A1 * q * st.D * e1 + B_of(u1) * delta1 - (1.0 - eps) * st.X) / ((1.0 - eps) * (h + A1 * hz));
    }
    res.trajectory.back().rate = rate;
    sched.rate.push_back({t0, t1, rate});
    st = evolve(st, h, rate, params);
    st.t = t1;
    delta *= std::exp(-beta * h);

    double dn_sum = 0.0;
    double di_sum = 0.0;
    for (std::size_t i = bp.first_event; i < bp.last_event; ++i) {
      const auto& e = ev[i];
      st = apply_market_order(st, e, params);
      N += e.dN();
      delta += e.delta_I;
      dn_sum += e.dN();
      di_sum += e.delta_I;
      if (explicit_mode) {
        const double w = T - e.tau;
        const double theta_new = theta + std::exp(beta * e.tau) * e.delta_I;
        if (chi > 0) theta_phi_sum += theta * coeffs.Phi(tau_chi, e.tau);
        theta = theta_new;
        tau_chi = e.tau;
        ++chi;
        sum_n += (1.0 - nu) * e.dN() / (2.0 + rho * w);
        sum_i += coeffs.K(w) / (2.0 + rho * w) * e.delta_I;
      }
    }
    const bool has_events = bp.last_event > bp.first_event;
    double block = 0.0;
    if (has_events && t1 < T) {
      block = explicit_mode ? reaction_block(coeffs, t1, dn_sum, di_sum) : implicit_block(T - t1);
      sched.event_blocks.push_back({t1, block});
    }
    res.trajectory.push_back({t1, st.X, block, 0.0, st.D, st.P(), N, delta});
    if (block != 0.0) st = apply_block(st, block, params).state;
    t0 = t1;
  }

  sched.terminal_block = -st.X;
  res.trajectory.back().dX_block += sched.terminal_block;

  if (explicit_mode) {
    const double trend_T =
        pr.delta0 * m1 / (2.0 * rho) * (KT / den_T - 2.0 * rho * coeffs.Phi(0.0, T) - 2.0 * std::exp(-beta * T)) +
        q * pr.D0 / den_T;
    const double phichi = chi > 0 ? coeffs.Phi(tau_chi, T) : 0.0;
    const double dyn_T = -m1 * (theta * phichi + theta_phi_sum) + sum_n + m1 / (2.0 * rho) * sum_i -
                         m1 / rho * theta * std::exp(-beta * T);
    res.explicit_terminal_block = -pr.x0 / den_T + (trend_T + dyn_T) / (1.0 - eps);
  }

  res.cost = realized_cost(path, sched, pr.initial_state(), params);
  return res;
}

ExecutionResult replay_schedule(const EventPath& path, const ExecutionProblem& problem, const TradeSchedule& schedule,
                                double grid_step) {
  const double T = problem.T;
  if (std::abs(path.horizon() - T) > 1e-12 * T) throw std::invalid_argument("path horizon differs from T");
  std::vector<double> extra;
  for (const auto& b : schedule.event_blocks) extra.push_back(b.time);
  for (const auto& r : schedule.rate) {
    extra.push_back(r.start);
    extra.push_back(r.end);
  }
  const auto bps = breakpoints(path, T, grid_step, extra);
  const auto& params = problem.params;
  const auto& ev = path.events();

  // Average schedule rate on [a, b].
  std::size_t is = 0;
  auto mean_rate = [&](double a, double b) {
    while (is < schedule.rate.size() && schedule.rate[is].end <= a) ++is;
    double acc = 0.0;
    for (std::size_t k = is; k < schedule.rate.size() && schedule.rate[k].start < b; ++k) {
      const double lo = std::max(a, schedule.rate[k].start);
      const double hi = std::min(b, schedule.rate[k].end);
      if (hi > lo) acc += schedule.rate[k].rate * (hi - lo);
    }
    return acc / (b - a);
  };

  ExecutionResult res;
  res.schedule = schedule;
  MarketState st = problem.initial_state();
  double delta = problem.delta0;
  double N = 0.0;
  const double beta = problem.spec.beta();
  res.trajectory.push_back({0.0, st.X, schedule.initial_block, 0.0, st.D, st.P(), N, delta});
  st = apply_block(st, schedule.initial_block, params).state;
  std::size_t ib = 0;
  while (ib < schedule.event_blocks.size() && schedule.event_blocks[ib].time <= 0.0) {
    res.trajectory.back().dX_block += schedule.event_blocks[ib].size;
    st = apply_block(st, schedule.event_blocks[ib++].size, params).state;
  }
  double t0 = 0.0;
  for (const auto& bp : bps) {
    const double h = bp.t - t0;
    const double rate = mean_rate(t0, bp.t);
    res.trajectory.back().rate = rate;
    st = evolve(st, h, rate, params);
    st.t = bp.t;
    delta *= std::exp(-beta * h);
    for (std::size_t i = bp.first_event; i < bp.last_event; ++i) {
      st = apply_market_order(st, ev[i], params);
      N += ev[i].dN();
      delta += ev[i].delta_I;
    }
    double block = 0.0;
    while (ib < schedule.event_blocks.size() && schedule.event_blocks[ib].time <= bp.t) {
      block += schedule.event_blocks[ib++].size;
    }
    res.trajectory.push_back({bp.t, st.X, block, 0.0, st.D, st.P(), N, delta});
    if (block != 0.0) st = apply_block(st, block, params).state;
    t0 = bp.t;
  }
  res.trajectory.back().dX_block += -st.X;
  res.cost = realized_cost(path, schedule, problem.initial_state(), params);
  return res;
}

double int_phi_delta(const EventPath& path, double t, const CoefficientSet& coeffs) {
  if (!(t >= 0.0) || t > path.horizon()) throw std::invalid_argument("int_phi_delta: t outside [0, T]");
  const auto& ev = path.events();
  const double beta = coeffs.beta();
  double acc = path.delta0() * coeffs.Phi(0.0, t);
  double theta = 0.0;
  const std::size_t chi = path.count_until(t);
  for (std::size_t i = 0; i < chi; ++i) {
    theta += std::exp(beta * ev[i].tau) * ev[i].delta_I;
    const double upper = i + 1 < chi ? ev[i + 1].tau : t;
    acc += theta * coeffs.Phi(ev[i].tau, upper);
  }
  return acc;
}

double optimal_initial_position(const CoefficientSet& coeffs, double D0, double delta0) {
  const auto& pr = coeffs.problem();
  const double rho = pr.params.rho;
  const double rT = rho * pr.T;
  const double w = pr.params.q * D0 - coeffs.G(pr.T) * delta0 * coeffs.m1() / rho;
  return -rT * w / (2.0 + pr.params.epsilon * rT);
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& trajectory) {
  out << "t,X,dX_block,rate,D,P,N,delta\n";
  out << std::setprecision(17);
  for (const auto& p : trajectory) {
    out << p.t << ',' << p.X << ',' << p.dX_block << ',' << p.rate << ',' << p.D << ',' << p.P << ',' << p.N << ','
        << p.delta << '\n';
  }
}

}  // namespace mih
