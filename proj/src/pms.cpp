#include "mih/pms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mih/special_functions.hpp"

namespace mih {

namespace {

bool rel_equal(double a, double b, double& residual) {
  residual = std::abs(a - b);
  return residual <= kStructuralTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

double linearity_deviation(const HawkesSpec& spec, double slope) {
  const auto& ex = spec.excitation();
  double dev = 0.0;
  for (double y : spec.marks().support_sample()) {
    dev = std::max(dev, std::abs(ex.self(y) - ex.cross(y) - slope * y));
  }
  return dev;
}

bool linear_enough(double dev, double slope) { return dev <= kStructuralTolerance * std::max(1.0, std::abs(slope)); }

}  // namespace

std::string MihmReport::to_json() const {
  nlohmann::ordered_json j;
  j["beta_eq_rho"] = beta_eq_rho;
  j["alpha_eq_resilience"] = alpha_eq_resilience;
  j["phi_diff_linear"] = phi_diff_linear;
  j["phi_diff_max_dev"] = phi_diff_max_dev;
  j["steady_state"] = steady_state;
  j["steady_state_residual"] = steady_state_residual;
  j["verdict"] = verdict();
  return j.dump(2);
}

MihmReport mihm_diagnosis(const ExecutionProblem& problem) {
  const auto& spec = problem.spec;
  const auto& p = problem.params;
  MihmReport r;
  r.beta_eq_rho = rel_equal(spec.beta(), p.rho, r.beta_rho_residual);
  r.alpha_eq_resilience = rel_equal(spec.moments().alpha, (1.0 - p.nu) * p.rho, r.alpha_residual);
  r.phi_diff_max_dev = linearity_deviation(spec, spec.moments().alpha);
  r.phi_diff_linear = linear_enough(r.phi_diff_max_dev, spec.moments().alpha);
  const double m1 = spec.marks().m1();
  r.steady_state = rel_equal(p.q * problem.D0, m1 * problem.delta0 / p.rho, r.steady_state_residual);
  r.dirac_zero = spec.marks().is_dirac_zero();
  r.no_pms = (r.beta_eq_rho && r.alpha_eq_resilience && r.phi_diff_linear && r.steady_state) ||
             (r.dirac_zero && problem.D0 == 0.0);
  return r;
}

bool wpms_check(const HawkesSpec& spec, const ImpactParams& params) {
  params.validate();
  if (spec.marks().is_dirac_zero()) return true;
  double res = 0.0;
  const bool beta_ok = rel_equal(spec.beta(), params.rho, res);
  const bool alpha_ok = rel_equal(spec.moments().alpha, (1.0 - params.nu) * params.rho, res);
  const double dev = linearity_deviation(spec, spec.moments().alpha);
  return beta_ok && alpha_ok && linear_enough(dev, spec.moments().alpha);
}

TradeSchedule poisson_arbitrage(double lambda, const EventPath& path, const ImpactParams& params) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("poisson_arbitrage: lambda must lie in (0, 1)");
  params.validate();
  const double factor = -(1.0 - params.nu) / (1.0 - params.epsilon) * lambda;
  TradeSchedule s;
  double net = 0.0;
  for (const auto& e : path.events()) {
    const double dx = factor * e.dN();
    s.event_blocks.push_back({e.tau, dx});
    net += dx;
  }
  s.terminal_block = -net;
  return s;
}

double poisson_arbitrage_expected_cost(double lambda, double kappa0, double m2, const ImpactParams& params,
                                       double T) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("poisson_arbitrage: lambda must lie in (0, 1)");
  params.validate();
  const double rho = params.rho;
  const double one_nu = 1.0 - params.nu;
  // (1 - e^{-rho T})/rho - T = -rho T^2 omega(rho T)
  const double bracket = -rho * T * T * omega(rho * T);
  return 2.0 * lambda * (1.0 - lambda) * kappa0 * m2 * one_nu * one_nu / (params.q * (1.0 - params.epsilon)) *
         bracket;
}

double poisson_optimal_cost(double D0, double kappa0, double m2, const ImpactParams& params, double T) {
  params.validate();
  const double rho = params.rho;
  const double q = params.q;
  const double rt = rho * T;
  const double one_nu = 1.0 - params.nu;
  const double lhs = -(0.5 * rt / (2.0 + rt)) * q * q * D0 * D0 -
                     one_nu * one_nu * 2.0 * kappa0 * m2 * (0.5 * T - std::log1p(0.5 * rt) / rho);
  return lhs / ((1.0 - params.epsilon) * q);
}

double expected_price(double D, double delta, double h, const ExecutionProblem& problem) {
  if (!(h >= 0.0)) throw std::invalid_argument("expected_price: h must be nonnegative");
  const auto& p = problem.params;
  const double rho = p.rho;
  const double eta = problem.spec.eta();
  const double m1q = problem.spec.marks().m1() / p.q;
  const double int_delta = h * zeta(eta * h);  // int_0^h e^{-eta u} du
  const double int_decay = h * zeta(rho * h);  // int_0^h e^{-rho u} du
  // int_0^h int_0^u e^{-rho(u-s)} e^{-eta s} ds du = [h zeta(eta h) - h zeta(rho h)]/(rho - eta)
  double dd;
  if (std::abs(rho - eta) * h < 1e-4) {
    // Divided difference of y -> h zeta(y h) at the midpoint.
    const double mid = 0.5 * (rho + eta) * h;
    dd = -h * h * zeta_family(mid).zeta_prime;
  } else {
    dd = (int_delta - int_decay) / (rho - eta);
  }
  return m1q * delta * int_delta - rho * (D * int_decay + (1.0 - p.nu) * m1q * delta * dd);
}

}  // namespace mih
