#pragma once

#include <string>

#include "mih/hawkes.hpp"
#include "mih/market.hpp"
#include "mih/strategy.hpp"

namespace mih {

struct MihmReport {
  bool beta_eq_rho = false;
  double beta_rho_residual = 0.0;
  bool alpha_eq_resilience = false;  // alpha = (1 - nu) rho
  double alpha_residual = 0.0;
  bool phi_diff_linear = false;
  double phi_diff_max_dev = 0.0;  // sup over the support sample of |(phi_s - phi_c)(y) - alpha y|
  bool steady_state = false;      // q D0 = m1 delta0 / rho
  double steady_state_residual = 0.0;
  bool dirac_zero = false;
  bool no_pms = false;

  std::string verdict() const { return no_pms ? "no_PMS" : "PMS_possible"; }
  std::string to_json() const;
};

// Relative tolerance used for the structural equalities.
inline constexpr double kStructuralTolerance = 1e-9;

MihmReport mihm_diagnosis(const ExecutionProblem& problem);

bool wpms_check(const HawkesSpec& spec, const ImpactParams& params);

// Posts -[(1 - nu)/(1 - eps)] lambda dN after every order; liquidates nothing else.
TradeSchedule poisson_arbitrage(double lambda, const EventPath& path, const ImpactParams& params);

double poisson_arbitrage_expected_cost(double lambda, double kappa0, double m2, const ImpactParams& params, double T);

double poisson_optimal_cost(double D0, double kappa0, double m2, const ImpactParams& params, double T);

// E[P_{t+h} - P_t | D, delta] for the uncontrolled market.
double expected_price(double D, double delta, double h, const ExecutionProblem& problem);

}  // namespace mih
