#pragma once

#include <iosfwd>
#include <vector>

#include "mih/hawkes.hpp"
#include "mih/market.hpp"
#include "mih/special_functions.hpp"

namespace mih {

struct ExecutionProblem {
  ExecutionProblem(HawkesSpec spec, ImpactParams params, double x0, double T, double D0, double S0);

  HawkesSpec spec;
  ImpactParams params;
  double x0;
  double T;
  double D0;
  double S0;
  double delta0;  // kappa0^+ - kappa0^-
  double Sigma0;  // kappa0^+ + kappa0^-

  void validate() const;
  MarketState initial_state() const;
};

struct StrategyNumerics {
  double ode_step = 1e-3;
  // |eta| T below which Phi_eta is assembled from the eta = 0 closed form.
  double eta_threshold = 1e-2;
  StabilityConfig stability;

  void validate() const;
};

struct CoefficientValues {
  double a;
  double b;
  double c;
  double j;
  double k;
  double G;      // G_eta
  double c_hat;  // c_hat_eta
};

struct EG {
  double e;
  double g;
};

// All time-to-maturity functions of one execution problem. Built once and
// shared read-only.
class CoefficientSet {
 public:
  explicit CoefficientSet(const ExecutionProblem& problem, StrategyNumerics numerics = {});

  const ExecutionProblem& problem() const { return problem_; }
  const StrategyNumerics& numerics() const { return numerics_; }

  CoefficientValues at(double u) const;
  double G(double u) const;
  // K(u) = 2 + rho u (1 + zeta(eta u) + nu rho u omega(eta u)) so that k = m1/(2 rho) K/(2 + rho u).
  double K(double u) const;
  double k(double u) const;

  // Right-hand sides of the b, c, e, g equations; used by the integrator and the residual checks.
  double b_rhs(double u) const;
  double c_rhs(double u) const;
  double e_rhs(double u, double e) const;

  EG eg(double u) const;
  const std::vector<double>& e_table() const { return e_; }
  const std::vector<double>& g_table() const { return g_; }
  double table_step() const { return step_; }
  // Replaces the tabulated e, g (used to show the strategy does not depend on them).
  void override_eg(std::vector<double> e, std::vector<double> g);

  // phi_eta(t) and Phi_eta(s, t) = int_s^t phi_eta(u) e^{-beta u} du.
  double phi_eta(double t) const;
  double Phi(double s, double t) const;
  double Phi_closed(double s, double t) const;  // Ei form, eta != 0
  double Phi_zero(double s, double t) const;    // eta = 0 closed form, with phi_0
  double Phi_near_zero(double s, double t) const;
  double phi_zero(double t) const;

  double rho() const { return rho_; }
  double eta() const { return eta_; }
  double beta() const { return beta_; }
  double m1() const { return m1_; }

 private:
  void integrate();

  ExecutionProblem problem_;
  StrategyNumerics numerics_;
  double rho_, eps_, nu_, m1_, m2_, q_, T_;
  double beta_, alpha_, eta_, iota_c_, alpha_tilde_, alpha_2_, kappa_infty_;
  double step_ = 0.0;
  std::vector<double> e_;
  std::vector<double> g_;
};

// Closed forms of e and g when eta = 0.
EG eg_critical(const ExecutionProblem& problem, double u, const StabilityConfig& cfg = {});

struct OwSchedule {
  TradeSchedule schedule;
  double expected_cost;
};
OwSchedule ow_schedule(double x0, double T, double P0, const ImpactParams& params);

double value_function(const CoefficientSet& coeffs, double t, double x, double d, double z, double delta,
                      double Sigma);

// Reaction block at an order of signed size dN and intensity jump dI at time tau in (0, T).
double reaction_block(const CoefficientSet& coeffs, double tau, double dN, double dI);

enum class ExecutionMode { feedback, explicit_formulas };

struct TrajectoryPoint {
  double t;
  double X;        // position before any block at t
  double dX_block; // block executed at t+
  double rate;     // rate on the step that starts at t
  double D;        // after any market order at t, before the block
  double P;
  double N;
  double delta;
};

struct ExecutionResult {
  TradeSchedule schedule;
  std::vector<TrajectoryPoint> trajectory;
  double cost = 0.0;
  // Explicit mode only: the closed-form terminal block, reported next to -X_T.
  double explicit_terminal_block = 0.0;
  // Explicit mode only: initial blocks split into the trend and dynamic parts.
  double trend_initial_block = 0.0;
};

ExecutionResult execute_optimal(const EventPath& path, const CoefficientSet& coeffs, ExecutionMode mode,
                                double grid_step);

// Trajectory of a fixed schedule sampled on the same breakpoints as execute_optimal.
ExecutionResult replay_schedule(const EventPath& path, const ExecutionProblem& problem, const TradeSchedule& schedule,
                                double grid_step);

// int_0^t phi_eta(u) delta_u du along the path.
double int_phi_delta(const EventPath& path, double t, const CoefficientSet& coeffs);

// Minimiser of value_function(0, x0, ...) + P0 x0 over x0.
double optimal_initial_position(const CoefficientSet& coeffs, double D0, double delta0);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& trajectory);

}  // namespace mih
