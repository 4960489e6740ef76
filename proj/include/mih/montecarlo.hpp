#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mih/hawkes.hpp"
#include "mih/market.hpp"
#include "mih/strategy.hpp"

namespace mih {

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
  std::pair<double, double> ci95{0.0, 0.0};

  static Estimate from_samples(const std::vector<double>& samples);
};

// Seed of path `index` under `master`; independent of scheduling.
std::uint64_t path_seed(std::uint64_t master, std::uint64_t index);

// Worker count: MIHEXEC_THREADS when set and positive, otherwise the hardware count.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on worker_count() threads and returns the results by index.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& fn);

struct Policy {
  std::string name;
  std::function<TradeSchedule(const EventPath&)> schedule;
};

Policy optimal_policy(const CoefficientSet& coeffs, double grid_step);
Policy ow_policy(const ExecutionProblem& problem);
Policy poisson_arb_policy(double lambda, const ImpactParams& params);

Estimate estimate_cost(const Policy& policy, const ExecutionProblem& problem, std::size_t n_paths,
                       std::uint64_t seed);

// Common-random-numbers estimates of E[C(base + pi)] - E[C(base)], one per perturbation.
std::vector<Estimate> perturbation_test(const Policy& base, const ExecutionProblem& problem,
                                        const std::vector<TradeSchedule>& perturbations, std::size_t n_paths,
                                        std::uint64_t seed);

struct DriftPoint {
  double t;
  Estimate drift;    // P_t - P_0 with X = 0
  Estimate d_squared;  // D_t^2
};

std::vector<DriftPoint> martingale_diagnostic(const HawkesSpec& spec, const ImpactParams& params, double D0,
                                              const std::vector<double>& t_grid, std::size_t n_paths,
                                              std::uint64_t seed);

}  // namespace mih
