#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "mih/hawkes.hpp"
#include "mih/market.hpp"
#include "mih/strategy.hpp"

namespace mih {

// Invalid configuration; `path` is the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct RunNumerics {
  double ode_step = 1e-3;
  double grid_step = 5e-4;
  double eta_threshold = 1e-2;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
};

struct RunConfig {
  ImpactParams market;
  HawkesSpec hawkes;
  double x0 = 0.0;
  double T = 1.0;
  double D0 = 0.0;
  double S0 = 0.0;
  RunNumerics numerics;
  nlohmann::json source;

  ExecutionProblem problem() const;
  StrategyNumerics strategy_numerics() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Reference setup of the figure1 command (q = 100, T = 1, beta = 20, kappa_infty = 12,
// exponential marks of mean 50) at resilience rho.
nlohmann::json figure1_json(double rho);

}  // namespace mih
