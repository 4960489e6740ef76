#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mih/config.hpp"
#include "mih/hawkes.hpp"
#include "mih/market.hpp"
#include "mih/montecarlo.hpp"
#include "mih/pms.hpp"
#include "mih/strategy.hpp"

namespace mih::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> grid_step;
  std::string out = ".";
  bool no_timestamp = false;
  std::string mode = "feedback";
  std::string policy = "optimal";
  double lambda = 0.5;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

fs::path out_file(const Options& o, const std::string& name) {
  fs::create_directories(o.out);
  return fs::path(o.out) / name;
}

std::ofstream open_out(const Options& o, const std::string& name) {
  const auto p = out_file(o, name);
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void write_json(const Options& o, const std::string& name, ordered_json j) {
  if (!o.no_timestamp) j["generated_at"] = utc_now();
  auto f = open_out(o, name);
  f << j.dump(2) << '\n';
}

struct Resolved {
  RunConfig cfg;
  std::uint64_t seed;
  std::size_t paths;
  double grid_step;
};

Resolved resolve(const Options& o) {
  auto cfg = load_config(o.config_path);
  Resolved r{cfg, o.seed.value_or(cfg.numerics.seed), o.paths.value_or(cfg.numerics.n_paths),
             o.grid_step.value_or(cfg.numerics.grid_step)};
  if (!(r.grid_step > 0.0)) throw ConfigError("--grid-step", "must be positive");
  if (r.paths < 2) throw ConfigError("--paths", "must be at least 2");
  return r;
}

ExecutionMode parse_mode(const std::string& m) {
  if (m == "feedback") return ExecutionMode::feedback;
  if (m == "explicit") return ExecutionMode::explicit_formulas;
  throw ConfigError("--mode", "expected feedback or explicit");
}

ordered_json estimate_json(const Estimate& e) {
  return {{"mean", e.mean}, {"stderr", e.stderr_}, {"n_paths", e.n_paths}, {"ci95", {e.ci95.first, e.ci95.second}}};
}

double initial_value(const CoefficientSet& coeffs) {
  const auto& p = coeffs.problem();
  return value_function(coeffs, 0.0, p.x0, p.D0, p.S0, p.delta0, p.Sigma0);
}

int cmd_simulate(const Options& o) {
  const auto r = resolve(o);
  const auto path = simulate(r.cfg.hawkes, r.cfg.T, r.seed);
  auto f = open_out(o, "events.csv");
  write_event_path_csv(f, path);
  std::cout << "simulated " << path.size() << " events\n";
  return kOk;
}

int cmd_execute(const Options& o) {
  const auto r = resolve(o);
  const auto problem = r.cfg.problem();
  const CoefficientSet coeffs(problem, r.cfg.strategy_numerics());
  const auto path = simulate(problem.spec, problem.T, r.seed);
  const auto res = execute_optimal(path, coeffs, parse_mode(o.mode), r.grid_step);
  {
    auto f = open_out(o, "trajectory.csv");
    write_trajectory_csv(f, res.trajectory);
  }
  {
    const auto ow = ow_schedule(problem.x0, problem.T, problem.S0 + problem.D0, problem.params);
    const auto ow_run = replay_schedule(path, problem, ow.schedule, r.grid_step);
    auto f = open_out(o, "ow_trajectory.csv");
    write_trajectory_csv(f, ow_run.trajectory);
  }
  {
    std::vector<TraceRow> trace;
    realized_cost(path, res.schedule, problem.initial_state(), problem.params, &trace);
    auto f = open_out(o, "trace.csv");
    write_trace_csv(f, trace);
  }
  ordered_json j{{"mode", o.mode},           {"seed", r.seed},
                 {"grid_step", r.grid_step}, {"n_events", path.size()},
                 {"cost", res.cost},         {"value_function", initial_value(coeffs)},
                 {"initial_block", res.schedule.initial_block},
                 {"terminal_block", res.schedule.terminal_block}};
  write_json(o, "cost.json", j);
  std::cout << "realized cost " << res.cost << '\n';
  return kOk;
}

int cmd_value(const Options& o) {
  const auto r = resolve(o);
  const auto problem = r.cfg.problem();
  const CoefficientSet coeffs(problem, r.cfg.strategy_numerics());
  const auto ow = ow_schedule(problem.x0, problem.T, problem.S0 + problem.D0, problem.params);
  const auto v = coeffs.at(problem.T);
  const auto eg = coeffs.eg(problem.T);
  ordered_json j{{"value_function", initial_value(coeffs)},
                 {"ow_expected_cost", ow.expected_cost},
                 {"optimal_initial_position", optimal_initial_position(coeffs, problem.D0, problem.delta0)},
                 {"eta", coeffs.eta()},
                 {"coefficients_at_T",
                  {{"a", v.a}, {"b", v.b}, {"c", v.c}, {"j", v.j}, {"k", v.k}, {"G_eta", v.G}, {"c_hat", v.c_hat},
                   {"e", eg.e}, {"g", eg.g}}}};
  write_json(o, "value.json", j);
  std::cout << "value " << initial_value(coeffs) << '\n';
  return kOk;
}

int cmd_mc_cost(const Options& o) {
  const auto r = resolve(o);
  const auto problem = r.cfg.problem();
  const CoefficientSet coeffs(problem, r.cfg.strategy_numerics());
  Policy policy;
  if (o.policy == "optimal") {
    policy = optimal_policy(coeffs, r.grid_step);
  } else if (o.policy == "ow") {
    policy = ow_policy(problem);
  } else if (o.policy == "poisson_arb") {
    policy = poisson_arb_policy(o.lambda, problem.params);
  } else {
    throw ConfigError("--policy", "expected optimal, ow or poisson_arb");
  }
  const auto est = estimate_cost(policy, problem, r.paths, r.seed);
  ordered_json j{{"policy", policy.name},
                 {"n_paths", est.n_paths},
                 {"seed", r.seed},
                 {"grid_step", r.grid_step},
                 {"mean", est.mean},
                 {"stderr", est.stderr_},
                 {"ci95", {est.ci95.first, est.ci95.second}},
                 {"value_function", initial_value(coeffs)},
                 {"params_echo", ordered_json::parse(r.cfg.source.dump())}};
  write_json(o, "mc_cost.json", j);
  std::cout << "mean " << est.mean << " +/- " << est.stderr_ << '\n';
  return kOk;
}

int cmd_pms_check(const Options& o) {
  const auto r = resolve(o);
  const auto report = mihm_diagnosis(r.cfg.problem());
  auto f = open_out(o, "pms_check.json");
  f << report.to_json() << '\n';
  std::cout << report.verdict() << '\n';
  return kOk;
}

int cmd_poisson_arb(const Options& o) {
  const auto r = resolve(o);
  const auto problem = r.cfg.problem();
  const auto& spec = problem.spec;
  if (!spec.is_poisson() || spec.kappa0_plus() != spec.kappa0_minus()) {
    throw ConfigError("/hawkes", "poisson-arb needs beta = 0, no excitation and kappa0_plus = kappa0_minus");
  }
  const auto path = simulate(spec, problem.T, r.seed);
  const auto sched = poisson_arbitrage(o.lambda, path, problem.params);
  {
    auto f = open_out(o, "poisson_arb_schedule.csv");
    f << "t,dX\n" << std::setprecision(17);
    for (const auto& b : sched.event_blocks) f << b.time << ',' << b.size << '\n';
    f << problem.T << ',' << sched.terminal_block << '\n';
  }
  MarketState init = problem.initial_state();
  init.X = 0.0;
  const double kappa0 = spec.kappa0_plus();
  const double m2 = spec.marks().m2();
  ordered_json j{
      {"lambda", o.lambda},
      {"seed", r.seed},
      {"realized_cost", realized_cost(path, sched, init, problem.params)},
      {"expected_cost", poisson_arbitrage_expected_cost(o.lambda, kappa0, m2, problem.params, problem.T)},
      {"optimal_round_trip_cost", poisson_optimal_cost(problem.D0, kappa0, m2, problem.params, problem.T)}};
  if (o.paths) {
    auto rt = problem;
    rt.x0 = 0.0;
    j["monte_carlo"] = estimate_json(estimate_cost(poisson_arb_policy(o.lambda, problem.params), rt, r.paths, r.seed));
  }
  write_json(o, "poisson_arb_cost.json", j);
  return kOk;
}

int cmd_figure1(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(1);
  const auto cfg25 = parse_config(figure1_json(25.0));
  const auto cfg16 = parse_config(figure1_json(16.0));
  const double grid = o.grid_step.value_or(cfg25.numerics.grid_step);
  const auto p25 = cfg25.problem();
  const auto p16 = cfg16.problem();
  const auto path = simulate(p25.spec, p25.T, seed);
  {
    auto f = open_out(o, "figure1_events.csv");
    write_event_path_csv(f, path);
  }
  ordered_json summary{{"seed", seed}, {"n_events", path.size()}, {"grid_step", grid}};
  for (const auto* p : {&p25, &p16}) {
    const CoefficientSet coeffs(*p, cfg25.strategy_numerics());
    const auto res = execute_optimal(path, coeffs, ExecutionMode::feedback, grid);
    const int rho = static_cast<int>(p->params.rho);
    auto f = open_out(o, "figure1_rho" + std::to_string(rho) + ".csv");
    write_trajectory_csv(f, res.trajectory);
    std::size_t opposing = 0;
    std::size_t same = 0;
    const auto& ev = path.events();
    std::size_t ie = 0;
    for (const auto& b : res.schedule.event_blocks) {
      double dn = 0.0;
      while (ie < ev.size() && ev[ie].tau <= b.time) {
        if (ev[ie].tau == b.time) dn += ev[ie].dN();
        ++ie;
      }
      if (b.size * dn < 0.0) ++opposing;
      if (b.size * dn > 0.0) ++same;
    }
    summary["rho" + std::to_string(rho)] = {{"cost", res.cost},
                                           {"reaction_blocks", res.schedule.event_blocks.size()},
                                           {"opposing", opposing},
                                           {"same_direction", same}};
  }
  {
    const auto ow = ow_schedule(p25.x0, p25.T, p25.S0 + p25.D0, p25.params);
    const auto run = replay_schedule(path, p25, ow.schedule, grid);
    auto f = open_out(o, "figure1_ow.csv");
    write_trajectory_csv(f, run.trajectory);
  }
  write_json(o, "figure1_summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Optimal execution under marked Hawkes order flow"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub, bool needs_config) {
    if (needs_config) sub->add_option("config", o.config_path, "JSON configuration")->required();
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--paths", o.paths, "number of Monte Carlo paths");
    sub->add_option("--grid-step", o.grid_step, "rate discretization step");
    sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--no-timestamp", o.no_timestamp, "omit the generated_at field");
  };

  auto* sim = app.add_subcommand("simulate", "simulate one order flow path");
  add_common(sim, true);
  auto* exe = app.add_subcommand("execute", "run the optimal strategy on one simulated path");
  add_common(exe, true);
  exe->add_option("--mode", o.mode, "feedback or explicit");
  auto* val = app.add_subcommand("value", "evaluate the value function");
  add_common(val, true);
  auto* mc = app.add_subcommand("mc-cost", "Monte Carlo expected cost");
  add_common(mc, true);
  mc->add_option("--policy", o.policy, "optimal, ow or poisson_arb");
  mc->add_option("--lambda", o.lambda, "poisson_arb fraction");
  auto* pms = app.add_subcommand("pms-check", "diagnose price manipulation conditions");
  add_common(pms, true);
  auto* arb = app.add_subcommand("poisson-arb", "round trip against a Poisson flow");
  add_common(arb, true);
  arb->add_option("--lambda", o.lambda, "fraction of each order that is counter-traded");
  auto* fig = app.add_subcommand("figure1", "strategies at rho = 25 and rho = 16 on one shared path");
  add_common(fig, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*sim) return cmd_simulate(o);
    if (*exe) return cmd_execute(o);
    if (*val) return cmd_value(o);
    if (*mc) return cmd_mc_cost(o);
    if (*pms) return cmd_pms_check(o);
    if (*arb) return cmd_poisson_arb(o);
    if (*fig) return cmd_figure1(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  std::cerr << app.help();
  return kUsage;
}

}  // namespace mih::cli
