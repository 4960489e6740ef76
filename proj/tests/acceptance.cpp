// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "../tools/cli.hpp"
#include "mih/config.hpp"
#include "mih/hawkes.hpp"
#include "mih/market.hpp"
#include "mih/montecarlo.hpp"
#include "mih/pms.hpp"
#include "mih/special_functions.hpp"
#include "mih/strategy.hpp"
#include "test_support.hpp"

using namespace mih;
using namespace mih::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string sci(double a) { return fmt("%.3e", a); }

double max_abs(const std::vector<TrajectoryPoint>& tr) {
  double m = 0.0;
  for (const auto& p : tr) m = std::max(m, std::abs(p.X));
  return m;
}

// Largest relative residual of (1 - eps) X + (1 + rho u) q D = (2 + rho u) k(u) delta over (0, T).
double identity_residual(const ExecutionResult& r, const CoefficientSet& cs) {
  const auto& pr = cs.problem();
  const double q = pr.params.q, eps = pr.params.epsilon, rho = pr.params.rho;
  double worst = 0.0;
  for (const auto& p : r.trajectory) {
    if (p.t <= 0.0 || p.t >= pr.T) continue;
    const double u = pr.T - p.t;
    const double X = p.X + p.dX_block;
    const double D = p.D + (1.0 - eps) * p.dX_block / q;
    const double lhs = (1.0 - eps) * X;
    const double a = (1.0 + rho * u) * q * D;
    const double b = (2.0 + rho * u) * cs.k(u) * p.delta;
    const double scale = std::max({std::abs(lhs), std::abs(a), std::abs(b)});
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs + a - b) / scale);
  }
  return worst;
}

ExecutionProblem silent(const ImpactParams& p, double x0, double T, double S0) {
  HawkesSpec spec(20.0, 0.0, 0.0, 0.0, MarkLaw::exponential(50.0), figure1_excitation());
  return ExecutionProblem(spec, p, x0, T, 0.0, S0);
}

constexpr double kGrid = 5e-4;

// ------------------------------------------------------------------ 1

Outcome martingale_residual() {
  double worst = 0.0;
  for (double rho : {25.0, 16.0}) {
    const auto pr = figure1_problem(rho);
    const CoefficientSet cs(pr);
    const auto res = parallel_map(100, [&](std::size_t i) {
      const auto path = simulate(pr.spec, pr.T, path_seed(1001, i));
      return identity_residual(execute_optimal(path, cs, ExecutionMode::feedback, kGrid), cs);
    });
    worst = std::max(worst, *std::max_element(res.begin(), res.end()));
  }
  return {worst <= 1e-8, "max relative residual " + sci(worst) + " over 100 paths x rho {25, 16} (tol 1e-8)"};
}

// ------------------------------------------------------------------ 2

Outcome feedback_vs_explicit() {
  double worst = 0.0;
  std::size_t over = 0;
  for (double rho : {25.0, 16.0}) {
    const auto pr = figure1_problem(rho);
    const CoefficientSet cs(pr);
    const double h = pr.T / 4000.0;
    const auto dev = parallel_map(100, [&](std::size_t i) {
      const auto path = simulate(pr.spec, pr.T, path_seed(1002, i));
      const auto f = execute_optimal(path, cs, ExecutionMode::feedback, h);
      const auto e = execute_optimal(path, cs, ExecutionMode::explicit_formulas, h);
      if (f.trajectory.size() != e.trajectory.size()) return 1.0;
      double d = 0.0;
      for (std::size_t k = 0; k < f.trajectory.size(); ++k) {
        d = std::max(d, std::abs(f.trajectory[k].X - e.trajectory[k].X));
      }
      return d / max_abs(e.trajectory);
    });
    for (double d : dev) {
      worst = std::max(worst, d);
      if (d > 1e-6) ++over;
    }
  }
  return {worst <= 1e-6, "max |X_f - X_e| / max |X_e| = " + sci(worst) + ", " + std::to_string(over) +
                             "/200 path runs above 1e-6 at step T/4000 (tol 1e-6)"};
}

// ------------------------------------------------------------------ 3

Outcome value_function_match() {
  const auto pr = figure1_problem(25.0);
  const CoefficientSet cs(pr);
  const auto est = estimate_cost(optimal_policy(cs, kGrid), pr, 100000, 1003);
  const double v = value_function(cs, 0.0, pr.x0, pr.D0, pr.S0, pr.delta0, pr.Sigma0);
  const double gap = std::abs(est.mean - v);
  return {gap <= 3.0 * est.stderr_, "MC " + fmt("%.4f", est.mean) + " +/- " + fmt("%.4f", est.stderr_) +
                                        ", value function " + fmt("%.4f", v) + ", gap " +
                                        fmt("%.2f", gap / est.stderr_) + " stderr (10^5 paths, tol 3)"};
}

// ------------------------------------------------------------------ 4

Outcome poisson_arbitrage_check() {
  const ImpactParams p{1.0, 1.0, 0.0, 0.0};
  const ExecutionProblem pr(poisson_spec(1.0), p, 0.0, 1.0, 0.0, 0.0);
  const std::size_t n = 100000;
  const std::vector<double> lambdas{0.5, 0.25, 0.75};
  std::vector<std::vector<double>> costs(lambdas.size());
  const auto init = pr.initial_state();
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    costs[k] = parallel_map(n, [&](std::size_t i) {
      const auto path = simulate(pr.spec, pr.T, path_seed(1004, i));
      return realized_cost(path, poisson_arbitrage(lambdas[k], path, p), init, p);
    });
  }
  const auto half = Estimate::from_samples(costs[0]);
  const double target = -0.18394;
  bool ok = std::abs(half.mean - target) <= 3.0 * half.stderr_;
  std::string detail = "lambda 1/2: MC " + fmt("%.5f", half.mean) + " +/- " + fmt("%.5f", half.stderr_) +
                       " vs -0.18394";
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = costs[0][i] - costs[k][i];
    const auto d = Estimate::from_samples(diff);
    ok = ok && d.mean < 0.0;
    detail += "; C(1/2) - C(" + fmt("%.2f", lambdas[k]) + ") = " + fmt("%.5f", d.mean) + " +/- " +
              fmt("%.5f", d.stderr_);
  }
  return {ok, detail + " (CRN, 10^5 paths)"};
}

// ------------------------------------------------------------------ 5

Outcome mihm_degeneration() {
  const auto pr = mihm_problem(2.0);
  const CoefficientSet cs(pr);
  const auto ow = ow_schedule(pr.x0, pr.T, pr.S0 + pr.D0, pr.params).schedule;
  double worst_block = 0.0, worst_exec_block = 0.0, worst_traj = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto path = simulate(pr.spec, pr.T, path_seed(1005, i));
    for (const auto& e : path.events()) {
      if (e.tau >= pr.T) continue;
      worst_block = std::max(worst_block, std::abs(reaction_block(cs, e.tau, e.dN(), e.delta_I)));
    }
    const auto r = execute_optimal(path, cs, ExecutionMode::feedback, kGrid);
    for (const auto& b : r.schedule.event_blocks) worst_exec_block = std::max(worst_exec_block, std::abs(b.size));
    const auto o = replay_schedule(path, pr, ow, kGrid);
    if (o.trajectory.size() != r.trajectory.size()) return {false, "trajectory grids differ"};
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
      worst_traj = std::max(worst_traj, std::abs(r.trajectory[k].X - o.trajectory[k].X) / std::abs(pr.x0));
    }
  }
  std::vector<double> grid;
  for (int k = 1; k <= 10; ++k) grid.push_back(0.1 * k);
  const auto drift = martingale_diagnostic(pr.spec, pr.params, pr.D0, grid, 100000, 1005);
  // Simultaneous 95% band over the grid.
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - 0.025 / static_cast<double>(grid.size()));
  bool covered = true;
  double worst_z = 0.0;
  for (const auto& d : drift) {
    const double zz = std::abs(d.drift.mean) / d.drift.stderr_;
    worst_z = std::max(worst_z, zz);
    covered = covered && zz <= z;
  }
  const bool ok = worst_block <= 1e-12 && worst_exec_block <= 1e-12 * std::abs(pr.x0) && worst_traj <= 1e-10 &&
                  covered;
  return {ok, "max |reaction block| " + sci(worst_block) + ", executed " + sci(worst_exec_block) +
                  ", max |X - X_ow| / |x0| " + sci(worst_traj) + ", drift max |mean|/stderr " +
                  fmt("%.2f", worst_z) + " vs band " + fmt("%.2f", z) + " at 10 times (10^5 paths)"};
}

// ------------------------------------------------------------------ 6

Outcome ow_benchmark() {
  double worst = 0.0;
  const std::vector<std::pair<ImpactParams, double>> cases{
      {ImpactParams{100.0, 25.0, 0.3, 0.3}, -500.0},
      {ImpactParams{100.0, 16.0, 0.3, 0.3}, -500.0},
      {ImpactParams{5.0, 2.0, 0.0, 0.0}, 40.0},
      {ImpactParams{1.0, 0.5, 0.9, 0.6}, -3.0},
  };
  for (const auto& [p, x0] : cases) {
    for (double T : {0.5, 1.0, 3.0}) {
      const auto pr = silent(p, x0, T, 1.5);
      const auto path = simulate(pr.spec, T, 1);
      if (path.size() != 0) return {false, "silent market produced orders"};
      const auto sched = ow_schedule(x0, T, pr.S0, p).schedule;
      const double cost = realized_cost(path, sched, pr.initial_state(), p);
      const double P0 = pr.S0;
      const double closed =
          -P0 * x0 + ((1.0 - p.epsilon) / (2.0 + p.rho * T) + 0.5 * p.epsilon) * x0 * x0 / p.q;
      worst = std::max(worst, rel_err(cost, closed));
    }
  }
  return {worst <= 1e-10, "max relative error " + sci(worst) + " over 12 settings (tol 1e-10)"};
}

// ------------------------------------------------------------------ 7

ExecutionProblem shifted_critical(double shift) {
  const auto base = critical_problem();
  const auto& s = base.spec;
  HawkesSpec spec(s.beta() + shift, s.kappa_infty(), s.kappa0_plus(), s.kappa0_minus(), s.marks(), s.excitation());
  return ExecutionProblem(std::move(spec), base.params, base.x0, base.T, base.D0, base.S0);
}

Outcome coefficient_system() {
  double eg_err = 0.0;
  {
    const auto pr = critical_problem();
    StrategyNumerics num;
    num.ode_step = pr.T / 2000.0;
    const CoefficientSet cs(pr, num);
    for (int i = 1; i <= 40; ++i) {
      const double u = pr.T * i / 40.0;
      const auto ref = eg_critical(pr, u);
      const auto got = cs.eg(u);
      eg_err = std::max({eg_err, rel_err(got.e, ref.e), rel_err(got.g, ref.g)});
    }
  }
  double ode = 0.0;
  {
    // Richardson-extrapolated central differences; plain ones are truncation-limited where e, g are steep.
    const double h = 1e-4;
    for (const auto& pr : {figure1_problem(25.0), figure1_problem(16.0), critical_problem(), shifted_critical(0.9)}) {
      StrategyNumerics num;
      num.ode_step = pr.T / 4000.0;
      const CoefficientSet cs(pr, num);
      const double gk = 2.0 * pr.spec.beta() * pr.spec.kappa_infty();
      std::mt19937_64 rng(17);
      std::uniform_real_distribution<double> uu(2 * h, pr.T - 2 * h);
      for (int i = 0; i < 100; ++i) {
        const double u = uu(rng);
        const auto deriv = [&](auto f) {
          const double wide = (f(u + h) - f(u - h)) / (2 * h);
          const double narrow = (f(u + 0.5 * h) - f(u - 0.5 * h)) / h;
          return (4.0 * narrow - wide) / 3.0;
        };
        const double db = deriv([&](double x) { return cs.at(x).b; });
        const double dc = deriv([&](double x) { return cs.at(x).c; });
        const double de = deriv([&](double x) { return cs.eg(x).e; });
        const double dg = deriv([&](double x) { return cs.eg(x).g; });
        const double e = cs.eg(u).e;
        ode = std::max({ode, std::abs(db - cs.b_rhs(u)) / std::max(1.0, std::abs(db)),
                        std::abs(dc - cs.c_rhs(u)) / std::max(1.0, std::abs(dc)),
                        std::abs(de - cs.e_rhs(u, e)) / std::max(1.0, std::abs(de)),
                        std::abs(dg - gk * e) / std::max(1.0, std::abs(dg))});
      }
    }
  }
  double l_err = 0.0;
  {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ur(0.1, 30.0), ul(-25.0, 25.0), ut(0.0, 2.0);
    for (int i = 0; i < 500; ++i) {
      const double r = ur(rng), l = ul(rng), t = ut(rng);
      if (std::abs(l) * (2.0 + r * t) / r < 1e-12) continue;
      l_err = std::max(l_err, rel_err(aux_L(r, l, t), aux_L_quadrature(r, l, t)));
    }
  }
  double seam = 0.0;
  {
    const double s = StabilityConfig{}.series_threshold;
    for (double sign : {-1.0, 1.0}) {
      const auto lo = zeta_family(sign * std::nextafter(s, 0.0));
      const auto hi = zeta_family(sign * s);
      seam = std::max({seam, rel_err(lo.zeta, hi.zeta), rel_err(lo.omega, hi.omega),
                       rel_err(lo.zeta_prime, hi.zeta_prime), rel_err(lo.omega_prime, hi.omega_prime)});
    }
    const double T = critical_problem().T;
    const double thr = StrategyNumerics{}.eta_threshold;
    for (double sign : {-1.0, 1.0}) {
      const CoefficientSet cs(shifted_critical(sign * thr / T));
      for (auto [a, b] : {std::pair{0.0, T}, std::pair{0.3, 1.2}}) {
        seam = std::max(seam, rel_err(cs.Phi_near_zero(a, b), cs.Phi_closed(a, b)));
      }
    }
  }
  const bool ok = eg_err <= 1e-6 && ode <= 1e-6 && l_err <= 1e-10 && seam <= 1e-8;
  return {ok, "e/g vs eta=0 closed forms " + sci(eg_err) + " (1e-6), ODE residual " + sci(ode) + " (1e-6), L " +
                  sci(l_err) + " (1e-10), seams " + sci(seam) + " (1e-8)"};
}

// ------------------------------------------------------------------ 8

TradeSchedule blocks(double t1, double t2) {
  TradeSchedule s;
  s.event_blocks = {{t1, 1.0}, {t2, -1.0}};
  return s;
}

TradeSchedule rates(double a, double b, double c, double d) {
  TradeSchedule s;
  s.rate = {{a, b, 1.0 / (b - a)}, {c, d, -1.0 / (d - c)}};
  return s;
}

std::vector<TradeSchedule> perturbation_battery() {
  std::vector<TradeSchedule> out;
  for (auto [t1, t2] : {std::pair{0.05, 0.3}, {0.1, 0.9}, {0.2, 0.25}, {0.4, 0.6}, {0.7, 0.8}}) {
    out.push_back(blocks(t1, t2));
    out.push_back(scale_schedule(blocks(t1, t2), -1.0));
  }
  for (auto [a, b, c, d] : {std::tuple{0.0, 0.2, 0.3, 0.5}, {0.1, 0.4, 0.6, 0.9}, {0.5, 0.6, 0.8, 1.0}}) {
    out.push_back(rates(a, b, c, d));
    out.push_back(scale_schedule(rates(a, b, c, d), -1.0));
  }
  // Initial block unwound by a rate, and a rate unwound at the close.
  TradeSchedule s1;
  s1.initial_block = 1.0;
  s1.rate = {{0.0, 0.5, -2.0}};
  out.push_back(s1);
  out.push_back(scale_schedule(s1, -1.0));
  TradeSchedule s2;
  s2.rate = {{0.2, 0.6, 2.5}};
  s2.terminal_block = -1.0;
  out.push_back(s2);
  out.push_back(scale_schedule(s2, -1.0));
  return out;
}

Outcome perturbations() {
  const auto pr = figure1_problem(25.0);
  const CoefficientSet cs(pr);
  const auto base = perturbation_battery();
  const std::vector<double> scales{100.0, 200.0, 400.0};
  std::vector<TradeSchedule> all;
  for (const auto& p : base) {
    for (double s : scales) all.push_back(scale_schedule(p, s));
  }
  const auto est = perturbation_test(optimal_policy(cs, kGrid), pr, all, 10000, 1008);
  double worst_z = 0.0, worst_r2 = 1.0;
  bool nonneg = true;
  for (std::size_t k = 0; k < base.size(); ++k) {
    double sxy = 0.0, sxx = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < scales.size(); ++j) {
      const auto& e = est[k * scales.size() + j];
      nonneg = nonneg && e.mean >= -3.0 * e.stderr_;
      worst_z = std::min(worst_z, e.mean / e.stderr_);
      const double x = scales[j] * scales[j];
      sxy += x * e.mean;
      sxx += x * x;
      mean += e.mean / static_cast<double>(scales.size());
    }
    const double b = sxy / sxx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t j = 0; j < scales.size(); ++j) {
      const double d = est[k * scales.size() + j].mean;
      ss_res += (d - b * scales[j] * scales[j]) * (d - b * scales[j] * scales[j]);
      ss_tot += (d - mean) * (d - mean);
    }
    worst_r2 = std::min(worst_r2, 1.0 - ss_res / ss_tot);
  }
  const bool ok = nonneg && worst_r2 >= 0.99;
  return {ok, std::to_string(base.size()) + " round trips x scales {100, 200, 400}: min diff/stderr " + fmt("%.2f", worst_z) +
                  " (>= -3), min R^2 of s^2 fit " + fmt("%.5f", worst_r2) + " (>= 0.99), 10^4 CRN paths"};
}

// ------------------------------------------------------------------ 9

Outcome stationarity_check() {
  const auto base = figure1_spec();
  const auto rep = stationarity(base);
  if (!rep.stable || !rep.stationary_mean_sigma) return {false, "Figure 1 spec reported unstable"};
  const double target = *rep.stationary_mean_sigma;
  const auto spec = base.with_initial_intensities(0.5 * target, 0.5 * target);
  const double H = 50.0 / spec.beta();
  const auto avg = parallel_map(4000, [&](std::size_t i) {
    const auto path = simulate(spec, H, path_seed(1009, i));
    return integrated_sigma(path, H) / H;
  });
  const auto est = Estimate::from_samples(avg);
  const double gap = std::abs(est.mean - target);
  return {gap <= 3.0 * est.stderr_, "time-average Sigma " + fmt("%.3f", est.mean) + " +/- " +
                                        fmt("%.3f", est.stderr_) + " vs " + fmt("%.3f", target) + " over horizon " +
                                        fmt("%.2f", H) + " (4000 paths, tol 3 stderr)"};
}

// ------------------------------------------------------------------ 10

Outcome initial_position() {
  double worst = 0.0;
  for (double rho : {25.0, 16.0}) {
    const auto pr = figure1_problem(rho);
    const CoefficientSet cs(pr);
    const double P0 = pr.S0 + pr.D0;
    const double xs = optimal_initial_position(cs, pr.D0, pr.delta0);
    const double half = 10.0 * std::max(1.0, std::abs(xs));
    const double lo = xs - 0.93 * half, hi = xs + 1.07 * half;
    const int n = 1001;
    const double cell = (hi - lo) / (n - 1);
    int best = 0;
    double best_v = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = lo + cell * i;
      const double v = value_function(cs, 0.0, x, pr.D0, pr.S0, pr.delta0, pr.Sigma0) + P0 * x;
      if (i == 0 || v < best_v) {
        best_v = v;
        best = i;
      }
    }
    worst = std::max(worst, std::abs(lo + cell * best - xs) / cell);
  }
  return {worst <= 1.0, "grid argmin within " + fmt("%.3f", worst) + " cells of x0* for rho {25, 16} (tol 1)"};
}

// ------------------------------------------------------------------ 11

std::vector<double> csv_column(const std::filesystem::path& p, const std::string& name) {
  std::ifstream f(p);
  std::string line, cell;
  std::getline(f, line);
  std::stringstream hs(line);
  int idx = -1;
  for (int i = 0; std::getline(hs, cell, ','); ++i) {
    if (cell == name) idx = i;
  }
  std::vector<double> col;
  if (idx < 0) return col;
  while (std::getline(f, line)) {
    std::stringstream ls(line);
    for (int i = 0; std::getline(ls, cell, ','); ++i) {
      if (i == idx) col.push_back(std::stod(cell));
    }
  }
  return col;
}

Outcome figure1_qualitative() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / ("mih_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const std::string out = dir.string();
  const char* argv[] = {"mihexec", "figure1", "--out", out.c_str(), "--no-timestamp"};
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(5, argv);
  std::cout.rdbuf(old);
  if (code != 0) return {false, "figure1 command exited with " + std::to_string(code)};
  std::ifstream sf(dir / "figure1_summary.json");
  const auto summary = nlohmann::json::parse(sf);
  const auto t25 = csv_column(dir / "figure1_rho25.csv", "t");
  const auto t16 = csv_column(dir / "figure1_rho16.csv", "t");
  const auto events = csv_column(dir / "figure1_events.csv", "tau");
  bool shared = !t25.empty() && t25 == t16;
  for (double tau : events) {
    shared = shared && std::binary_search(t25.begin(), t25.end(), tau);
  }
  fs::remove_all(dir);
  const auto frac = [&](const char* rho, const char* key) {
    const auto& r = summary.at(rho);
    return r.at(key).get<double>() / std::max(1.0, r.at("reaction_blocks").get<double>());
  };
  const double opp25 = frac("rho25", "opposing");
  const double same16 = frac("rho16", "same_direction");
  const bool ok = opp25 > 0.5 && same16 > 0.5 && shared;
  return {ok, "rho=25 opposing " + fmt("%.3f", opp25) + ", rho=16 same-direction " + fmt("%.3f", same16) +
                  ", timestamps " + (shared ? "shared" : "NOT shared") + " (" + std::to_string(events.size()) +
                  " orders, seed 1)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "martingale-condition residual", martingale_residual},
      {2, "feedback vs explicit strategy", feedback_vs_explicit},
      {3, "value-function match", value_function_match},
      {4, "Poisson arbitrage", poisson_arbitrage_check},
      {5, "MIHM degeneration", mihm_degeneration},
      {6, "OW benchmark", ow_benchmark},
      {7, "coefficient system", coefficient_system},
      {8, "optimality perturbations", perturbations},
      {9, "stationarity", stationarity_check},
      {10, "initial position", initial_position},
      {11, "Figure 1 qualitative reproduction", figure1_qualitative},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ["
              << fmt("%.1f", secs) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
