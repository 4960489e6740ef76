#include "mih/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mih/pms.hpp"

namespace mih {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Pairwise summation over [lo, hi) keeps the reduction order fixed.
double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 16) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Estimate Estimate::from_samples(const std::vector<double>& samples) {
  Estimate e;
  e.n_paths = samples.size();
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  e.mean = pairwise_sum(samples, 0, samples.size()) / n;
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
    const double var = pairwise_sum(sq, 0, sq.size()) / (n - 1.0);
    e.stderr_ = std::sqrt(var / n);
  }
  e.ci95 = {e.mean - 1.96 * e.stderr_, e.mean + 1.96 * e.stderr_};
  return e;
}

std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

unsigned worker_count() {
  if (const char* env = std::getenv("MIHEXEC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

Policy optimal_policy(const CoefficientSet& coeffs, double grid_step) {
  return {"optimal", [&coeffs, grid_step](const EventPath& path) {
            return execute_optimal(path, coeffs, ExecutionMode::feedback, grid_step).schedule;
          }};
}

Policy ow_policy(const ExecutionProblem& problem) {
  const auto ow = ow_schedule(problem.x0, problem.T, problem.S0 + problem.D0, problem.params).schedule;
  return {"ow", [ow](const EventPath&) { return ow; }};
}

Policy poisson_arb_policy(double lambda, const ImpactParams& params) {
  return {"poisson_arb", [lambda, params](const EventPath& path) { return poisson_arbitrage(lambda, path, params); }};
}

Estimate estimate_cost(const Policy& policy, const ExecutionProblem& problem, std::size_t n_paths,
                       std::uint64_t seed) {
  if (n_paths < 2) throw std::invalid_argument("estimate_cost needs at least two paths");
  const auto init = problem.initial_state();
  const auto costs = parallel_map(n_paths, [&](std::size_t i) {
    const auto path = simulate(problem.spec, problem.T, path_seed(seed, i));
    return realized_cost(path, policy.schedule(path), init, problem.params);
  });
  return Estimate::from_samples(costs);
}

std::vector<Estimate> perturbation_test(const Policy& base, const ExecutionProblem& problem,
                                        const std::vector<TradeSchedule>& perturbations, std::size_t n_paths,
                                        std::uint64_t seed) {
  if (n_paths < 2) throw std::invalid_argument("perturbation_test needs at least two paths");
  for (std::size_t k = 0; k < perturbations.size(); ++k) {
    const auto& p = perturbations[k];
    if (std::abs(p.net_change()) > 1e-12 * std::max(1.0, p.gross_volume())) {
      throw std::invalid_argument("perturbation " + std::to_string(k) + " is not a round trip");
    }
  }
  const std::size_t m = perturbations.size();
  std::vector<double> diffs(n_paths * m, 0.0);
  const auto init = problem.initial_state();
  parallel_for(n_paths, [&](std::size_t i) {
    const auto path = simulate(problem.spec, problem.T, path_seed(seed, i));
    const auto sched = base.schedule(path);
    const double c0 = realized_cost(path, sched, init, problem.params);
    for (std::size_t k = 0; k < m; ++k) {
      const double c1 = realized_cost(path, merge_schedules(sched, perturbations[k]), init, problem.params);
      diffs[k * n_paths + i] = c1 - c0;
    }
  });
  std::vector<Estimate> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> col(diffs.begin() + static_cast<std::ptrdiff_t>(k * n_paths),
                            diffs.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_paths));
    out.push_back(Estimate::from_samples(col));
  }
  return out;
}

std::vector<DriftPoint> martingale_diagnostic(const HawkesSpec& spec, const ImpactParams& params, double D0,
                                              const std::vector<double>& t_grid, std::size_t n_paths,
                                              std::uint64_t seed) {
  params.validate();
  if (t_grid.empty()) throw std::invalid_argument("martingale_diagnostic: empty grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()) || !(t_grid.front() >= 0.0)) {
    throw std::invalid_argument("martingale_diagnostic: grid must be sorted and nonnegative");
  }
  const double horizon = std::max(t_grid.back(), 1e-12);
  const std::size_t m = t_grid.size();
  std::vector<double> drift(n_paths * m);
  std::vector<double> dsq(n_paths * m);
  parallel_for(n_paths, [&](std::size_t i) {
    const auto path = simulate(spec, horizon, path_seed(seed, i));
    MarketState st;
    st.D = D0;
    std::size_t ie = 0;
    const auto& ev = path.events();
    for (std::size_t k = 0; k < m; ++k) {
      const double t = t_grid[k];
      while (ie < ev.size() && ev[ie].tau <= t) st = apply_market_order(st, ev[ie++], params);
      st = evolve(st, t - st.t, 0.0, params);
      st.t = t;
      drift[k * n_paths + i] = st.P() - D0;
      dsq[k * n_paths + i] = st.D * st.D;
    }
  });
  std::vector<DriftPoint> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto slice = [&](const std::vector<double>& v) {
      return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(k * n_paths),
                                 v.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_paths));
    };
    out.push_back({t_grid[k], Estimate::from_samples(slice(drift)), Estimate::from_samples(slice(dsq))});
  }
  return out;
}

}  // namespace mih
