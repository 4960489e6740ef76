#include "mih/market.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "mih/special_functions.hpp"

namespace mih {

void ImpactParams::validate() const {
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("q must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be positive");
  if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1)");
}

double TradeSchedule::net_change() const {
  double s = initial_block + terminal_block;
  for (const auto& b : event_blocks) s += b.size;
  for (const auto& r : rate) s += r.rate * (r.end - r.start);
  return s;
}

double TradeSchedule::gross_volume() const {
  double s = std::abs(initial_block) + std::abs(terminal_block);
  for (const auto& b : event_blocks) s += std::abs(b.size);
  for (const auto& r : rate) s += std::abs(r.rate) * (r.end - r.start);
  return s;
}

TradeSchedule merge_schedules(const TradeSchedule& a, const TradeSchedule& b) {
  TradeSchedule out;
  out.initial_block = a.initial_block + b.initial_block;
  out.terminal_block = a.terminal_block + b.terminal_block;
  out.event_blocks.reserve(a.event_blocks.size() + b.event_blocks.size());
  std::merge(a.event_blocks.begin(), a.event_blocks.end(), b.event_blocks.begin(), b.event_blocks.end(),
             std::back_inserter(out.event_blocks),
             [](const TimedBlock& x, const TimedBlock& y) { return x.time < y.time; });

  std::vector<double> cuts;
  for (const auto* s : {&a, &b}) {
    for (const auto& r : s->rate) {
      cuts.push_back(r.start);
      cuts.push_back(r.end);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::size_t ia = 0;
  std::size_t ib = 0;
  auto rate_on = [](const std::vector<RateSegment>& segs, std::size_t& i, double lo, double hi) {
    while (i < segs.size() && segs[i].end <= lo) ++i;
    if (i < segs.size() && segs[i].start <= lo && segs[i].end >= hi) return segs[i].rate;
    return 0.0;
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double r = rate_on(a.rate, ia, lo, hi) + rate_on(b.rate, ib, lo, hi);
    if (r != 0.0) out.rate.push_back({lo, hi, r});
  }
  return out;
}

TradeSchedule scale_schedule(const TradeSchedule& s, double factor) {
  TradeSchedule out = s;
  out.initial_block *= factor;
  out.terminal_block *= factor;
  for (auto& b : out.event_blocks) b.size *= factor;
  for (auto& r : out.rate) r.rate *= factor;
  return out;
}

MarketState apply_market_order(const MarketState& state, const Event& event, const ImpactParams& params) {
  if (event.tau < state.t) throw std::invalid_argument("apply_market_order: event precedes current time");
  MarketState s = state;
  s.D *= std::exp(-params.rho * (event.tau - state.t));
  s.t = event.tau;
  const double dn = event.dN();
  s.S += params.nu * dn / params.q;
  s.D += (1.0 - params.nu) * dn / params.q;
  return s;
}

BlockResult apply_block(const MarketState& state, double dx, const ImpactParams& params) {
  MarketState s = state;
  const double cost = state.P() * dx + dx * dx / (2.0 * params.q);
  s.realized_cost += cost;
  s.S += params.epsilon * dx / params.q;
  s.D += (1.0 - params.epsilon) * dx / params.q;
  s.X += dx;
  return {s, cost};
}

MarketState evolve(const MarketState& state, double h, double rate, const ImpactParams& params) {
  if (!(h >= 0.0)) throw std::invalid_argument("evolve: negative step");
  MarketState s = state;
  const double rh = params.rho * h;
  const double decay = std::exp(-rh);
  const auto zf = zeta_family(rh);
  const double hz = h * zf.zeta;        // int_0^h e^{-rho u} du
  const double h2w = h * h * zf.omega;  // int_0^h (1 - e^{-rho u}) / rho du
  const double q = params.q;
  const double eps = params.epsilon;
  if (rate != 0.0) {
    // int_0^h P_u du with P_u = S + eps r u / q + D e^{-rho u} + (1-eps)(r/q)(1-e^{-rho u})/rho
    const double int_p = state.S * h + eps * rate * h * h / (2.0 * q) + state.D * hz + (1.0 - eps) * rate / q * h2w;
    s.realized_cost += rate * int_p;
  }
  s.D = state.D * decay + (1.0 - eps) * rate * hz / q;
  s.S += eps * rate * h / q;
  s.X += rate * h;
  s.t += h;
  return s;
}

namespace {

void check_schedule(const TradeSchedule& schedule, double horizon, double x0) {
  double prev = 0.0;
  for (const auto& b : schedule.event_blocks) {
    if (b.time < prev || b.time < 0.0 || b.time > horizon) {
      throw std::invalid_argument("schedule blocks must be sorted inside [0, T]");
    }
    prev = b.time;
  }
  prev = 0.0;
  for (const auto& r : schedule.rate) {
    if (r.start < prev || r.end < r.start || r.end > horizon * (1.0 + 1e-14)) {
      throw std::invalid_argument("rate segments must be sorted, non-overlapping and inside [0, T]");
    }
    prev = r.end;
  }
  const double residual = x0 + schedule.net_change();
  const double scale = std::max({1.0, std::abs(x0), schedule.gross_volume()});
  if (std::abs(residual) > 1e-9 * scale) {
    throw std::invalid_argument("schedule does not liquidate the position (residual " + std::to_string(residual) +
                                ")");
  }
}

}  // namespace

double realized_cost(const EventPath& path, const TradeSchedule& schedule, const MarketState& init,
                     const ImpactParams& params, std::vector<TraceRow>* trace) {
  const double T = path.horizon();
  check_schedule(schedule, T, init.X);

  MarketState st = init;
  st.t = 0.0;
  st.realized_cost = 0.0;
  auto record = [&](const char* kind, double dn, double dx, double inc) {
    if (trace) trace->push_back({st.t, kind, dn, dx, st.S, st.D, st.P(), st.X, inc});
  };

  {
    auto r = apply_block(st, schedule.initial_block, params);
    st = r.state;
    record("block", 0.0, schedule.initial_block, r.cost);
  }

  const auto& ev = path.events();
  const auto& blocks = schedule.event_blocks;
  const auto& segs = schedule.rate;
  std::size_t ie = 0;
  std::size_t ib = 0;
  std::size_t is = 0;

  // Advance to time `target` following the rate schedule, emitting one rate row per piece.
  auto advance = [&](double target) {
    while (st.t < target) {
      while (is < segs.size() && segs[is].end <= st.t) ++is;
      double stop = target;
      double rate = 0.0;
      if (is < segs.size()) {
        if (segs[is].start <= st.t) {
          rate = segs[is].rate;
          stop = std::min(target, segs[is].end);
        } else {
          stop = std::min(target, segs[is].start);
        }
      }
      const double before = st.realized_cost;
      const double x_before = st.X;
      st = evolve(st, stop - st.t, rate, params);
      st.t = stop;
      if (rate != 0.0) record("rate", 0.0, st.X - x_before, st.realized_cost - before);
    }
  };

  while (true) {
    double next = T;
    if (ie < ev.size()) next = std::min(next, ev[ie].tau);
    if (ib < blocks.size()) next = std::min(next, blocks[ib].time);
    advance(next);
    while (ie < ev.size() && ev[ie].tau <= next) {
      st = apply_market_order(st, ev[ie], params);
      record("market", ev[ie].dN(), 0.0, 0.0);
      ++ie;
    }
    while (ib < blocks.size() && blocks[ib].time <= next) {
      auto r = apply_block(st, blocks[ib].size, params);
      st = r.state;
      record("block", 0.0, blocks[ib].size, r.cost);
      ++ib;
    }
    if (next >= T) break;
  }

  // The terminal trade closes whatever remains, -X_T.
  const double xt = st.X;
  const double terminal_cost = -st.P() * xt + xt * xt / (2.0 * params.q);
  st.realized_cost += terminal_cost;
  st.S -= params.epsilon * xt / params.q;
  st.D -= (1.0 - params.epsilon) * xt / params.q;
  st.X = 0.0;
  record("terminal", 0.0, -xt, terminal_cost);
  return st.realized_cost;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "t,event_kind,dN,dX,S,D,P,X,cost_increment\n";
  out << std::setprecision(17);
  for (const auto& r : trace) {
    out << r.t << ',' << r.kind << ',' << r.dN << ',' << r.dX << ',' << r.S << ',' << r.D << ',' << r.P << ','
        << r.X << ',' << r.cost_increment << '\n';
  }
}

}  // namespace mih
