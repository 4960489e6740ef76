#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mih/hawkes.hpp"

namespace mih {

struct ImpactParams {
  double q = 1.0;        // depth
  double rho = 1.0;      // resilience
  double nu = 0.0;       // permanent fraction of market orders
  double epsilon = 0.0;  // permanent fraction of strategy orders, < 1

  void validate() const;
};

struct MarketState {
  double t = 0.0;
  double S = 0.0;
  double D = 0.0;
  double X = 0.0;
  double realized_cost = 0.0;

  double P() const { return S + D; }
};

struct TimedBlock {
  double time;
  double size;
};

struct RateSegment {
  double start;
  double end;
  double rate;
};

struct TradeSchedule {
  double initial_block = 0.0;
  std::vector<TimedBlock> event_blocks;  // sorted by time, executed at time+
  std::vector<RateSegment> rate;         // sorted, non-overlapping
  double terminal_block = 0.0;

  // initial + sum of blocks + integral of the rate + terminal.
  double net_change() const;
  double gross_volume() const;
};

// Sum of two schedules; rate segments are overlaid on the union of their breakpoints.
TradeSchedule merge_schedules(const TradeSchedule& a, const TradeSchedule& b);
TradeSchedule scale_schedule(const TradeSchedule& s, double factor);

MarketState apply_market_order(const MarketState& state, const Event& event, const ImpactParams& params);

struct BlockResult {
  MarketState state;
  double cost;
};
BlockResult apply_block(const MarketState& state, double dx, const ImpactParams& params);

// Exact update under a constant trading rate over [t, t + h].
MarketState evolve(const MarketState& state, double h, double rate, const ImpactParams& params);

struct TraceRow {
  double t;
  std::string kind;  // market, block, rate, terminal
  double dN;
  double dX;
  double S;
  double D;
  double P;
  double X;
  double cost_increment;
};

// Replays market orders and the schedule on [0, T] and returns C(X).
// When trace is non-null every step is recorded.
double realized_cost(const EventPath& path, const TradeSchedule& schedule, const MarketState& init,
                     const ImpactParams& params, std::vector<TraceRow>* trace = nullptr);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace mih
