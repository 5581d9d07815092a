#pragma once

// Per-state throughput of an aggregating transmitter fed by a constant-rate
// source, and the throughput of the blockage state including the backlog
// drain that follows the physical blockage.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace mmblock {

// Relative slack for rate comparisons that are equalities in exact
// arithmetic (at a_factor = 1 the best-MCS capacity equals the load).
inline constexpr double kRateTolerance = 1e-9;
inline constexpr double kQueueTolerance = 1e-12;

struct QueueLevel {
  double q_l = 0.0;
  bool saturated = false;
};

/// Stable queue level of q_i = (q_{i-1}/mcs + t_acc) f l started from 0.
/// Unstable (f l >= mcs) or overflowing fixed points saturate at q.
inline QueueLevel queue_fixed_point(double load, double mcs, double t_acc,
                                    double f, double q) {
  if (load <= 0.0) return {0.0, false};
  const double rho = f * load / mcs;
  if (rho >= 1.0) return {q, true};
  const double fixed = t_acc * f * load / (1.0 - rho);
  if (fixed > q) return {q, true};
  return {fixed, false};
}

/// One step of the queue recursion; used by tests and the fixed-point check.
inline double queue_step(double q_prev, double load, double mcs, double t_acc,
                         double f) {
  return (q_prev / mcs + t_acc) * f * load;
}

/// Throughput when every transmission carries a_max.
inline double aggregation_capacity(double mcs, double t_acc, double f,
                                   double a_max) {
  return a_max / ((a_max / mcs + t_acc) * f);
}

struct StateThroughput {
  double q_l = 0.0;
  bool saturated = false;
  double throughput = 0.0;
  double capacity = 0.0;
};

inline StateThroughput state_throughput(double load, double mcs, double t_acc,
                                        double f, double a_max, double q) {
  const auto level = queue_fixed_point(load, mcs, t_acc, f, q);
  StateThroughput out;
  out.q_l = level.q_l;
  out.saturated = level.saturated;
  out.capacity = aggregation_capacity(mcs, t_acc, f, a_max);
  const bool fits = !level.saturated &&
                    level.q_l <= a_max * (1.0 + kQueueTolerance);
  out.throughput = fits ? load : out.capacity;
  return out;
}

struct BlockageOutcome {
  double thp_b = 0.0;                   // throughput of state B
  double t_b_mean = 0.0;                // probability-weighted effect duration
  std::vector<double> t_b_per_state;    // effect duration per landing state
  std::vector<double> drained_new_data; // arrivals while draining, per state
};

/// The blockage lasts t; afterwards the backlog min(t l, q) drains at
/// (capacity_j - l) on landing state j while arrivals continue. States that
/// cannot outpace the load contribute zero throughput over t alone.
inline BlockageOutcome blockage_effect(double t, double load, double q,
                                       std::span<const double> capacities,
                                       std::span<const double> p_recover) {
  if (capacities.size() != p_recover.size()) {
    throw std::invalid_argument("capacities and p_recover differ in length");
  }
  if (!(t > 0.0)) throw std::invalid_argument("blockage duration must be > 0");

  BlockageOutcome out;
  out.t_b_per_state.resize(capacities.size());
  out.drained_new_data.resize(capacities.size());
  const double backlog = std::min(t * load, q);
  for (std::size_t j = 0; j < capacities.size(); ++j) {
    double duration = t;
    double contribution = 0.0;
    if (load > 0.0 && capacities[j] > load * (1.0 + kRateTolerance)) {
      const double drain = backlog / (capacities[j] - load);
      const double arrived = load * drain;
      duration = t + drain;
      contribution = (backlog + arrived) / duration;
      out.drained_new_data[j] = arrived;
    }
    out.t_b_per_state[j] = duration;
    out.thp_b += p_recover[j] * contribution;
    out.t_b_mean += p_recover[j] * duration;
  }
  return out;
}

}  // namespace mmblock
