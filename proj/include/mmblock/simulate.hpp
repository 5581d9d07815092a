#pragma once

// Seeded simulators used to cross-check the analytic model:
//  - simulate_chain walks the built Markov chain slot by slot;
//  - simulate_events is an independent event-level model with Gaussian
//    blockage arrivals, periodic sweeps and a frame-by-frame aggregating
//    transmit queue.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "mmblock/chain.hpp"
#include "mmblock/config.hpp"
#include "mmblock/format.hpp"
#include "mmblock/probability.hpp"

namespace mmblock {

struct SeriesPoint {
  double time = 0.0;  // bin start
  double throughput = 0.0;
};

struct EventCounters {
  std::int64_t bits_arrived = 0;
  std::int64_t bits_delivered = 0;
  std::int64_t bits_dropped = 0;
  std::int64_t bits_queued = 0;  // left in the queue at the end
  std::int64_t frames = 0;
  std::int64_t blockages = 0;
  // Blockages (after the first) with no sweep since the previous onset.
  std::int64_t blockages_without_sweep = 0;
  std::int64_t sweeps = 0;
  std::int64_t effective_sweeps = 0;  // sweeps that moved SL_i back to L_H

  double preemption_fraction() const {
    if (blockages < 2) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(blockages_without_sweep) /
           static_cast<double>(blockages - 1);
  }
  double preemption_standard_error() const {
    const double p = preemption_fraction();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(blockages - 1));
  }
};

struct SimulationResult {
  double duration = 0.0;
  std::vector<double> occupancy;  // L_H, SL_1.., B
  double mean = 0.0;
  // Chain walks: variance over slots. Event runs: variance over series bins.
  double variance = 0.0;
  std::vector<SeriesPoint> series;
  std::uint64_t seed = 0;
  std::optional<EventCounters> events;
};

inline void write_series_csv(std::ostream& out, const SimulationResult& r) {
  out << "time_s,throughput_bps\n";
  for (const auto& p : r.series) {
    out << format_number(p.time) << ',' << format_number(p.throughput) << '\n';
  }
}

namespace detail {

inline std::size_t sample_index(const std::vector<double>& cumulative,
                                double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) {
    // u beyond the rounded total: fall back to the last reachable entry
    std::size_t i = cumulative.size() - 1;
    while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;
    return i;
  }
  return static_cast<std::size_t>(it - cumulative.begin());
}

inline std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    c[i] = acc;
  }
  return c;
}

inline double population_variance(const std::vector<SeriesPoint>& series) {
  if (series.empty()) return 0.0;
  double mean = 0.0;
  for (const auto& p : series) mean += p.throughput;
  mean /= static_cast<double>(series.size());
  double var = 0.0;
  for (const auto& p : series) {
    const double d = p.throughput - mean;
    var += d * d;
  }
  return var / static_cast<double>(series.size());
}

}  // namespace detail

struct ChainSimOptions {
  double slot = 1e-3;
  double bin = 0.5;
  std::size_t start_state = 0;
};

inline SimulationResult simulate_chain(const MarkovChain& chain,
                                       std::int64_t n_slots,
                                       std::uint64_t seed,
                                       const ChainSimOptions& opt = {}) {
  if (n_slots < 1) throw DomainError("n_slots must be >= 1");
  if (!(opt.slot > 0.0) || !(opt.bin > 0.0)) {
    throw DomainError("slot and bin widths must be positive");
  }
  const std::size_t n = chain.size();
  std::vector<std::vector<double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = chain(i, j);
    rows[i] = detail::cumulative(row);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& thp = chain.throughput();

  std::vector<std::int64_t> visits(n, 0);
  const auto slots_per_bin = std::max<std::int64_t>(
      1, std::llround(opt.bin / opt.slot));
  SimulationResult result;
  result.seed = seed;
  result.duration = static_cast<double>(n_slots) * opt.slot;

  std::size_t state = opt.start_state;
  double bin_sum = 0.0;
  std::int64_t in_bin = 0;
  std::int64_t bin_index = 0;
  for (std::int64_t s = 0; s < n_slots; ++s) {
    ++visits[state];
    bin_sum += thp[state];
    if (++in_bin == slots_per_bin) {
      result.series.push_back(
          {static_cast<double>(bin_index) * slots_per_bin * opt.slot,
           bin_sum / static_cast<double>(in_bin)});
      ++bin_index;
      bin_sum = 0.0;
      in_bin = 0;
    }
    state = detail::sample_index(rows[state], unit(rng));
  }
  if (in_bin > 0) {
    result.series.push_back(
        {static_cast<double>(bin_index) * slots_per_bin * opt.slot,
         bin_sum / static_cast<double>(in_bin)});
  }

  result.occupancy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.occupancy[i] =
        static_cast<double>(visits[i]) / static_cast<double>(n_slots);
    result.mean += result.occupancy[i] * thp[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = thp[i] - result.mean;
    result.variance += result.occupancy[i] * d * d;
  }
  return result;
}

struct EventSimOptions {
  double bin = 0.5;
  bool blockages = true;
  std::optional<double> load;  // overrides the derived offered load
};

/// Event-level run of one scenario. Arrivals are a fluid of rate l counted
/// in whole bits into a queue capped at q (excess is dropped). Each channel
/// access takes t_acc, after which min(queue, a_max) is sent at the current
/// state's MCS. Sweeps fire every SSI from a random phase, take t_sweep of
/// air time and restore L_H unless the link is blocked at that instant.
/// Blockages start a N(mu, sigma^2) gap (redrawn if negative) after the
/// previous blockage cleared, last t, and land on a state drawn from
/// p_recover.
inline SimulationResult simulate_events(const ValidatedScenario& scenario,
                                        double sim_duration,
                                        std::uint64_t seed,
                                        const EventSimOptions& opt = {}) {
  const auto& c = scenario.config;
  const auto& derived = scenario.derived;
  if (!(sim_duration > 0.0) || !(opt.bin > 0.0)) {
    throw DomainError("duration and bin width must be positive");
  }
  if (opt.blockages && sim_duration < 10.0 * c.blockage.mu) {
    throw DomainError("simulate at least 10 mean blockage intervals");
  }
  const double load = opt.load.value_or(derived.load);
  if (!(load >= 0.0)) throw DomainError("load must be non-negative");

  const std::size_t levels = c.rates.size();
  const std::size_t blocked_state = levels;
  const auto q_cap = static_cast<std::int64_t>(std::llround(c.queue.q));
  const auto a_max = static_cast<std::int64_t>(std::llround(c.queue.a_max));
  const double t_acc = derived.t_acc;
  const double t_block = derived.block_duration;
  const double ssi = c.sweep.ssi;
  const auto recover = detail::cumulative(c.rates.p_recover);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gap_dist(c.blockage.mu, c.blockage.sigma);
  auto draw_gap = [&] {
    double g = gap_dist(rng);
    while (g < 0.0) g = gap_dist(rng);
    return g;
  };

  constexpr double inf = kInfinity;
  EventCounters k;
  std::int64_t queue = 0;
  std::int64_t arrived_total = 0;
  double now = 0.0;
  auto accrue = [&](double t) {
    const auto total = static_cast<std::int64_t>(std::floor(load * t));
    const std::int64_t add = total - arrived_total;
    if (add <= 0) return;
    arrived_total = total;
    k.bits_arrived += add;
    queue += add;
    if (queue > q_cap) {
      k.bits_dropped += queue - q_cap;
      queue = q_cap;
    }
  };

  std::vector<double> occupancy(levels + 1, 0.0);
  std::size_t current = 0;
  double since = 0.0;
  auto enter = [&](double t, std::size_t state) {
    occupancy[current] += t - since;
    since = t;
    current = state;
  };

  const auto n_bins = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(sim_duration / opt.bin)));
  std::vector<double> bin_bits(static_cast<std::size_t>(n_bins), 0.0);
  auto credit = [&](double t, std::int64_t bits) {
    const auto b = static_cast<std::int64_t>(std::floor(t / opt.bin));
    if (b >= 0 && b < n_bins) {
      bin_bits[static_cast<std::size_t>(b)] += static_cast<double>(bits);
    }
  };

  std::size_t sector = 0;
  double blocked_until = -inf;
  double next_onset = opt.blockages ? draw_gap() : inf;
  double next_sweep = c.sweep.periodic() ? unit(rng) * ssi : inf;
  bool swept_since_onset = false;

  auto handle_sweep = [&](double at) {
    ++k.sweeps;
    swept_since_onset = true;
    next_sweep += ssi;
    if (at < blocked_until) {
      now = at;  // ineffective while blocked
      return;
    }
    if (sector != 0) {
      ++k.effective_sweeps;
      sector = 0;
      enter(at, 0);
    }
    now = at + c.timing.t_sweep;
  };
  auto handle_onset = [&](double at) {
    ++k.blockages;
    if (k.blockages > 1 && !swept_since_onset) ++k.blockages_without_sweep;
    swept_since_onset = false;
    // an onset overdue by a frame starts when that frame ends
    blocked_until = at + t_block;
    next_onset = blocked_until + draw_gap();
    enter(at, blocked_state);
    now = at;
  };
  auto handle_next_event = [&](double earliest) {
    if (next_sweep <= next_onset) {
      handle_sweep(std::max(earliest, next_sweep));
    } else {
      handle_onset(std::max(earliest, next_onset));
    }
  };

  while (now < sim_duration) {
    const double t_evt = std::min(next_onset, next_sweep);
    if (now < blocked_until) {
      if (std::min(blocked_until, t_evt) >= sim_duration) {
        now = sim_duration;
        break;
      }
      if (t_evt <= blocked_until) {
        handle_next_event(now);
      } else {
        now = blocked_until;
        sector = detail::sample_index(recover, unit(rng));
        enter(now, sector);
      }
      continue;
    }
    if (t_evt <= now) {
      handle_next_event(now);
      continue;
    }
    if (now + t_acc > t_evt) {
      if (t_evt >= sim_duration) {
        now = sim_duration;
        break;
      }
      handle_next_event(t_evt);
      continue;
    }
    const double access_end = now + t_acc;
    accrue(access_end);
    const std::int64_t frame = std::min(queue, a_max);
    if (frame == 0) {
      const double next_bit =
          load > 0.0 ? static_cast<double>(arrived_total + 1) / load : inf;
      now = std::max(access_end, std::min({next_bit, t_evt, sim_duration}));
      continue;
    }
    queue -= frame;
    const double tx_end =
        access_end +
        static_cast<double>(frame) / c.rates.mcs_levels[sector];
    k.bits_delivered += frame;
    ++k.frames;
    credit(tx_end, frame);
    now = tx_end;
  }

  accrue(now);
  enter(now, current);
  k.bits_queued = queue;

  SimulationResult result;
  result.seed = seed;
  result.duration = now;
  result.occupancy.resize(levels + 1);
  for (std::size_t i = 0; i <= levels; ++i) {
    result.occupancy[i] = now > 0.0 ? occupancy[i] / now : 0.0;
  }
  result.mean = now > 0.0 ? static_cast<double>(k.bits_delivered) / now : 0.0;
  result.series.reserve(bin_bits.size());
  for (std::size_t b = 0; b < bin_bits.size(); ++b) {
    result.series.push_back(
        {static_cast<double>(b) * opt.bin, bin_bits[b] / opt.bin});
  }
  result.variance = detail::population_variance(result.series);
  result.events = k;
  return result;
}

}  // namespace mmblock
