#pragma once

// Scenario parameters for a single mm-wave link: MAC timing, blockage
// process, rate ladder, transmit queue and sweep schedule. Everything is in
// SI base units (seconds, bits, bits/second, radians, meters).

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmblock {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct TimingParams {
  double t_difs = 13e-6;
  double t_sifs = 3e-6;
  double t_ack = 6e-6;
  double t_slot_mac = 5e-6;  // CSMA/CA backoff slot
  int cw_min = 15;
  double t_sweep = 4e-3;     // sector level sweep duration
  double slot = 1e-3;        // Markov time-slot
};

struct BlockageProcess {
  double mu = 10.0;    // mean inter-blockage interval
  double sigma = 0.1;  // std of the inter-blockage interval
  double alpha = 20.0 * std::numbers::pi / 180.0;  // beamwidth
  double d = 1.5;      // crossing distance from the transmitter
  double v = 1.0;      // crossing speed
};

// Index 0 is the best alignment (L_H), 1..N-1 are the suboptimal levels.
struct LinkRates {
  std::vector<double> mcs_levels{3.85e9, 1.925e9, 1.155e9};
  std::vector<double> p_recover{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  std::size_t size() const { return mcs_levels.size(); }
};

struct QueueParams {
  double q = 793.5e3 * 8;     // 793.5 kB
  double a_max = 79.35e3 * 8;  // 79.35 kB
  double a_factor = 1.0;
};

struct SweepPolicy {
  double ssi = kInfinity;  // sector sweep interval

  bool periodic() const { return std::isfinite(ssi); }
};

struct ScenarioConfig {
  TimingParams timing;
  BlockageProcess blockage;
  LinkRates rates;
  QueueParams queue;
  SweepPolicy sweep;
};

struct ConfigIssue {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues)
      : std::runtime_error(format(issues)), issues_(std::move(issues)) {}
  ConfigError(std::string field, std::string message)
      : ConfigError(std::vector<ConfigIssue>{
            ConfigIssue{std::move(field), std::move(message)}}) {}

  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string format(const std::vector<ConfigIssue>& issues) {
    std::string out = "invalid configuration";
    for (const auto& issue : issues) {
      out += "\n  ";
      out += issue.field;
      out += ": ";
      out += issue.message;
    }
    return out;
  }

  std::vector<ConfigIssue> issues_;
};

/// Time the link is physically shadowed while a person crosses the beam.
/// The beam cone at distance d is 2 d tan(alpha/2) wide; the body is
/// treated as having zero width.
inline double physical_block_duration(const BlockageProcess& blockage) {
  return 2.0 * blockage.d * std::tan(blockage.alpha / 2.0) / blockage.v;
}

/// Collision-free channel access: DIFS, mean backoff of CW_min/2 MAC slots,
/// then SIFS and the ACK.
inline double channel_access_time(const TimingParams& timing) {
  return timing.t_difs + 0.5 * timing.cw_min * timing.t_slot_mac +
         timing.t_sifs + timing.t_ack;
}

/// Air-time inflation caused by periodic sweeps: SSI / (SSI - t_sweep).
inline double overhead_factor(const SweepPolicy& sweep,
                              const TimingParams& timing) {
  if (!sweep.periodic()) return 1.0;
  if (sweep.ssi <= timing.t_sweep) {
    throw ConfigError("ssi", "must exceed t_sweep (the sweep would consume "
                               "the whole interval)");
  }
  return sweep.ssi / (sweep.ssi - timing.t_sweep);
}

/// Offered load l such that the steady-state aggregated frame at the best
/// MCS equals a_factor * a_max.
inline double load_for_aggregation(double a_factor, double a_max,
                                   double best_mcs, double t_acc, double f) {
  const double frame = a_factor * a_max;
  return frame / (f * (t_acc + frame / best_mcs));
}

inline double load_from_aggregation_factor(const ScenarioConfig& config) {
  return load_for_aggregation(
      config.queue.a_factor, config.queue.a_max, config.rates.mcs_levels.at(0),
      channel_access_time(config.timing),
      overhead_factor(config.sweep, config.timing));
}

struct DerivedQuantities {
  double block_duration = 0.0;  // t
  double t_acc = 0.0;
  double f = 1.0;
  double load = 0.0;            // l
};

struct ValidatedScenario {
  ScenarioConfig config;
  DerivedQuantities derived;
};

/// Every violated invariant, in field order. Empty means valid.
inline std::vector<ConfigIssue> check(const ScenarioConfig& c) {
  std::vector<ConfigIssue> issues;
  auto require = [&](bool ok, const char* field, const std::string& msg) {
    if (!ok) issues.push_back({field, msg});
  };
  auto positive = [&](double x, const char* field) {
    require(x > 0.0 && std::isfinite(x), field, std::string(field) +
                                                   " must be positive");
  };

  const auto& t = c.timing;
  positive(t.t_difs, "t_difs");
  positive(t.t_sifs, "t_sifs");
  positive(t.t_ack, "t_ack");
  positive(t.t_slot_mac, "t_slot_mac");
  require(t.cw_min >= 0, "cw_min", "cw_min must be >= 0");
  positive(t.t_sweep, "t_sweep");
  positive(t.slot, "slot");

  const auto& b = c.blockage;
  positive(b.mu, "mu");
  positive(b.sigma, "sigma");
  if (b.mu > 0.0 && t.slot > 0.0) {
    require(b.mu / t.slot > 1.0, "mu", "mu must span more than one slot");
  }
  require(b.alpha > 0.0 && b.alpha < std::numbers::pi, "alpha",
          "alpha must lie in (0, pi) radians");
  positive(b.d, "d");
  positive(b.v, "v");

  const auto& r = c.rates;
  require(!r.mcs_levels.empty(), "mcs_levels",
          "mcs_levels needs at least one rate");
  for (std::size_t i = 0; i < r.mcs_levels.size(); ++i) {
    if (!(r.mcs_levels[i] > 0.0) || !std::isfinite(r.mcs_levels[i])) {
      require(false, "mcs_levels", "mcs_levels must be positive");
      break;
    }
    if (i > 0 && !(r.mcs_levels[i] < r.mcs_levels[i - 1])) {
      require(false, "mcs_levels", "mcs_levels must be strictly descending");
      break;
    }
  }
  require(r.p_recover.size() == r.mcs_levels.size(), "p_recover",
          "p_recover must have one entry per MCS level");
  double sum = 0.0;
  bool in_range = true;
  for (double p : r.p_recover) {
    in_range = in_range && p >= 0.0 && p <= 1.0;
    sum += p;
  }
  require(in_range, "p_recover", "each p_recover entry must lie in [0, 1]");
  require(std::abs(sum - 1.0) <= 1e-12, "p_recover",
          "p_recover must sum to 1 (normalization)");

  const auto& q = c.queue;
  positive(q.q, "q");
  positive(q.a_max, "a_max");
  require(q.a_max <= q.q, "a_max", "a_max must not exceed q");
  require(q.a_factor > 0.0 && q.a_factor <= 1.0, "a_factor",
          "a_factor must lie in (0, 1]");

  const auto& s = c.sweep;
  if (s.periodic()) {
    require(s.ssi > t.t_sweep, "ssi", "ssi must exceed t_sweep");
  } else {
    require(s.ssi > 0.0, "ssi", "ssi must be positive or inf");
  }
  return issues;
}

/// Checks all invariants and attaches t, t_acc, f and l.
/// Throws ConfigError listing every violation.
inline ValidatedScenario validate(const ScenarioConfig& config) {
  auto issues = check(config);
  if (!issues.empty()) throw ConfigError(std::move(issues));

  ValidatedScenario out{config, {}};
  out.derived.block_duration = physical_block_duration(config.blockage);
  out.derived.t_acc = channel_access_time(config.timing);
  out.derived.f = overhead_factor(config.sweep, config.timing);
  out.derived.load = load_for_aggregation(
      config.queue.a_factor, config.queue.a_max, config.rates.mcs_levels[0],
      out.derived.t_acc, out.derived.f);
  if (!(out.derived.load * out.derived.f < config.rates.mcs_levels[0])) {
    throw ConfigError("a_factor", "derived load exceeds the best MCS");
  }
  return out;
}

}  // namespace mmblock
