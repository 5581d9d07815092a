#pragma once

// Parameter grids over a base scenario (load, SSI, crossing speed, mean
// blockage interval), evaluated analytically or by event simulation, and
// their CSV form.

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmblock/config.hpp"
#include "mmblock/format.hpp"
#include "mmblock/model.hpp"
#include "mmblock/simulate.hpp"

namespace mmblock {

class SweepSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SweepParameter { a_factor, ssi, v, mu };
enum class SweepMode { analytic, simulate };

inline SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "a_factor") return SweepParameter::a_factor;
  if (name == "ssi") return SweepParameter::ssi;
  if (name == "v") return SweepParameter::v;
  if (name == "mu") return SweepParameter::mu;
  throw SweepSpecError("unknown sweep parameter '" + std::string(name) +
                       "' (expected a_factor, ssi, v or mu)");
}

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::a_factor: return "a_factor";
    case SweepParameter::ssi: return "ssi";
    case SweepParameter::v: return "v";
    case SweepParameter::mu: return "mu";
  }
  return "?";
}

inline SweepMode parse_sweep_mode(std::string_view name) {
  if (name == "analytic") return SweepMode::analytic;
  if (name == "simulate") return SweepMode::simulate;
  throw SweepSpecError("unknown mode '" + std::string(name) +
                       "' (expected analytic or simulate)");
}

inline std::vector<double> parse_values(std::string_view text) {
  auto values = parse_number_list(text);
  if (!values) throw SweepSpecError("malformed value list: " + std::string(text));
  if (values->empty()) throw SweepSpecError("value list is empty");
  return *values;
}

/// "min:max:count" or "min:max:count:log"; count points including both ends.
inline std::vector<double> parse_range(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 3 && parts.size() != 4) {
    throw SweepSpecError("range must be min:max:count[:log]");
  }
  auto lo = parse_number(parts[0]);
  auto hi = parse_number(parts[1]);
  auto count = parse_number(parts[2]);
  if (!lo || !hi || !count || !std::isfinite(*lo) || !std::isfinite(*hi)) {
    throw SweepSpecError("range bounds must be finite numbers");
  }
  if (*count < 1 || *count != std::floor(*count)) {
    throw SweepSpecError("range count must be a positive integer");
  }
  if (*hi < *lo) throw SweepSpecError("range max is below min");
  bool log = false;
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      log = true;
    } else if (parts[3] != "lin" && parts[3] != "linear") {
      throw SweepSpecError("range spacing must be log or linear");
    }
  }
  if (log && !(*lo > 0.0)) {
    throw SweepSpecError("log range needs a positive min");
  }
  const auto n = static_cast<std::size_t>(*count);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double frac =
        n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = log ? std::exp(std::log(*lo) + frac * (std::log(*hi) -
                                                    std::log(*lo)))
                 : *lo + frac * (*hi - *lo);
  }
  out.front() = *lo;
  if (n > 1) out.back() = *hi;
  return out;
}

struct SweepSpec {
  SweepParameter parameter = SweepParameter::a_factor;
  std::vector<double> values;
  std::optional<std::vector<double>> cross_mu;
};

struct SweepRow {
  double param = 0.0;
  double mu = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
  double variance = 0.0;
  double pi_blocked = 0.0;
  double p_c = 0.0;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::a_factor;
  std::vector<SweepRow> rows;
};

struct SweepRunOptions {
  SweepMode mode = SweepMode::analytic;
  std::uint64_t seed = 1;
  // Simulated seconds per grid point; 0 picks 200 mean blockage intervals.
  double duration = 0.0;
};

inline ScenarioConfig apply(ScenarioConfig c, SweepParameter p, double x) {
  switch (p) {
    case SweepParameter::a_factor: c.queue.a_factor = x; break;
    case SweepParameter::ssi: c.sweep.ssi = x; break;
    case SweepParameter::v: c.blockage.v = x; break;
    case SweepParameter::mu: c.blockage.mu = x; break;
  }
  return c;
}

/// Grid order: outer loop over mu (cross_mu, else the base mu), inner loop
/// over the swept values. Every point is validated before any is evaluated.
inline SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec,
                             const SweepRunOptions& opt = {}) {
  if (spec.values.empty()) throw SweepSpecError("sweep has no values");
  if (spec.cross_mu && spec.parameter == SweepParameter::mu) {
    throw SweepSpecError("cannot cross a mu sweep with a mu list");
  }
  if (spec.cross_mu && spec.cross_mu->empty()) {
    throw SweepSpecError("mu list is empty");
  }
  if (opt.mode == SweepMode::simulate && opt.duration < 0.0) {
    throw SweepSpecError("duration must be positive");
  }
  const std::vector<double> mus =
      spec.cross_mu ? *spec.cross_mu : std::vector<double>{base.blockage.mu};

  std::vector<ValidatedScenario> points;
  std::vector<ConfigIssue> issues;
  for (double mu : mus) {
    ScenarioConfig with_mu = base;
    with_mu.blockage.mu = mu;
    for (double x : spec.values) {
      auto c = apply(with_mu, spec.parameter, x);
      auto found = check(c);
      if (!found.empty()) {
        for (auto& i : found) {
          i.message += " (at " + std::string(to_string(spec.parameter)) +
                       " = " + format_number(x) + ", mu = " +
                       format_number(mu) + ")";
          issues.push_back(std::move(i));
        }
        continue;
      }
      points.push_back(validate(c));
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));

  SweepResult result{spec.parameter, {}};
  std::uint64_t index = 0;
  for (const auto& point : points) {
    const auto& c = point.config;
    SweepRow row;
    row.mu = c.blockage.mu;
    switch (spec.parameter) {
      case SweepParameter::a_factor: row.param = c.queue.a_factor; break;
      case SweepParameter::ssi: row.param = c.sweep.ssi; break;
      case SweepParameter::v: row.param = c.blockage.v; break;
      case SweepParameter::mu: row.param = c.blockage.mu; break;
    }
    if (opt.mode == SweepMode::analytic) {
      const auto a = analyze(point);
      row.mean = a.summary.mean;
      row.std_dev = a.summary.std_dev;
      row.variance = a.summary.variance;
      row.pi_blocked = a.pi_blocked();
      row.p_c = a.p_c;
    } else {
      const double duration =
          opt.duration > 0.0 ? opt.duration : 200.0 * c.blockage.mu;
      const auto sim = simulate_events(point, duration, opt.seed + index);
      row.mean = sim.mean;
      row.variance = sim.variance;
      row.std_dev = std::sqrt(sim.variance);
      row.pi_blocked = sim.occupancy.back();
      row.p_c = sim.events->preemption_fraction();
    }
    result.rows.push_back(row);
    ++index;
  }
  return result;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "param,mu_s,mean_bps,std_bps,variance,pi_B,p_C\n";
  for (const auto& r : result.rows) {
    out << format_number(r.param) << ',' << format_number(r.mu) << ','
        << format_number(r.mean) << ',' << format_number(r.std_dev) << ','
        << format_number(r.variance) << ',' << format_number(r.pi_blocked)
        << ',' << format_number(r.p_c) << '\n';
  }
}

}  // namespace mmblock
