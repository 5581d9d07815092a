#pragma once

// Empirical link model from a measured throughput trace: plateau levels
// found by 1-D k-means over the non-dip samples, and recovery probabilities
// from which plateau the link settles on after each blockage dip.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmblock/chain.hpp"
#include "mmblock/format.hpp"

namespace mmblock {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceSample {
  double time = 0.0;
  double throughput = 0.0;
};

struct ThroughputTrace {
  std::vector<TraceSample> samples;

  std::size_t size() const { return samples.size(); }
};

inline ThroughputTrace load_trace(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  ThroughputTrace trace;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = trim(line);
    if (view.empty()) continue;
    if (!have_header) {
      if (view != "time_s,throughput_bps") {
        throw TraceError("line " + std::to_string(line_no) +
                         ": expected header time_s,throughput_bps");
      }
      have_header = true;
      continue;
    }
    auto fields = split(view, ',');
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 2) {
      throw TraceError(where + ": expected two columns");
    }
    auto t = parse_number(fields[0]);
    auto x = parse_number(fields[1]);
    if (!t || !x || !std::isfinite(*t) || !std::isfinite(*x)) {
      throw TraceError(where + ": malformed number");
    }
    if (*x < 0.0) throw TraceError(where + ": negative throughput");
    if (!trace.samples.empty() && !(*t > trace.samples.back().time)) {
      throw TraceError(where + ": time is not strictly increasing");
    }
    trace.samples.push_back({*t, *x});
  }
  if (!have_header) throw TraceError("trace file is empty");
  if (trace.samples.empty()) throw TraceError("trace has no samples");
  return trace;
}

inline ThroughputTrace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path);
  return load_trace(in);
}

struct EmpiricalModel {
  std::vector<double> levels;     // descending
  std::vector<double> p_recover;  // per level
  std::size_t n_states = 0;
  std::size_t dips = 0;           // dips that resolved to a stable level
  double mean_dip_duration = 0.0;
};

struct KMeans1D {
  std::vector<double> centers;  // ascending
  double within = 0.0;          // within-cluster sum of squares
};

/// Lloyd's algorithm on sorted data from the given centers; deterministic.
inline KMeans1D lloyd_1d(const std::vector<double>& sorted,
                         std::vector<double> centers) {
  const std::size_t n = sorted.size();
  const std::size_t k = centers.size();
  KMeans1D out;
  out.centers = std::move(centers);
  std::sort(out.centers.begin(), out.centers.end());
  std::vector<std::size_t> assign(n, 0);
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = iter == 0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      // sorted input, so the nearest center index never decreases
      while (c + 1 < k && std::abs(sorted[i] - out.centers[c + 1]) <
                              std::abs(sorted[i] - out.centers[c])) {
        ++c;
      }
      if (assign[i] != c) {
        assign[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[assign[i]] += sorted[i];
      ++count[assign[i]];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (count[j] > 0) out.centers[j] = sum[j] / static_cast<double>(count[j]);
    }
    std::sort(out.centers.begin(), out.centers.end());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sorted[i] - out.centers[assign[i]];
    out.within += d * d;
  }
  return out;
}

/// Centers seeded at the evenly spaced quantiles (i + 1/2)/k.
inline KMeans1D kmeans_1d(const std::vector<double>& sorted, std::size_t k) {
  const std::size_t n = sorted.size();
  std::vector<double> centers(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto idx = static_cast<std::size_t>(
        (static_cast<double>(i) + 0.5) * static_cast<double>(n) /
        static_cast<double>(k));
    centers[i] = sorted[std::min(idx, n - 1)];
  }
  return lloyd_1d(sorted, std::move(centers));
}

/// Grows a (k-1)-center fit by adding the sample farthest from its nearest
/// center, then re-runs Lloyd. Quantile seeds can merge two small plateaus;
/// this start does not.
inline KMeans1D kmeans_1d_grow(const std::vector<double>& sorted,
                               const KMeans1D& previous) {
  auto centers = previous.centers;
  double far = -1.0;
  double pick = sorted.front();
  for (double x : sorted) {
    double d = std::numeric_limits<double>::infinity();
    for (double c : centers) d = std::min(d, std::abs(x - c));
    if (d > far) {
      far = d;
      pick = x;
    }
  }
  centers.push_back(pick);
  return lloyd_1d(sorted, std::move(centers));
}

inline std::size_t nearest_level(const std::vector<double>& levels, double x) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < levels.size(); ++j) {
    if (std::abs(x - levels[j]) < std::abs(x - levels[best])) best = j;
  }
  return best;
}

inline constexpr double kElbowRatio = 0.5;
inline constexpr double kMinSeparation = 4.0;  // pooled within-cluster stds
inline constexpr std::size_t kStableSamples = 3;

/// Samples below blockage_threshold * max are dips. The number of levels k
/// is the one with the largest relative drop in within-cluster variance,
/// provided that drop is at least 0.5 and adjacent centers stay more than
/// four pooled standard deviations apart; otherwise a single level.
inline EmpiricalModel extract_levels(const ThroughputTrace& trace,
                                     std::size_t max_levels,
                                     double blockage_threshold = 0.3) {
  if (max_levels < 1) throw DomainError("max_levels must be >= 1");
  if (trace.size() < 10 * max_levels) {
    throw DomainError("trace too short: need at least 10 samples per level");
  }
  if (!(blockage_threshold >= 0.0 && blockage_threshold < 1.0)) {
    throw DomainError("blockage_threshold must lie in [0, 1)");
  }

  double peak = 0.0;
  for (const auto& s : trace.samples) peak = std::max(peak, s.throughput);
  const double cutoff = blockage_threshold * peak;
  auto is_dip = [&](double x) { return peak > 0.0 && x < cutoff; };

  std::vector<double> kept;
  for (const auto& s : trace.samples) {
    if (!is_dip(s.throughput)) kept.push_back(s.throughput);
  }
  std::sort(kept.begin(), kept.end());
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i == 0 || kept[i] != kept[i - 1]) ++distinct;
  }

  std::vector<KMeans1D> fits;
  for (std::size_t k = 1; k <= std::min(max_levels, distinct); ++k) {
    auto fit = kmeans_1d(kept, k);
    if (k > 1) {
      auto grown = kmeans_1d_grow(kept, fits.back());
      if (grown.within < fit.within) fit = std::move(grown);
    }
    fits.push_back(std::move(fit));
  }

  std::size_t chosen = 1;
  double best_drop = -1.0;
  for (std::size_t k = 2; k <= fits.size(); ++k) {
    const double prev = fits[k - 2].within;
    if (!(prev > 0.0)) break;
    const double drop = (prev - fits[k - 1].within) / prev;
    if (drop < kElbowRatio || drop <= best_drop) continue;
    const auto& centers = fits[k - 1].centers;
    const double pooled =
        std::sqrt(fits[k - 1].within / static_cast<double>(kept.size()));
    bool separated = true;
    for (std::size_t j = 1; j < centers.size(); ++j) {
      separated = separated &&
                  centers[j] - centers[j - 1] > kMinSeparation * pooled;
    }
    if (!separated) continue;
    best_drop = drop;
    chosen = k;
  }

  EmpiricalModel model;
  model.levels = fits.empty() ? std::vector<double>{0.0}
                              : fits[chosen - 1].centers;
  std::reverse(model.levels.begin(), model.levels.end());
  model.n_states = model.levels.size();

  // After each dip, the first level held for kStableSamples samples.
  std::vector<std::size_t> landed(model.n_states, 0);
  std::size_t dip_samples = 0;
  std::size_t dip_runs = 0;
  const auto& xs = trace.samples;
  std::size_t i = 0;
  while (i < xs.size()) {
    if (!is_dip(xs[i].throughput)) {
      ++i;
      continue;
    }
    ++dip_runs;
    while (i < xs.size() && is_dip(xs[i].throughput)) {
      ++dip_samples;
      ++i;
    }
    std::size_t run = 0;
    std::size_t run_level = 0;
    for (; i < xs.size() && !is_dip(xs[i].throughput); ++i) {
      const auto level = nearest_level(model.levels, xs[i].throughput);
      run = (run > 0 && level == run_level) ? run + 1 : 1;
      run_level = level;
      if (run == kStableSamples) {
        ++landed[level];
        ++model.dips;
        break;
      }
    }
  }
  if (dip_runs > 0 && xs.size() > 1) {
    const double spacing =
        (xs.back().time - xs.front().time) / static_cast<double>(xs.size() - 1);
    model.mean_dip_duration = spacing * static_cast<double>(dip_samples) /
                              static_cast<double>(dip_runs);
  }

  model.p_recover.assign(model.n_states, 0.0);
  if (model.dips == 0) {
    if (model.n_states > 1) {
      throw TraceError("no blockage dips followed by a stable level; "
                       "recovery probabilities are unobservable");
    }
    model.p_recover[0] = 1.0;
  } else {
    for (std::size_t j = 0; j < model.n_states; ++j) {
      model.p_recover[j] = static_cast<double>(landed[j]) /
                           static_cast<double>(model.dips);
    }
  }
  return model;
}

/// Chain for a measured link: no periodic sweeps (p_C = 1), plateau
/// throughputs per state, zero throughput while blocked.
inline ChainParameters empirical_chain_parameters(const EmpiricalModel& model,
                                                  double mu, double slot) {
  ChainParameters p;
  p.mu_slots = mu / slot;
  p.blockage_slots = model.mean_dip_duration / slot;
  p.p_c = 1.0;
  p.p_recover = model.p_recover;
  p.state_throughput = model.levels;
  p.blockage_throughput = 0.0;
  return p;
}

/// Config fragment carrying the fitted recovery probabilities; the plateau
/// throughputs are written as comments since they are not MCS rates.
inline void write_model_fragment(std::ostream& out,
                                 const EmpiricalModel& model) {
  out << "# fitted from trace: " << model.n_states << " level(s), "
      << model.dips << " resolved dip(s)\n";
  out << "# levels_bps = ";
  for (std::size_t i = 0; i < model.levels.size(); ++i) {
    out << (i ? "," : "") << format_number(model.levels[i]);
  }
  out << "\n# mean_dip_s = " << format_number(model.mean_dip_duration) << '\n';
  out << "p_recover = ";
  for (std::size_t i = 0; i < model.p_recover.size(); ++i) {
    out << (i ? "," : "") << format_number(model.p_recover[i]);
  }
  out << '\n';
}

}  // namespace mmblock
