#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace mmblock {

// Fluctuation is reported as the standard deviation; variance kept too.
struct ThroughputSummary {
  double mean = 0.0;
  double variance = 0.0;
  double std_dev = 0.0;
};

inline ThroughputSummary summarize(std::span<const double> pi,
                                   std::span<const double> throughput) {
  if (pi.size() != throughput.size()) {
    throw std::invalid_argument("distribution and throughput lengths differ");
  }
  ThroughputSummary s;
  for (std::size_t i = 0; i < pi.size(); ++i) s.mean += pi[i] * throughput[i];
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const double dev = throughput[i] - s.mean;
    s.variance += pi[i] * dev * dev;
  }
  s.std_dev = std::sqrt(s.variance);
  return s;
}

}  // namespace mmblock
