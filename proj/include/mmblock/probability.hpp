#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mmblock {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// std::erf is accurate to about one ulp, well inside the 1e-10 target.
inline double erf(double x) { return std::erf(x); }

/// Per-slot probability of remaining in a state whose geometric dwell has
/// the given mean (in slots). A one-slot mean gives 0.
inline double stay_probability(double mean_dwell_slots) {
  if (!(mean_dwell_slots >= 1.0)) {
    throw DomainError("mean dwell must be at least one slot");
  }
  return 1.0 - 1.0 / mean_dwell_slots;
}

/// P(k) = p^(k-1) (1-p): probability of staying exactly k slots.
inline double dwell_pmf(double p_stay, long long k) {
  if (k < 1) throw DomainError("dwell length k must be >= 1");
  if (!(p_stay >= 0.0 && p_stay < 1.0)) {
    throw DomainError("p_stay must lie in [0, 1)");
  }
  return std::pow(p_stay, static_cast<double>(k - 1)) * (1.0 - p_stay);
}

inline double mean_dwell_slots(double p_stay) { return 1.0 / (1.0 - p_stay); }

struct PreemptionInputs {
  double mu = 0.0;     // mean blockage interval
  double sigma = 0.0;  // its standard deviation
  double s = 0.0;      // sweep period, may be infinite
};

namespace detail {
inline void check_inputs(const PreemptionInputs& in) {
  if (!(in.mu > 0.0) || !(in.sigma > 0.0) || !(in.s > 0.0)) {
    throw DomainError("mu, sigma and the sweep period must be positive");
  }
}
}  // namespace detail

/// Probability p_C that the next blockage arrives before the next periodic
/// sweep, with the blockage instant uniform over the sweep period and the
/// inter-blockage gap Gaussian. Closed form of the integral over that
/// period, clamped to [0, 1]. No sweeps (infinite period) gives 1.
inline double sweep_preemption_probability(const PreemptionInputs& in) {
  detail::check_inputs(in);
  if (std::isinf(in.s)) return 1.0;
  const double mu = in.mu;
  const double sigma = in.sigma;
  const double s = in.s;
  const double scale = std::numbers::sqrt2 * sigma;
  const double erf_term =
      (s - mu) / (2.0 * s) * (erf(mu / scale) - erf((mu - s) / scale));
  const double gauss_term =
      std::sqrt(2.0 / std::numbers::pi) * sigma / (2.0 * s) *
      (std::exp(-mu * mu / (2.0 * sigma * sigma)) -
       std::exp(-(mu - s) * (mu - s) / (2.0 * sigma * sigma)));
  const double p = erf_term - gauss_term;
  return p <= 0.0 ? 0.0 : std::min(p, 1.0);  // no -0 from cancellation
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Sampling counterpart of sweep_preemption_probability: draws the blockage
/// instant uniformly in [0, S) and the gap from N(mu, sigma^2) truncated at 0
/// (negative draws are redrawn), and counts gap < S - t_b.
inline MonteCarloEstimate sweep_preemption_mc(const PreemptionInputs& in,
                                              std::int64_t n_samples,
                                              std::uint64_t seed) {
  detail::check_inputs(in);
  if (std::isinf(in.s)) return {1.0, 0.0};
  if (n_samples < 1000) throw DomainError("need at least 1000 samples");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, in.s);
  std::normal_distribution<double> gap(in.mu, in.sigma);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double t_b = phase(rng);
    double g = gap(rng);
    while (g < 0.0) g = gap(rng);
    if (g < in.s - t_b) ++hits;
  }
  const double n = static_cast<double>(n_samples);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace mmblock
