#pragma once

// Full analytic pipeline for one scenario: per-state throughput, blockage
// state, chain, stationary distribution and the long-run summary.

#include "mmblock/chain.hpp"
#include "mmblock/config.hpp"
#include "mmblock/metrics.hpp"

namespace mmblock {

struct ScenarioAnalysis {
  ValidatedScenario scenario;
  LinkThroughput link;
  double p_c = 1.0;
  MarkovChain chain;
  StationaryDistribution pi;
  ThroughputSummary summary;

  double pi_blocked() const { return pi.pi.back(); }
};

inline ScenarioAnalysis analyze(const ValidatedScenario& scenario) {
  auto link = link_throughput(scenario);
  auto params = chain_parameters(scenario, link);
  auto chain = build_chain(params);
  auto pi = stationary(chain);
  auto summary = summarize(pi.pi, chain.throughput());
  return ScenarioAnalysis{scenario,       std::move(link), params.p_c,
                          std::move(chain), std::move(pi),  summary};
}

inline ScenarioAnalysis analyze(const ScenarioConfig& config) {
  return analyze(validate(config));
}

}  // namespace mmblock
