#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmblock/config.hpp"
#include "mmblock/format.hpp"
#include "mmblock/probability.hpp"
#include "mmblock/throughput.hpp"

namespace mmblock {

inline constexpr double kRowSumTolerance = 1e-12;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discrete-time chain over link states with one throughput per state.
/// Built chains order states as L_H, SL_1..SL_{N-1}, B.
class MarkovChain {
 public:
  MarkovChain(std::vector<std::string> labels, Eigen::MatrixXd matrix,
              std::vector<double> throughput)
      : labels_(std::move(labels)),
        matrix_(std::move(matrix)),
        throughput_(std::move(throughput)) {
    const auto n = static_cast<Eigen::Index>(labels_.size());
    if (n == 0 || matrix_.rows() != n || matrix_.cols() != n ||
        static_cast<Eigen::Index>(throughput_.size()) != n) {
      throw std::invalid_argument("chain dimensions disagree");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double p = matrix_(i, j);
        if (!(p >= 0.0 && p <= 1.0)) {
          throw std::invalid_argument("transition probability outside [0,1] "
                                      "in row " + labels_[i]);
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw std::invalid_argument("row " + labels_[i] +
                                    " does not sum to 1");
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double operator()(std::size_t from, std::size_t to) const {
    return matrix_(static_cast<Eigen::Index>(from),
                   static_cast<Eigen::Index>(to));
  }
  const std::vector<double>& throughput() const { return throughput_; }

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd matrix_;
  std::vector<double> throughput_;
};

// Everything needed to lay out the rows, already in slot units.
struct ChainParameters {
  double mu_slots = 0.0;
  double blockage_slots = 1.0;     // mean residency of B
  double p_c = 1.0;
  std::vector<double> p_recover;   // one per non-blocked state
  std::vector<double> state_throughput;
  double blockage_throughput = 0.0;
};

inline std::vector<std::string> state_labels(std::size_t levels) {
  std::vector<std::string> labels{"L_H"};
  for (std::size_t i = 1; i < levels; ++i) {
    labels.push_back("SL_" + std::to_string(i));
  }
  labels.push_back("B");
  return labels;
}

/// Row layout, with mu_s the mean blockage interval and T_B the B residency
/// (both in slots):
///   L_H : stay 1-1/mu_s, to B 1/mu_s
///   SL_i: stay 1-1/mu_s, to L_H (1-p_C)/mu_s, to B p_C/mu_s
///   B   : stay 1-1/T_B, to state j p_j/T_B
inline MarkovChain build_chain(const ChainParameters& params) {
  const std::size_t levels = params.p_recover.size();
  if (levels == 0 || params.state_throughput.size() != levels) {
    throw std::invalid_argument("need one throughput per recovery state");
  }
  if (!(params.mu_slots > 1.0)) {
    throw ConfigError("mu", "mu must span more than one slot");
  }
  if (!(params.p_c >= 0.0 && params.p_c <= 1.0)) {
    throw std::invalid_argument("p_c must lie in [0, 1]");
  }

  const auto n = static_cast<Eigen::Index>(levels + 1);
  const Eigen::Index b = n - 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);

  const double leave = 1.0 / params.mu_slots;
  const double stay = stay_probability(params.mu_slots);
  m(0, 0) = stay;
  m(0, b) = leave;
  for (Eigen::Index i = 1; i < b; ++i) {
    m(i, i) = stay;
    m(i, 0) = (1.0 - params.p_c) * leave;
    m(i, b) = params.p_c * leave;
  }
  const double residency = std::max(params.blockage_slots, 1.0);
  m(b, b) = stay_probability(residency);
  for (Eigen::Index j = 0; j < b; ++j) {
    m(b, j) += params.p_recover[static_cast<std::size_t>(j)] / residency;
  }

  auto thp = params.state_throughput;
  thp.push_back(params.blockage_throughput);
  return MarkovChain(state_labels(levels), std::move(m), std::move(thp));
}

struct LinkThroughput {
  std::vector<StateThroughput> states;
  BlockageOutcome blockage;
};

inline LinkThroughput link_throughput(const ValidatedScenario& scenario) {
  const auto& c = scenario.config;
  const auto& d = scenario.derived;
  LinkThroughput out;
  std::vector<double> capacities;
  for (double mcs : c.rates.mcs_levels) {
    out.states.push_back(
        state_throughput(d.load, mcs, d.t_acc, d.f, c.queue.a_max, c.queue.q));
    capacities.push_back(out.states.back().capacity);
  }
  out.blockage = blockage_effect(d.block_duration, d.load, c.queue.q,
                                 capacities, c.rates.p_recover);
  return out;
}

inline double preemption_probability(const ScenarioConfig& c) {
  return sweep_preemption_probability(
      {c.blockage.mu, c.blockage.sigma, c.sweep.ssi});
}

inline ChainParameters chain_parameters(const ValidatedScenario& scenario,
                                        const LinkThroughput& link) {
  const auto& c = scenario.config;
  ChainParameters p;
  p.mu_slots = c.blockage.mu / c.timing.slot;
  p.blockage_slots = link.blockage.t_b_mean / c.timing.slot;
  p.p_c = preemption_probability(c);
  p.p_recover = c.rates.p_recover;
  for (const auto& s : link.states) p.state_throughput.push_back(s.throughput);
  p.blockage_throughput = link.blockage.thp_b;
  return p;
}

inline MarkovChain build_chain(const ValidatedScenario& scenario) {
  return build_chain(chain_parameters(scenario, link_throughput(scenario)));
}

struct StationaryDistribution {
  std::vector<double> pi;
  double residual = 0.0;  // max |(pi P - pi)_j|
};

inline double stationary_residual(const MarkovChain& chain,
                                  const std::vector<double>& pi) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::RowVectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) row(i) = pi[static_cast<std::size_t>(i)];
  return (row * chain.matrix() - row).cwiseAbs().maxCoeff();
}

/// Solves pi = pi P, sum(pi) = 1 directly: the balance equations (P^T - I)
/// with the last one replaced by the normalization row.
inline StationaryDistribution stationary(const MarkovChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::MatrixXd a = chain.matrix().transpose() -
                      Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw NumericalError("stationary system is singular (chain has more "
                         "than one closed class)");
  }
  Eigen::VectorXd x = lu.solve(rhs);

  StationaryDistribution out;
  out.pi.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = x(i);
    if (v < -1e-12) throw NumericalError("stationary solve went negative");
    out.pi[static_cast<std::size_t>(i)] = std::max(v, 0.0);
    total += out.pi[static_cast<std::size_t>(i)];
  }
  for (auto& v : out.pi) v /= total;
  out.residual = stationary_residual(chain, out.pi);
  return out;
}

/// Debug dump: header `state,<labels...>`, then one row per state.
inline void write_chain_csv(std::ostream& out, const MarkovChain& chain) {
  out << "state";
  for (const auto& l : chain.labels()) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < chain.size(); ++i) {
    out << chain.labels()[i];
    for (std::size_t j = 0; j < chain.size(); ++j) {
      out << ',' << format_number(chain(i, j));
    }
    out << '\n';
  }
}

}  // namespace mmblock
