#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mmblock/chain.hpp"
#include "mmblock/config.hpp"
#include "mmblock/simulate.hpp"

using namespace mmblock;

namespace {

MarkovChain two_state() {
  Eigen::MatrixXd m(2, 2);
  m << 0.9, 0.1, 0.4, 0.6;
  return MarkovChain({"a", "b"}, m, {10.0, 0.0});
}

std::string series_csv(const SimulationResult& r) {
  std::ostringstream out;
  write_series_csv(out, r);
  return out.str();
}

}  // namespace

TEST(SimulateChain, SingleStateIsConstant) {
  const MarkovChain c({"only"}, Eigen::MatrixXd::Ones(1, 1), {5.0});
  const auto r = simulate_chain(c, 1000, 1);
  EXPECT_EQ(r.occupancy[0], 1.0);
  EXPECT_EQ(r.mean, 5.0);
  EXPECT_EQ(r.variance, 0.0);
  EXPECT_EQ(r.series.size(), 2u);  // two 0.5 s bins of 1 ms slots
  EXPECT_EQ(r.series[1].time, 0.5);
}

TEST(SimulateChain, OccupancyConvergesToStationary) {
  const auto r = simulate_chain(two_state(), 1000000, 11);
  EXPECT_NEAR(r.occupancy[0], 0.8, 0.01);
  EXPECT_NEAR(r.occupancy[1], 0.2, 0.01);
  EXPECT_NEAR(r.mean, 8.0, 0.1);
  EXPECT_NEAR(r.variance, 16.0, 0.5);
}

TEST(SimulateChain, SeededAndDeterministic) {
  const auto a = simulate_chain(two_state(), 100000, 5);
  const auto b = simulate_chain(two_state(), 100000, 5);
  const auto c = simulate_chain(two_state(), 100000, 6);
  EXPECT_EQ(series_csv(a), series_csv(b));
  EXPECT_NE(series_csv(a), series_csv(c));
  EXPECT_THROW(simulate_chain(two_state(), 0, 1), DomainError);
}

TEST(SimulateEvents, ZeroLoadDeliversNothing) {
  const auto s = validate(ScenarioConfig{});
  EventSimOptions opt;
  opt.load = 0.0;
  const auto r = simulate_events(s, 200.0, 3, opt);
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.events->bits_arrived, 0);
  EXPECT_GT(r.events->blockages, 10);
  EXPECT_NEAR(r.duration, 200.0, 1e-9);
}

TEST(SimulateEvents, BlockageFreeBestStateCarriesTheLoad) {
  const auto s = validate(ScenarioConfig{});
  EventSimOptions opt;
  opt.blockages = false;
  const auto r = simulate_events(s, 10.0, 3, opt);
  EXPECT_NEAR(r.mean, s.derived.load, 0.01 * s.derived.load);
  EXPECT_EQ(r.events->blockages, 0);
  EXPECT_EQ(r.occupancy[0], 1.0);
}

TEST(SimulateEvents, ConservesBitsExactly) {
  for (double ssi : {kInfinity, 0.5}) {
    ScenarioConfig c;
    c.blockage.mu = 2.0;
    c.sweep.ssi = ssi;
    const auto r = simulate_events(validate(c), 60.0, 17);
    const auto& k = *r.events;
    EXPECT_EQ(k.bits_arrived, k.bits_delivered + k.bits_dropped + k.bits_queued);
    EXPECT_GT(k.bits_dropped, 0);  // the load is above the sub-level rates
    double total = 0.0;
    for (double o : r.occupancy) total += o;
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(SimulateEvents, SeededAndDeterministic) {
  ScenarioConfig c;
  c.blockage.mu = 2.0;
  c.sweep.ssi = 1.0;
  const auto s = validate(c);
  const auto a = simulate_events(s, 40.0, 9);
  const auto b = simulate_events(s, 40.0, 9);
  EXPECT_EQ(series_csv(a), series_csv(b));
  EXPECT_EQ(a.events->bits_delivered, b.events->bits_delivered);
  EXPECT_THROW(simulate_events(s, 5.0, 9), DomainError);
}

TEST(SimulateEvents, PreemptionCountMatchesClosedForm) {
  // Near-instant blockages so the gap is measured onset to onset.
  ScenarioConfig c;
  c.blockage.mu = 2.0;
  c.blockage.sigma = 0.1;
  c.blockage.v = 1e4;
  c.sweep.ssi = 2.0;
  EventSimOptions opt;
  opt.load = 0.0;
  opt.bin = 100.0;
  const auto r = simulate_events(validate(c), 1e5, 21, opt);
  const auto& k = *r.events;
  EXPECT_GT(k.blockages, 40000);
  const double closed = sweep_preemption_probability({2.0, 0.1, 2.0});
  EXPECT_LE(std::abs(k.preemption_fraction() - closed),
            3.0 * k.preemption_standard_error())
      << k.preemption_fraction() << " vs " << closed;
}
