#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmblock/simulate.hpp"
#include "mmblock/trace.hpp"

using namespace mmblock;

namespace {

ThroughputTrace parse(const std::string& text) {
  std::istringstream in(text);
  return load_trace(in);
}

// Dips of `dip` zero samples, each followed by `hold` samples of the level
// picked by `landing`.
ThroughputTrace planted(const std::vector<double>& levels,
                        const std::vector<std::size_t>& landing,
                        std::size_t hold, std::size_t dip, double noise,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  ThroughputTrace t;
  double time = 0.0;
  auto push = [&](double x) {
    t.samples.push_back({time, std::max(0.0, x)});
    time += 0.01;
  };
  for (std::size_t which : landing) {
    for (std::size_t i = 0; i < dip; ++i) push(0.0);
    for (std::size_t i = 0; i < hold; ++i) {
      push(levels[which] + (noise > 0.0 ? n(rng) : 0.0));
    }
  }
  return t;
}

std::vector<std::size_t> landing_pattern(const std::vector<double>& p,
                                         std::size_t count) {
  // deterministic interleaving with the exact proportions p
  std::vector<std::size_t> out;
  std::vector<double> credit(p.size(), 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      credit[j] += p[j];
      if (credit[j] > credit[best]) best = j;
    }
    credit[best] -= 1.0;
    out.push_back(best);
  }
  return out;
}

}  // namespace

TEST(LoadTrace, ParsesAndRejectsMalformedInput) {
  const auto t = parse("time_s,throughput_bps\n0,1e9\n0.5,2e9\n\n1.0,0\n");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.samples[1].throughput, 2e9);

  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const TraceError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message(""), "trace file is empty");
  EXPECT_EQ(message("time_s,throughput_bps\n"), "trace has no samples");
  EXPECT_NE(message("t,x\n0,1\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("time_s,throughput_bps\n0,1,2\n").find("line 2"),
            std::string::npos);
  EXPECT_NE(message("time_s,throughput_bps\n0,1\n0,2\n").find("increasing"),
            std::string::npos);
  EXPECT_NE(message("time_s,throughput_bps\n0,-1\n").find("negative"),
            std::string::npos);
  EXPECT_NE(message("time_s,throughput_bps\n0,abc\n").find("malformed"),
            std::string::npos);
  EXPECT_THROW(load_trace_file("/nonexistent/trace.csv"), IoError);
}

TEST(ExtractLevels, ExactPlantedTwoLevels) {
  const auto trace =
      planted({400e6, 200e6}, landing_pattern({0.7, 0.3}, 50), 20, 5, 0.0, 1);
  const auto m = extract_levels(trace, 4);
  ASSERT_EQ(m.n_states, 2u);
  EXPECT_DOUBLE_EQ(m.levels[0], 400e6);
  EXPECT_DOUBLE_EQ(m.levels[1], 200e6);
  EXPECT_EQ(m.dips, 50u);
  EXPECT_DOUBLE_EQ(m.p_recover[0], 0.7);
  EXPECT_DOUBLE_EQ(m.p_recover[1], 0.3);
  EXPECT_NEAR(m.mean_dip_duration, 0.05, 1e-9);
}

TEST(ExtractLevels, NoisyPlantedThreeLevels) {
  const std::vector<double> levels{1.6e9, 1.1e9, 700e6};
  const std::vector<double> p{0.5, 0.3, 0.2};
  const auto trace = planted(levels, landing_pattern(p, 200), 30, 8, 5e6, 7);
  const auto m = extract_levels(trace, 5);
  ASSERT_EQ(m.n_states, 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(m.levels[j], levels[j], 0.05 * levels[j]);
    EXPECT_NEAR(m.p_recover[j], p[j], 0.1);
  }
}

TEST(ExtractLevels, ConstantTraceIsOneLevel) {
  ThroughputTrace t;
  for (int i = 0; i < 100; ++i) t.samples.push_back({0.01 * i, 1e9});
  const auto m = extract_levels(t, 3);
  ASSERT_EQ(m.n_states, 1u);
  EXPECT_EQ(m.levels[0], 1e9);
  EXPECT_EQ(m.p_recover, std::vector<double>{1.0});
  EXPECT_EQ(m.dips, 0u);
}

TEST(ExtractLevels, ScaleEquivariant) {
  auto trace =
      planted({900e6, 300e6}, landing_pattern({0.4, 0.6}, 40), 25, 4, 5e6, 3);
  const auto a = extract_levels(trace, 4);
  for (auto& s : trace.samples) s.throughput *= 3.0;
  const auto b = extract_levels(trace, 4);
  ASSERT_EQ(a.n_states, b.n_states);
  for (std::size_t j = 0; j < a.n_states; ++j) {
    EXPECT_NEAR(b.levels[j], 3.0 * a.levels[j], 1e-9 * b.levels[j]);
    EXPECT_EQ(a.p_recover[j], b.p_recover[j]);
  }
}

TEST(ExtractLevels, InputErrors) {
  ThroughputTrace t;
  for (int i = 0; i < 15; ++i) t.samples.push_back({0.01 * i, 1e9});
  EXPECT_THROW(extract_levels(t, 2), DomainError);  // too short
  EXPECT_THROW(extract_levels(t, 0), DomainError);
  EXPECT_THROW(extract_levels(t, 1, 1.0), DomainError);
  // two levels but never a dip: recovery is unobservable
  ThroughputTrace flat;
  for (int i = 0; i < 200; ++i) {
    flat.samples.push_back({0.01 * i, i < 100 ? 1e9 : 5e8});
  }
  EXPECT_THROW(extract_levels(flat, 3), TraceError);
}

TEST(ExtractLevels, RecoversChainThatGeneratedTheTrace) {
  ChainParameters p;
  p.mu_slots = 200.0;
  p.blockage_slots = 20.0;
  p.p_c = 1.0;
  p.p_recover = {0.6, 0.4};
  p.state_throughput = {400e6, 200e6};
  const auto chain = build_chain(p);
  ChainSimOptions opt;
  opt.bin = opt.slot;
  const auto run = simulate_chain(chain, 2000000, 5, opt);
  ThroughputTrace t;
  for (const auto& s : run.series) t.samples.push_back({s.time, s.throughput});

  const auto m = extract_levels(t, 4);
  ASSERT_EQ(m.n_states, 2u);
  EXPECT_NEAR(m.levels[0], 400e6, 1.0);
  EXPECT_NEAR(m.levels[1], 200e6, 1.0);
  EXPECT_GT(m.dips, 5000u);
  EXPECT_NEAR(m.p_recover[0], 0.6, 0.03);
  EXPECT_NEAR(m.mean_dip_duration, 0.020, 0.002);

  const auto back = empirical_chain_parameters(m, 0.2, 1e-3);
  EXPECT_NEAR(back.mu_slots, 200.0, 1e-9);
  EXPECT_NEAR(back.blockage_slots, 20.0, 2.0);
  EXPECT_EQ(back.p_c, 1.0);
}

TEST(WriteModelFragment, ParsesAsConfigLine) {
  EmpiricalModel m;
  m.levels = {4e8, 2e8};
  m.p_recover = {0.75, 0.25};
  m.n_states = 2;
  m.dips = 8;
  m.mean_dip_duration = 0.5;
  std::ostringstream out;
  write_model_fragment(out, m);
  EXPECT_EQ(out.str(),
            "# fitted from trace: 2 level(s), 8 resolved dip(s)\n"
            "# levels_bps = 4e+08,2e+08\n"
            "# mean_dip_s = 0.5\n"
            "p_recover = 0.75,0.25\n");
}
