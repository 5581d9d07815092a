#include <gtest/gtest.h>

#include <cmath>

#include "mmblock/config.hpp"
#include "mmblock/probability.hpp"
#include "oracles.hpp"

using namespace mmblock;

TEST(Erf, MatchesSeriesOracle) {
  EXPECT_EQ(mmblock::erf(0.0), 0.0);
  EXPECT_NEAR(mmblock::erf(1.0), oracle::erf_series(1.0), 1e-10);
  EXPECT_NEAR(oracle::erf_series(1.0), 0.8427007929, 1e-10);
  for (double x = -3.0; x <= 3.0; x += 0.0625) {
    EXPECT_NEAR(mmblock::erf(x), oracle::erf_series(x), 1e-10) << x;
  }
  EXPECT_GT(mmblock::erf(6.0), 1.0 - 1e-10);
}

TEST(Erf, OddAndMonotone) {
  double prev = -1.0;
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    EXPECT_EQ(mmblock::erf(-x), -mmblock::erf(x));
    EXPECT_GE(mmblock::erf(x), prev);
    prev = mmblock::erf(x);
  }
}

TEST(StayProbability, InverseOfMeanDwell) {
  EXPECT_DOUBLE_EQ(stay_probability(2000.0), 0.9995);
  EXPECT_DOUBLE_EQ(stay_probability(20000.0), 0.99995);
  EXPECT_EQ(stay_probability(1.0), 0.0);
  EXPECT_THROW(stay_probability(0.5), DomainError);
  EXPECT_NEAR(mean_dwell_slots(stay_probability(1234.5)), 1234.5, 1e-8);
}

TEST(DwellPmf, GeometricValues) {
  EXPECT_EQ(dwell_pmf(0.0, 1), 1.0);
  EXPECT_EQ(dwell_pmf(0.0, 2), 0.0);
  EXPECT_DOUBLE_EQ(dwell_pmf(0.5, 3), 0.125);
  EXPECT_THROW(dwell_pmf(0.5, 0), DomainError);
  EXPECT_THROW(dwell_pmf(1.0, 3), DomainError);
}

TEST(DwellPmf, NormalizedWithMeanOneOverOneMinusP) {
  for (double p : {0.0, 0.3, 0.9, 0.999, 0.9995}) {
    // tail mass beyond K is p^K < 2e-22
    const auto k_max = static_cast<long long>(50.0 / (1.0 - p)) + 1;
    double total = 0.0;
    double mean = 0.0;
    for (long long k = 1; k <= k_max; ++k) {
      const double pk = dwell_pmf(p, k);
      total += pk;
      mean += static_cast<double>(k) * pk;
    }
    EXPECT_NEAR(total, 1.0, 1e-9) << p;
    EXPECT_NEAR(mean, 1.0 / (1.0 - p), 1e-9 / (1.0 - p) * 10) << p;
  }
  // partial sum to 10^6 slots for a 2 s interval at 1 ms
  double mean = 0.0;
  for (long long k = 1; k <= 1000000; ++k) {
    mean += static_cast<double>(k) * dwell_pmf(0.9995, k);
  }
  EXPECT_NEAR(mean, 2000.0, 1e-6);
}

TEST(SweepPreemption, Limits) {
  EXPECT_EQ(sweep_preemption_probability({2.0, 0.1, kInfinity}), 1.0);
  EXPECT_LT(sweep_preemption_probability({10.0, 0.1, 0.1}), 1e-15);
  EXPECT_THROW(sweep_preemption_probability({0.0, 0.1, 1.0}), DomainError);
  EXPECT_THROW(sweep_preemption_probability({1.0, 0.0, 1.0}), DomainError);
}

TEST(SweepPreemption, ClosedFormMatchesQuadrature) {
  for (double mu : {2.0, 5.0, 10.0, 20.0}) {
    for (double sigma : {0.05, 0.1, 0.5}) {
      for (double s : {0.01, 0.1, 1.0, mu, 2 * mu, 10 * mu}) {
        const double closed = sweep_preemption_probability({mu, sigma, s});
        const double quad = oracle::preemption_quadrature(mu, sigma, s);
        EXPECT_NEAR(closed, quad, 1e-9)
            << "mu=" << mu << " sigma=" << sigma << " S=" << s;
      }
    }
  }
  EXPECT_NEAR(sweep_preemption_probability({2.0, 0.1, 2.0}), 0.01995, 5e-5);
}

TEST(SweepPreemption, BoundedAndMonotoneInPeriod) {
  for (double mu : {2.0, 5.0, 10.0, 20.0}) {
    for (double sigma : {0.05, 0.1, 0.5}) {
      if (!(mu > 3 * sigma)) continue;
      double prev = 0.0;
      for (double s = 0.01; s < 50 * mu; s *= 1.1) {
        const double p = sweep_preemption_probability({mu, sigma, s});
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        EXPECT_GE(p, prev - 1e-15) << "mu=" << mu << " S=" << s;
        prev = p;
      }
    }
  }
}

TEST(SweepPreemptionMc, AgreesWithClosedForm) {
  const PreemptionInputs in{2.0, 0.1, 2.0};
  const auto mc = sweep_preemption_mc(in, 1000000, 42);
  const double closed = sweep_preemption_probability(in);
  EXPECT_NEAR(mc.estimate, 0.020, 0.001);
  EXPECT_NEAR(mc.standard_error, 0.00014, 0.00001);
  EXPECT_LE(std::abs(mc.estimate - closed), 3 * mc.standard_error);
}

TEST(SweepPreemptionMc, DeterministicAndEdgeCases) {
  const PreemptionInputs in{2.0, 0.1, 2.0};
  const auto a = sweep_preemption_mc(in, 10000, 7);
  const auto b = sweep_preemption_mc(in, 10000, 7);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.standard_error, b.standard_error);

  const auto none = sweep_preemption_mc({2.0, 0.1, kInfinity}, 10, 1);
  EXPECT_EQ(none.estimate, 1.0);
  EXPECT_EQ(none.standard_error, 0.0);
  EXPECT_THROW(sweep_preemption_mc(in, 999, 1), DomainError);
}
