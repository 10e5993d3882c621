// Copyright 2026 The ruinlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ruinlab/cumulant.hpp"
#include "ruinlab/perpetuity.hpp"
#include "ruinlab/rng.hpp"
#include "test_models.hpp"

namespace ruinlab {
namespace {

// M = e^{−E} with E ~ Exp(1), Q ≡ 1.
struct ExpFactorSampler {
  PerpetuitySample operator()(Xoshiro256& rng) const {
    const double e = -std::log(rng.uniform_open());
    return {std::exp(-e), 1.0, 1, 0};
  }
};

std::vector<double> pareto(double alpha, std::size_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = std::pow(rng.uniform_open(), -1.0 / alpha);
  return v;
}

TEST(SampleY, GeometricSeries) {
  Xoshiro256 rng(1);
  const auto d = sample_y(ConstantPairSampler{0.5, 1.0}, 1000, 1e-12, rng);
  EXPECT_NEAR(d.value, 2.0, 1e-11);
  EXPECT_FALSE(d.capped);
  const auto five = sample_y(ConstantPairSampler{0.5, 1.0}, 5, 1e-12, rng);
  EXPECT_DOUBLE_EQ(five.value, 2.0 - std::pow(2.0, 1 - 5));
  EXPECT_TRUE(five.capped);
  EXPECT_EQ(five.terms, 5u);
}

TEST(SampleY, CollapsesWhenMIsZero) {
  Xoshiro256 rng(1);
  const auto d = sample_y(ConstantPairSampler{0.0, 3.5}, 1000, 1e-12, rng);
  EXPECT_EQ(d.value, 3.5);
  EXPECT_EQ(d.terms, 1u);
}

TEST(SampleY, TruncationErrorBound) {
  // |Q| <= 1, M = m̄ < 1: discarded tail <= weight_tol·Q_max/(1 − m̄).
  for (double m : {0.1, 0.5, 0.9, 0.99}) {
    for (double tol : {1e-3, 1e-6, 1e-12}) {
      Xoshiro256 rng(1);
      const auto d = sample_y(ConstantPairSampler{m, 1.0}, 1000000, tol, rng);
      EXPECT_LE(std::abs(1 / (1 - m) - d.value), tol / (1 - m) * (1 + 1e-9)) << m << " " << tol;
    }
  }
}

TEST(SampleY, RejectsBadArguments) {
  Xoshiro256 rng(1);
  EXPECT_THROW(sample_y(ConstantPairSampler{0.5, 1}, 0, 1e-12, rng), ValidationError);
  EXPECT_THROW(sample_y(ConstantPairSampler{0.5, 1}, 10, 0, rng), ValidationError);
}

TEST(SampleY, ThreadCountDoesNotMatter) {
  const Model m = testing::jump_nonlife();
  const ModelPairSampler pairs{&m, 1, {}};
  const auto a = sample_y_many(pairs, 3000, 100000, 1e-12, 5, 1);
  const auto b = sample_y_many(pairs, 3000, 100000, 1e-12, 5, 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.total_terms, b.total_terms);
}

TEST(SampleY, FixedPointKolmogorovSmirnov) {
  const Model m = testing::jump_nonlife();
  const ModelPairSampler pairs{&m, 1, {}};
  const auto y = sample_y_many(pairs, 20000, 100000, 1e-12, 11, 1);
  const auto z = sample_shifted_y_many(pairs, 20000, 100000, 1e-12, 11, 1);
  const auto ks = ks_two_sample(y.values, z.values, 0.01);
  EXPECT_FALSE(ks.reject) << ks.statistic << " vs " << ks.critical;
}

TEST(KolmogorovSmirnov, Basics) {
  const std::vector<double> a{1, 2, 3, 4};
  EXPECT_EQ(ks_two_sample(a, a).statistic, 0.0);
  const std::vector<double> b{11, 12, 13, 14};
  EXPECT_EQ(ks_two_sample(a, b).statistic, 1.0);
  EXPECT_NEAR(ks_critical(0.01, 100000, 100000), 1.6276 * std::sqrt(2.0 / 100000), 1e-5);
  auto p = pareto(2, 20000, 1), q = pareto(2, 20000, 2);
  EXPECT_FALSE(ks_two_sample(p, q).reject);
  for (auto& x : q) x *= 1.2;
  EXPECT_TRUE(ks_two_sample(p, q).reject);
}

TEST(EmpiricalSurvival, Definition) {
  const EmpiricalSurvival s({3, 1, 2, 2, 5});
  EXPECT_EQ(s(0.5), 1.0);
  EXPECT_EQ(s(1), 0.8);
  EXPECT_EQ(s(2), 0.4);
  EXPECT_EQ(s(4.9), 0.2);
  EXPECT_EQ(s(5), 0.0);
  EXPECT_NEAR(s.se(2), std::sqrt(0.4 * 0.6 / 5), 1e-15);
  const EmpiricalSurvival neg({-3, -1, -0.5});
  for (double u : {0.1, 1.0, 10.0}) EXPECT_EQ(neg(u), 0.0);
}

TEST(EmpiricalSurvival, MonotoneOnGrid) {
  const EmpiricalSurvival s(pareto(1.5, 10000, 3));
  double prev = 1;
  for (double u = 0; u < 100; u += 0.37) {
    ASSERT_LE(s(u), prev);
    prev = s(u);
  }
}

TEST(TailEstimate, HillOnPareto) {
  const auto t = tail_estimate(pareto(2, 100000, 7), {1, 2, 5, 10});
  EXPECT_GE(t.hill.index, 1.8);
  EXPECT_LE(t.hill.index, 2.2);
  EXPECT_TRUE(t.hill.reliable);
  ASSERT_EQ(t.hill_sweep.size(), 3u);
  for (const auto& h : t.hill_sweep) {
    EXPECT_GT(h.index, 1.7);
    EXPECT_LT(h.index, 2.3);
  }
  ASSERT_TRUE(t.loglog.valid);
  EXPECT_NEAR(t.loglog.slope, -2.0, 0.1);
  ASSERT_EQ(t.grid.size(), 4u);
  EXPECT_NEAR(t.grid[1].survival, 0.25, 4 * t.grid[1].se);
  EXPECT_LT(flatness_ratio(t.survival, 2.0, 0.9, 0.999, 50), 1.5);
}

TEST(TailEstimate, UnreliableHillWithFewTailPoints) {
  const EmpiricalSurvival s(pareto(2, 4000, 7));
  const auto h = hill_estimate(s, 0.01);
  EXPECT_EQ(h.k, 40u);
  EXPECT_FALSE(h.reliable);
}

TEST(TailEstimate, NeedsEnoughSamples) {
  EXPECT_THROW(tail_estimate(pareto(2, 9999, 1), {1}), ValidationError);
}

TEST(TailEstimate, NonPositiveSamples) {
  std::vector<double> v(20000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -1.0 - static_cast<double>(i);
  const auto t = tail_estimate(v, {0.5, 1, 10});
  for (const auto& r : t.grid) EXPECT_EQ(r.survival, 0.0);
  EXPECT_FALSE(t.loglog.valid);
}

TEST(RuinBounds, Arithmetic) {
  // 500 at −1, 490 at 0.5, 10 at 2: Ḡ(1) = 0.01, Ḡ(0) = 0.5.
  std::vector<double> v(500, -1.0);
  v.insert(v.end(), 490, 0.5);
  v.insert(v.end(), 10, 2.0);
  const EmpiricalSurvival s(v);
  const auto b = ruin_bounds(s, 1.0);
  EXPECT_DOUBLE_EQ(b.lower, 0.01);
  EXPECT_DOUBLE_EQ(b.upper, 0.02);
  EXPECT_GT(b.lower_se, 0);
  EXPECT_GT(b.upper_se, 0);

  const auto below = ruin_bounds(s, -2.0);
  EXPECT_EQ(below.lower, 1.0);
  EXPECT_EQ(below.upper, 1.0);

  const EmpiricalSurvival pos({1, 2, 3, 4});
  const auto same = ruin_bounds(pos, 2.5);
  EXPECT_EQ(same.lower, same.upper);

  try {
    ruin_bounds(EmpiricalSurvival({-1, -2}), 1.0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("upper bound undefined: no mass above 0"), std::string::npos);
  }
}

TEST(Goldie, ConstantPairFails) {
  const auto r = goldie_moment_check(ConstantPairSampler{0.5, 1.0}, 1.0, 1000, 1, 1);
  EXPECT_DOUBLE_EQ(r.m_beta.mean, 0.5);
  EXPECT_FALSE(r.em_one);
  EXPECT_TRUE(r.degenerate_m);
  EXPECT_FALSE(r.all_finite_and_em1);
  const auto one = goldie_moment_check(ConstantPairSampler{1.0, 1.0}, 1.0, 1000, 1, 1);
  EXPECT_TRUE(one.degenerate_m);
  EXPECT_FALSE(one.all_finite_and_em1);
}

TEST(Goldie, ExponentialFactor) {
  const auto r = goldie_moment_check(ExpFactorSampler{}, 1.0, 100000, 2, 1);
  EXPECT_NEAR(r.m_beta.mean, 0.5, 4 * r.m_beta.se);
  EXPECT_FALSE(r.em_one);
}

TEST(Goldie, BenchmarkModel) {
  const Model m = testing::jump_nonlife();
  const double beta = find_beta(m).beta;
  const auto r = goldie_moment_check(ModelPairSampler{&m, 1, {}}, beta, 100000, 3, 1);
  EXPECT_NEAR(r.m_beta.mean, 1.0, 4 * r.m_beta.se);
  EXPECT_TRUE(r.em_one);
  EXPECT_TRUE(r.stable);
  EXPECT_TRUE(r.all_finite_and_em1);
}

}  // namespace
}  // namespace ruinlab
