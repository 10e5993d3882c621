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
#include <variant>

#include <gtest/gtest.h>

#include "ruinlab/model.hpp"
#include "ruinlab/paths.hpp"
#include "ruinlab/rng.hpp"
#include "test_models.hpp"

namespace ruinlab {
namespace {

using testing::kappa_price;
using testing::lambda_price;

TEST(Variant, ClassifiesBySupport) {
  EXPECT_EQ(classify_variant(BusinessModel(1, Distribution::uniform(-2, -1), Distribution::exponential(1))),
            Variant::NonLife);
  EXPECT_EQ(classify_variant(BusinessModel(-1, Distribution::exponential(1), Distribution::exponential(1))),
            Variant::Annuity);
  EXPECT_EQ(classify_variant(BusinessModel(1, Distribution::two_point(-1, 0.5, 1), Distribution::exponential(1))),
            Variant::Mixed);
  EXPECT_STREQ(to_string(Variant::Mixed), "mixed");
}

TEST(Variant, StableUnderPositiveScaling) {
  for (double s : {0.01, 1.0, 7.5, 1e6}) {
    const auto a = Distribution::uniform(-2 * s, -1 * s);
    const auto b = Distribution::two_point(-s, 0.3, 2 * s);
    EXPECT_EQ(classify_variant(BusinessModel(1, a, Distribution::exponential(1))), Variant::NonLife);
    EXPECT_EQ(classify_variant(BusinessModel(1, b, Distribution::exponential(1))), Variant::Mixed);
  }
}

TEST(BusinessModel, RejectsDegenerateCases) {
  try {
    BusinessModel(-1, Distribution::uniform(-2, -1), Distribution::exponential(1));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ruin happens for sure: rejected"), std::string::npos);
  }
  try {
    BusinessModel(1, Distribution::exponential(1), Distribution::exponential(1));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ruin never happens"), std::string::npos);
  }
  EXPECT_THROW(BusinessModel(1, Distribution::two_point(-1, 0.5, 0), Distribution::exponential(1)),
               ValidationError);
  EXPECT_THROW(BusinessModel(1, Distribution::uniform(-2, -1), Distribution::deterministic(0)), ValidationError);
  EXPECT_THROW(BusinessModel(1, Distribution::uniform(-2, -1), Distribution::uniform(-1, 1)), ValidationError);
  // c = 0 is admitted and classified by the claims alone.
  EXPECT_EQ(classify_variant(BusinessModel(0, Distribution::uniform(-2, -1), Distribution::exponential(1))),
            Variant::NonLife);
}

TEST(PriceModel, RejectsInvalid) {
  EXPECT_THROW(PriceModel(0.1, 0, JumpMeasure()), ValidationError);
  EXPECT_THROW(PriceModel(0.1, -1, JumpMeasure()), ValidationError);
  EXPECT_THROW(JumpMeasure(1, Distribution::uniform(-1.5, 0)), ValidationError);
  EXPECT_THROW(JumpMeasure(1, std::nullopt), ValidationError);
  EXPECT_THROW(JumpMeasure(-1, Distribution::deterministic(0.5)), ValidationError);
  EXPECT_NO_THROW(PriceModel(0.1, 0, JumpMeasure(), true));
}

TEST(Logprice, Parameters) {
  EXPECT_NEAR(logprice_params(testing::bs_price()).mu_v, 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(logprice_params(kappa_price()).mu_v, 1.0);
  const auto p = logprice_params(lambda_price(-0.2));
  EXPECT_DOUBLE_EQ(p.mu_v, -0.7);
  ASSERT_TRUE(p.log_jump_law.has_value());
  EXPECT_TRUE(p.log_jump_law->has_atom_at(std::log(1.5)));
  EXPECT_FALSE(p.pi_h_numeric);
  EXPECT_DOUBLE_EQ(p.rho, 1.0);
}

TEST(Logprice, NumericTruncatedMeanIsFlagged) {
  // E[J 1{|J| <= 1}] for J ~ U(−0.5, 2) is 0.15.
  const PriceModel p(0.4, 0.0, JumpMeasure(2.0, Distribution::uniform(-0.5, 2.0)));
  EXPECT_TRUE(p.pi_h_numeric());
  EXPECT_NEAR(p.pi_h(), 0.3, 1e-12);
  EXPECT_NEAR(p.mu_v(), 0.1, 1e-12);
}

TEST(LambdaKappa, OneSidedCases) {
  const auto l = lambda_kappa(lambda_price(-0.2));
  ASSERT_TRUE(std::holds_alternative<Lambda>(l));
  EXPECT_DOUBLE_EQ(std::get<Lambda>(l).value, 0.7);
  EXPECT_DOUBLE_EQ(-std::get<Lambda>(l).value, lambda_price(-0.2).mu_v());

  const auto k = lambda_kappa(kappa_price());
  ASSERT_TRUE(std::holds_alternative<Kappa>(k));
  EXPECT_DOUBLE_EQ(std::get<Kappa>(k).value, 1.0);

  EXPECT_TRUE(std::holds_alternative<NotOneSided>(lambda_kappa(testing::bs_price())));
  const PriceModel two(0.1, 0, JumpMeasure(1, Distribution::two_point(-0.5, 0.5, 0.5)));
  EXPECT_TRUE(std::holds_alternative<NotOneSided>(lambda_kappa(two)));
}

TEST(LambdaKappa, WrongDriftSignIsAnAssumptionFailure) {
  EXPECT_THROW(lambda_kappa(lambda_price(0.6)), AssumptionError);
  EXPECT_THROW(lambda_kappa(PriceModel(-0.6, 0, JumpMeasure(1, Distribution::deterministic(-0.5)))),
               AssumptionError);
}

TEST(Logprice, PriceFactorsArePositive) {
  const PriceModel prices[] = {testing::bs_price(), kappa_price(), lambda_price(-0.2)};
  Xoshiro256 rng(5);
  for (const auto& p : prices) {
    for (double t : {0.01, 1.0, 50.0}) {
      for (int i = 0; i < 2000; ++i) ASSERT_GT(std::exp(sample_logprice(p, t, rng)), 0.0);
    }
  }
}

}  // namespace
}  // namespace ruinlab
