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
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "ruinlab/parallel.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {
namespace {

TEST(Rng, SameSeedSameSequence) {
  Xoshiro256 a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, StreamsDifferByTagAndIndex) {
  std::set<std::uint64_t> seeds;
  for (auto tag : {StreamTag::kPerpetuity, StreamTag::kRuinPaths, StreamTag::kNonNull}) {
    for (std::uint64_t i = 0; i < 100; ++i) seeds.insert(stream_seed(7, tag, i));
  }
  EXPECT_EQ(seeds.size(), 300u);
  EXPECT_NE(stream_seed(7, StreamTag::kTest, 0), stream_seed(8, StreamTag::kTest, 0));
}

TEST(Rng, UniformOpenStaysInside) {
  Xoshiro256 r(1);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(Parallel, MapIsIndependentOfThreadCount) {
  auto f = [](std::size_t i) {
    Xoshiro256 r = make_stream(3, StreamTag::kTest, i);
    return r();
  };
  const auto one = parallel_map<std::uint64_t>(1000, 1, f);
  const auto four = parallel_map<std::uint64_t>(1000, 4, f);
  const auto seven = parallel_map<std::uint64_t>(1000, 7, f);
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, seven);
}

TEST(Parallel, ForwardsExceptions) {
  EXPECT_THROW(parallel_for(600, 3,
                            [](std::size_t i) {
                              if (i == 417) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Parallel, ZeroItems) {
  EXPECT_TRUE(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
}

}  // namespace
}  // namespace ruinlab
