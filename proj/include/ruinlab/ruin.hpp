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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ruinlab/parallel.hpp"
#include "ruinlab/paths.hpp"
#include "ruinlab/perpetuity.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {

struct RuinGridRow {
  double u = 0;
  double psi_hat = 0;
  double se = 0;
  std::uint64_t ruined = 0;
  std::uint64_t barrier = 0;
  std::uint64_t horizon = 0;
  /// Upper estimate of the ruin probability lost to truncation: the mean over
  /// unresolved paths of the bound Ḡ(X_stop)/Ḡ(0) on later ruin. Zero when
  /// no perpetuity sample is supplied.
  double slack = 0;
};

struct RuinGridEstimate {
  std::vector<RuinGridRow> rows;
  std::uint64_t paths = 0;
  std::uint64_t saturations = 0;
};

/// Finite-horizon ruin frequencies on a u grid, one path shared by all u.
/// Paths are stopped at claim epochs, where the future is a fresh copy of the
/// model started from the current reserve, and the perpetuity bound applies to the
/// remainder.
inline RuinGridEstimate estimate_ruin_grid(const Model& model, std::vector<double> u_grid,
                                           const RuinHorizon& hz, std::uint64_t paths,
                                           std::uint64_t seed, unsigned threads,
                                           const PathOptions& opt = {},
                                           const EmpiricalSurvival* tail = nullptr) {
  if (!std::is_sorted(u_grid.begin(), u_grid.end())) {
    throw ValidationError("u grid must be increasing");
  }
  struct PathResult {
    std::vector<RuinOutcome> outcomes;
    std::uint64_t saturations = 0;
  };
  const auto results = parallel_map<PathResult>(paths, threads, [&](std::size_t i) {
    Xoshiro256 rng = make_stream(seed, StreamTag::kRuinPaths, i);
    PathResult r;
    r.outcomes = simulate_ruin_grid(model, u_grid, hz, rng, opt, r.saturations);
    return r;
  });
  RuinGridEstimate est;
  est.paths = paths;
  est.rows.resize(u_grid.size());
  double g0 = 0;
  if (tail != nullptr) g0 = (*tail)(0.0);
  std::vector<double> slack_sum(u_grid.size(), 0.0);
  for (const auto& r : results) {
    est.saturations += r.saturations;
    for (std::size_t j = 0; j < u_grid.size(); ++j) {
      const auto& o = r.outcomes[j];
      auto& row = est.rows[j];
      switch (o.status) {
        case RuinStatus::Ruined: ++row.ruined; break;
        case RuinStatus::SurvivedToBarrier: ++row.barrier; break;
        case RuinStatus::SurvivedToHorizon: ++row.horizon; break;
      }
      if (o.status != RuinStatus::Ruined && tail != nullptr && g0 > 0) {
        slack_sum[j] += std::min(1.0, (*tail)(o.reserve) / g0);
      }
    }
  }
  const double n = static_cast<double>(paths);
  for (std::size_t j = 0; j < u_grid.size(); ++j) {
    auto& row = est.rows[j];
    row.u = u_grid[j];
    row.psi_hat = paths ? static_cast<double>(row.ruined) / n : 0.0;
    row.se = paths ? std::sqrt(row.psi_hat * (1 - row.psi_hat) / n) : 0.0;
    row.slack = paths ? slack_sum[j] / n : 0.0;
  }
  return est;
}

}  // namespace ruinlab
