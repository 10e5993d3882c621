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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ruinlab/ruinlab.hpp"

namespace ruinlab {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
    pass = pass && ok;
  }
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

ExperimentConfig load(const std::string& name) {
  return parse_config(std::string(RUINLAB_CONFIG_DIR) + "/" + name + ".json");
}

std::vector<std::string> shipped_configs() {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(RUINLAB_CONFIG_DIR)) {
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

YSampleSet y_draws(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed) {
  return sample_y_many(ModelPairSampler{&cfg.model, 1, path_options(cfg.run)}, n, cfg.run.max_terms,
                       cfg.run.weight_tol, seed, 1);
}

Outcome beta_benchmark(const std::string& config, double expected) {
  Outcome o;
  const auto cfg = load(config);
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = find_beta(cfg.model);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(std::abs(b.beta - expected) <= 1e-8, config + " beta=" + num(b.beta));
  o.require(secs < 1.0, "solve " + num(secs) + " s");
  return o;
}

Outcome goldie() {
  Outcome o;
  for (const char* name : {"bs_nonlife", "jump_nonlife"}) {
    const auto cfg = load(name);
    const double beta = find_beta(cfg.model).beta;
    const auto r = goldie_moment_check(ModelPairSampler{&cfg.model, 1, path_options(cfg.run)}, beta, 1000000,
                                       *cfg.run.seed, 1);
    o.require(std::abs(r.m_beta.mean - 1) <= 4 * r.m_beta.se,
              std::string(name) + " E[M^b]=" + num(r.m_beta.mean) + " se=" + num(r.m_beta.se));
  }
  return o;
}

Outcome fixed_point() {
  Outcome o;
  for (const auto& name : shipped_configs()) {
    const auto cfg = load(name);
    const std::size_t n = 100000;
    const auto pairs = ModelPairSampler{&cfg.model, 1, path_options(cfg.run)};
    const auto y = sample_y_many(pairs, n, cfg.run.max_terms, cfg.run.weight_tol, *cfg.run.seed, 1);
    const auto ys = sample_shifted_y_many(pairs, n, cfg.run.max_terms, cfg.run.weight_tol, *cfg.run.seed, 1);
    const auto ks = ks_two_sample(y.values, ys.values, 0.01);
    o.require(!ks.reject, name + " D=" + num(ks.statistic) + " crit=" + num(ks.critical));
  }
  return o;
}

Outcome flatness() {
  Outcome o;
  const auto cfg = load("jump_nonlife");
  const double beta = find_beta(cfg.model).beta;
  const EmpiricalSurvival s(y_draws(cfg, 1000000, *cfg.run.seed).values);
  const TailOptions opt;
  const auto fit = loglog_slope(s, opt.window_lo, opt.window_hi, opt.window_points);
  o.require(fit.valid && fit.slope >= -1.15 && fit.slope <= -0.85, "slope=" + num(fit.slope));
  const double ratio = flatness_ratio(s, beta, opt.window_lo, opt.window_hi, opt.window_points);
  o.require(ratio < 5, "max/min=" + num(ratio));
  return o;
}

Outcome sandwich() {
  Outcome o;
  for (const char* name : {"jump_nonlife", "jump_annuity"}) {
    const auto cfg = load(name);
    const std::size_t n = 100000;
    const EmpiricalSurvival tail(y_draws(cfg, n, *cfg.run.seed).values);
    const RuinHorizon hz{1000, 1e4};
    const auto est = estimate_ruin_grid(cfg.model, cfg.run.u_grid, hz, n, *cfg.run.seed, 1,
                                        path_options(cfg.run), &tail);
    int upper_bad = 0, lower_bad = 0;
    double worst_upper = -kInf, worst_lower = -kInf;
    for (const auto& r : est.rows) {
      const auto b = ruin_bounds(tail, r.u);
      const double up = r.psi_hat - b.upper - 4 * std::hypot(r.se, b.upper_se);
      const double lo = b.lower - r.psi_hat - 4 * std::hypot(r.se, b.lower_se) - r.slack;
      worst_upper = std::max(worst_upper, up);
      worst_lower = std::max(worst_lower, lo);
      upper_bad += up > 0;
      lower_bad += lo > 0;
    }
    o.require(est.rows.size() == 10 && upper_bad == 0 && lower_bad == 0,
              std::string(name) + " upper_excess=" + num(worst_upper) + " lower_excess=" + num(worst_lower));
  }
  return o;
}

Outcome nonnull() {
  Outcome o;
  for (const char* name : {"h1_nonlife", "h4_annuity"}) {
    const auto cfg = load(name);
    const auto hs = check_h_conditions(cfg.model);
    const bool holds = hs.active && hs[*hs.active].holds;
    const auto bs = min_block_size(hs, cfg.run.block_floor);
    const auto r = estimate_nonnull_sets(cfg.model, static_cast<int>(bs.k), 1000000, *cfg.run.seed, 1,
                                         path_options(cfg.run));
    o.require(holds && r.hits_up >= kNonNullMinHits && r.hits_down >= kNonNullMinHits,
              std::string(name) + " k=" + std::to_string(bs.k) + " up=" + std::to_string(r.hits_up) +
                  " down=" + std::to_string(r.hits_down));
  }
  return o;
}

Outcome exactness() {
  Outcome o;
  Xoshiro256 rng(2);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double v0 = -5 + 10 * rng.uniform_open();
    const double slope = -3 + 6 * rng.uniform_open();
    const double dt = 4 * rng.uniform_open();
    const double ref = testing::gk_oracle(v0, slope, dt);
    worst = std::max(worst, std::abs(integral_exp_neg_linear(v0, slope, dt) - ref) / ref);
  }
  o.require(worst <= 1e-9, "integral rel=" + num(worst));

  worst = 0;
  const Model models[] = {testing::lambda_one(1.0), testing::jump_nonlife(), testing::jump_annuity(),
                          testing::h4_annuity()};
  for (const auto& m : models) {
    for (std::uint64_t seed : {1u, 2u}) {
      const auto ev = testing::random_stream(m, seed, 3);
      InjectedEventSource src(ev);
      const auto s = simulate_block_from<InjectedEventSource, Xoshiro256>(m, 3, src, nullptr);
      const double ref = testing::riemann_q(m, ev, 3, 1e-6);
      worst = std::max(worst, std::abs(s.q - ref) / std::abs(ref));
    }
  }
  o.require(worst <= 1e-6, "block Q rel=" + num(worst));

  InjectedEventSource src({{5.0, EventKind::Claim, 1.0}});
  const auto r = simulate_ruin_path_from<InjectedEventSource, Xoshiro256>(testing::crossing_model(), 1.0, {},
                                                                          src, nullptr);
  const double err = std::abs(r.time - testing::euler_crossing_time(1e-6));
  o.require(r.status == RuinStatus::Ruined && std::abs(r.time - std::log(2.0)) < 1e-12 && err <= 1e-5,
            "crossing abs=" + num(err));
  return o;
}

Outcome affine() {
  Outcome o;
  const AffineMap h{2, 1}, g{0.5, 3};
  bool comp = affine_compose(h, g) == AffineMap{1, 7};
  for (double x : {-3.0, 0.0, 1.5}) comp = comp && (h * g)(x) == h(g(x));
  o.require(comp, "composition");
  const AffineMap a{0.5, 0.25}, b{2, -1}, c{-1, 4};
  o.require((a * b) * c == a * (b * c), "associativity");
  bool fixed = affine_fixed_point({0.5, 1}) == 2.0 && affine_fixed_point({2, -1}) == 1.0;
  for (const AffineMap m : {a, b, c}) fixed = fixed && m(affine_fixed_point(m)) == affine_fixed_point(m);
  o.require(fixed, "fixed point");
  const auto c1 = support_unbounded_certificate({0.5, 1}, {2, -1});
  const bool certs = c1.certified && c1.from == 2.0 &&
                     support_unbounded_certificate({0.5, 1}, {2, 3}).certified &&
                     !support_unbounded_certificate({0.5, 1}, {2, -10}).certified;
  o.require(certs, "certificate examples");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("ruinlab_acceptance_" + std::to_string(::getpid()));
  for (const auto& name : shipped_configs()) {
    std::map<std::string, std::string> first;
    bool same = true;
    for (int threads : {1, 4, 8}) {
      const fs::path out = root / (name + "_" + std::to_string(threads));
      fs::remove_all(out);
      const std::string cmd = std::string(RUINLAB_CLI) + " report --config " + RUINLAB_CONFIG_DIR + "/" + name +
                              ".json --out " + out.string() + " --replicates 10000 --threads " +
                              std::to_string(threads) + " >/dev/null 2>&1";
      const int st = std::system(cmd.c_str());
      if (!WIFEXITED(st) || WEXITSTATUS(st) != 0) {
        same = false;
        break;
      }
      std::map<std::string, std::string> files;
      for (const auto& e : fs::directory_iterator(out)) files[e.path().filename().string()] = slurp(e.path());
      if (first.empty()) {
        first = std::move(files);
      } else {
        same = same && files == first;
      }
    }
    o.require(same && first.size() >= 11, name);
  }
  fs::remove_all(root);
  return o;
}

}  // namespace
}  // namespace ruinlab

int main() {
  using ruinlab::Outcome;
  struct Criterion {
    std::string title;
    std::function<Outcome()> run;
    double limit_secs;
  };
  const std::vector<Criterion> criteria = {
      {"analytic beta benchmark", [] { return ruinlab::beta_benchmark("bs_nonlife", 2.0); }, 1},
      {"jump beta benchmark", [] { return ruinlab::beta_benchmark("jump_nonlife", 1.0); }, 1},
      {"moment identity E[M^beta] = 1", ruinlab::goldie, 60},
      {"fixed-point KS", ruinlab::fixed_point, 120},
      {"power-tail flatness", ruinlab::flatness, 300},
      {"ruin sandwich", ruinlab::sandwich, 600},
      {"non-null set certificate", ruinlab::nonnull, 600},
      {"exactness oracles", ruinlab::exactness, 60},
      {"affine semigroup", ruinlab::affine, 1},
      {"thread-count reproducibility", ruinlab::reproducibility, ruinlab::kInf},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= criteria[i].limit_secs) {
      o.pass = false;
      o.detail += "; over the " + ruinlab::num(criteria[i].limit_secs) + " s budget";
    }
    std::printf("%s %zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
