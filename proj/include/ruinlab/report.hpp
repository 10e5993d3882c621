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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ruinlab/conditions.hpp"
#include "ruinlab/config.hpp"
#include "ruinlab/cumulant.hpp"
#include "ruinlab/error.hpp"
#include "ruinlab/perpetuity.hpp"
#include "ruinlab/ruin.hpp"

namespace ruinlab {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitAssumption = 3 };

inline constexpr std::uint64_t kDefaultSeed = 20260101;
inline constexpr int kSchemaVersion = 1;

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicates;
  unsigned threads = 1;
};

/// --seed, then the config's run.seed, then $RUINLAB_SEED, then kDefaultSeed.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli, const RunConfig& run,
                                  const char* env_value) {
  if (cli) return *cli;
  if (run.seed) return *run.seed;
  if (env_value != nullptr && *env_value != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env_value, &end, 10);
    if (end == env_value || *end != '\0' || env_value[0] == '-') {
      throw ValidationError(std::string("RUINLAB_SEED is not a non-negative integer: ") + env_value);
    }
    return v;
  }
  return kDefaultSeed;
}

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline ojson num(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + p.string());
  f << text;
}

inline void write_json(const std::filesystem::path& p, const ojson& j) { write_text(p, j.dump(2) + "\n"); }

inline ojson to_json(const BetaResult& b) {
  return ojson{{"beta", b.beta},
               {"bracket_lo", b.bracket_lo},
               {"bracket_hi", b.bracket_hi},
               {"h_at_beta", b.h_at_beta},
               {"domain_limit", num(b.domain_limit)},
               {"domain_limit_finite", std::isfinite(b.domain_limit)},
               {"iterations", b.iterations},
               {"multiple_roots_suspected", b.multiple_roots_suspected}};
}

inline ojson to_json(const Hypothesis& h) {
  return ojson{{"applicable", h.applicable}, {"holds", h.holds},   {"lhs", num(h.lhs)},
               {"relation", h.relation},     {"rhs", num(h.rhs)},   {"margin", num(h.margin)},
               {"reason", h.reason}};
}

inline ojson to_json(const ConditionReport& r) {
  ojson hyp = ojson::object();
  for (HypothesisId id : kAllHypotheses) hyp[to_string(id)] = to_json(r.hypotheses[id]);
  return ojson{
      {"variant", to_string(r.variant)},
      {"beta", to_json(r.beta)},
      {"assumptions",
       {{"ok", r.assumptions.ok},
        {"claim_moment", num(r.assumptions.claim_moment)},
        {"mgf_epsilon", r.assumptions.mgf_epsilon},
        {"mgf_at_epsilon", num(r.assumptions.mgf_at_epsilon)},
        {"failing", r.assumptions.failing}}},
      {"general_conditions", {{"holds", r.general.holds}, {"branch", r.general.branch}}},
      {"support_endpoint_conditions",
       {{"applicable", r.endpoint.applicable}, {"holds", r.endpoint.holds}, {"clause", r.endpoint.clause}}},
      {"hypotheses", hyp},
      {"active_hypothesis", r.hypotheses.active ? ojson(to_string(*r.hypotheses.active)) : ojson(nullptr)},
      {"drift_rate", r.hypotheses.rate},
      {"drift_rate_kind", r.hypotheses.active ? (r.hypotheses.rate_is_lambda ? "lambda" : "kappa") : ""},
      {"block_size",
       {{"k", r.block.k},
        {"bound", num(r.block.bound)},
        {"heuristic", r.block.heuristic},
        {"from_hypothesis", r.block.from_hypothesis}}},
      {"predicted_regime", r.regime.power_law ? "PowerLaw" : "Undetermined"},
      {"predicted_beta", r.regime.power_law ? num(r.regime.beta) : ojson(nullptr)},
      {"regime_via", r.regime.via}};
}

inline ojson to_json(const HillEstimate& h) {
  return ojson{{"fraction", h.fraction}, {"k", h.k},           {"index", num(h.index)},
               {"ci_lo", num(h.ci_lo)},  {"ci_hi", num(h.ci_hi)}, {"reliable", h.reliable}};
}

inline ojson to_json(const MeanEstimate& m) { return ojson{{"mean", num(m.mean)}, {"se", num(m.se)}}; }

inline ojson to_json(const std::optional<AffineMap>& m) {
  if (!m) return nullptr;
  return ojson{{"a", m->a}, {"b", m->b}};
}

}  // namespace detail

/// Executes subcommands against one parsed config and writes their outputs
/// into a directory. Intermediate results are cached, so `report` computes
/// each piece once.
class Runner {
 public:
  Runner(ExperimentConfig cfg, std::filesystem::path out, const RunOverrides& ov, const char* env_seed)
      : cfg_(std::move(cfg)), out_(std::move(out)), threads_(ov.threads == 0 ? 1 : ov.threads) {
    seed_ = resolve_seed(ov.seed, cfg_.run, env_seed);
    replicates_ = ov.replicates.value_or(cfg_.run.replicates);
    if (replicates_ < 1) throw ValidationError("replicates must be >= 1");
    std::filesystem::create_directories(out_);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t replicates() const noexcept { return replicates_; }

  void beta() { detail::write_json(out_ / "beta.json", with_header(detail::to_json(beta_result()))); }

  void check() { detail::write_json(out_ / "check.json", with_header(detail::to_json(conditions()))); }

  void perpetuity() {
    const double b = beta_result().beta;
    const TailEstimate& t = tail();
    std::string csv = "u,survival,se,u_pow_beta_times_survival\n";
    for (const auto& r : t.grid) {
      csv += detail::fmt(r.u) + "," + detail::fmt(r.survival) + "," + detail::fmt(r.se) + "," +
             detail::fmt(std::pow(r.u, b) * r.survival) + "\n";
    }
    detail::write_text(out_ / "tail.csv", csv);
    std::string samples = "y\n";
    for (double y : y_samples().values) samples += detail::fmt(y) + "\n";
    detail::write_text(out_ / "y_samples.csv", samples);
    write_flatness();
    detail::write_json(out_ / "perpetuity.json", with_header(perpetuity_json()));
  }

  void ruin() {
    const auto& est = ruin_grid();
    const double b = beta_result().beta;
    std::string csv = "u,psi_hat,se,lower_bound,upper_bound,u_pow_beta_psi\n";
    for (const auto& r : est.rows) {
      const RuinBounds bd = bounds(r.u);
      csv += detail::fmt(r.u) + "," + detail::fmt(r.psi_hat) + "," + detail::fmt(r.se) + "," +
             detail::fmt(bd.lower) + "," + detail::fmt(bd.upper) + "," +
             detail::fmt(std::pow(r.u, b) * r.psi_hat) + "\n";
    }
    detail::write_text(out_ / "ruin.csv", csv);
    detail::write_json(out_ / "ruin.json", with_header(ruin_json()));
  }

  void nonnull() { detail::write_json(out_ / "nonnull.json", with_header(nonnull_json())); }

  /// Everything above plus the sandwich table and a combined summary with
  /// the taint counters.
  void report() {
    beta();
    check();
    perpetuity();
    ruin();
    nonnull();
    std::string csv =
        "u,psi_hat,se,slack,lower_bound,lower_se,upper_bound,upper_se,lower_holds,upper_holds\n";
    bool all_hold = true;
    for (const auto& r : ruin_grid().rows) {
      const RuinBounds bd = bounds(r.u);
      const bool lo_ok = r.psi_hat >= bd.lower - 4 * std::hypot(r.se, bd.lower_se) - r.slack;
      const bool hi_ok = r.psi_hat <= bd.upper + 4 * std::hypot(r.se, bd.upper_se);
      all_hold = all_hold && lo_ok && hi_ok;
      csv += detail::fmt(r.u) + "," + detail::fmt(r.psi_hat) + "," + detail::fmt(r.se) + "," +
             detail::fmt(r.slack) + "," + detail::fmt(bd.lower) + "," + detail::fmt(bd.lower_se) + "," +
             detail::fmt(bd.upper) + "," + detail::fmt(bd.upper_se) + "," + (lo_ok ? "1" : "0") + "," +
             (hi_ok ? "1" : "0") + "\n";
    }
    detail::write_text(out_ / "sandwich.csv", csv);

    const auto& ys = y_samples();
    const auto& est = ruin_grid();
    std::uint64_t barrier = 0, horizon = 0;
    for (const auto& r : est.rows) {
      barrier += r.barrier;
      horizon += r.horizon;
    }
    auto j = header();
    j["beta"] = beta_result().beta;
    j["predicted_regime"] = conditions().regime.power_law ? "PowerLaw" : "Undetermined";
    j["sandwich_holds"] = all_hold;
    j["taint"] = {{"overflow_saturations", ys.saturations + shifted().saturations + goldie().saturations +
                                               est.saturations + nonnull_report().saturations},
                  {"truncation_hits", ys.capped + shifted().capped},
                  {"barrier_exits", barrier},
                  {"horizon_exits", horizon}};
    j["files"] = {"beta.json",  "check.json",  "perpetuity.json", "tail.csv",    "flatness.csv",
                  "y_samples.csv", "ruin.json", "ruin.csv",        "nonnull.json", "sandwich.csv"};
    detail::write_json(out_ / "report.json", j);
  }

  /// Dispatches by name; throws ValidationError for an unknown subcommand.
  void dispatch(const std::string& sub) {
    if (sub == "beta") beta();
    else if (sub == "check") check();
    else if (sub == "perpetuity") perpetuity();
    else if (sub == "ruin") ruin();
    else if (sub == "nonnull") nonnull();
    else if (sub == "report") report();
    else throw ValidationError("unknown subcommand '" + sub + "'");
  }

 private:
  detail::ojson header() const {
    return detail::ojson{{"schema", kSchemaVersion},
                         {"name", cfg_.name},
                         {"seed", seed_},
                         {"replicates", replicates_}};
  }

  detail::ojson with_header(const detail::ojson& body) const {
    detail::ojson j = header();
    j.update(body);
    return j;
  }

  PathOptions path_opt() const { return path_options(cfg_.run); }

  int y_block() const { return cfg_.run.block_size_override.value_or(1); }

  ModelPairSampler y_pairs() const { return ModelPairSampler{&cfg_.model, y_block(), path_opt()}; }

  const BetaResult& beta_result() {
    if (!beta_) beta_ = find_beta(cfg_.model);
    return *beta_;
  }

  const ConditionReport& conditions() {
    if (!cond_) cond_ = classify_regime(cfg_.model, cfg_.run.block_floor);
    return *cond_;
  }

  const YSampleSet& y_samples() {
    if (!ys_) {
      ys_ = sample_y_many(y_pairs(), replicates_, cfg_.run.max_terms, cfg_.run.weight_tol, seed_, threads_,
                          StreamTag::kPerpetuity);
    }
    return *ys_;
  }

  const YSampleSet& shifted() {
    if (!shifted_) {
      shifted_ = sample_shifted_y_many(y_pairs(), replicates_, cfg_.run.max_terms, cfg_.run.weight_tol, seed_,
                                       threads_);
    }
    return *shifted_;
  }

  const GoldieReport& goldie() {
    if (!goldie_) goldie_ = goldie_moment_check(y_pairs(), beta_result().beta, replicates_, seed_, threads_);
    return *goldie_;
  }

  const TailEstimate& tail() {
    if (!tail_) {
      TailOptions opt;
      opt.hill_fraction = cfg_.run.hill_fraction;
      tail_ = tail_estimate(y_samples().values, cfg_.run.u_grid, opt);
    }
    return *tail_;
  }

  const RuinGridEstimate& ruin_grid() {
    if (!ruin_) {
      ruin_ = estimate_ruin_grid(cfg_.model, cfg_.run.u_grid, cfg_.run.horizon, replicates_, seed_, threads_,
                                 path_opt(), &tail().survival);
    }
    return *ruin_;
  }

  int nonnull_block() {
    if (cfg_.run.block_size_override) return *cfg_.run.block_size_override;
    return static_cast<int>(min_block_size(cfg_.model, cfg_.run.block_floor).k);
  }

  const NonNullReport& nonnull_report() {
    if (!nonnull_) nonnull_ = estimate_nonnull_sets(cfg_.model, nonnull_block(), replicates_, seed_, threads_, path_opt());
    return *nonnull_;
  }

  RuinBounds bounds(double u) {
    const auto& s = tail().survival;
    if (!(s(0.0) > 0)) return {s(u), 1.0, s.se(u), 0.0};
    return ruin_bounds(s, u);
  }

  void write_flatness() {
    const auto& t = tail();
    const double b = beta_result().beta;
    TailOptions opt;
    std::string csv = "u,survival,u_pow_beta_survival\n";
    for (double u : tail_window(t.survival, opt.window_lo, opt.window_hi, opt.window_points)) {
      const double s = t.survival(u);
      csv += detail::fmt(u) + "," + detail::fmt(s) + "," + detail::fmt(std::pow(u, b) * s) + "\n";
    }
    detail::write_text(out_ / "flatness.csv", csv);
  }

  detail::ojson perpetuity_json() {
    const auto& t = tail();
    const auto& ys = y_samples();
    const double b = beta_result().beta;
    TailOptions opt;
    detail::ojson sweep = detail::ojson::array();
    for (const auto& h : t.hill_sweep) sweep.push_back(detail::to_json(h));
    const KsResult ks = ks_two_sample(ys.values, shifted().values, 0.01);
    const auto& g = goldie();
    return detail::ojson{
        {"block_size", y_block()},
        {"beta", b},
        {"samples", ys.values.size()},
        {"truncation_hits", ys.capped},
        {"overflow_saturations", ys.saturations},
        {"mean_terms", static_cast<double>(ys.total_terms) / static_cast<double>(ys.values.size())},
        {"survival_at_zero", t.survival(0.0)},
        {"hill", detail::to_json(t.hill)},
        {"hill_sweep", sweep},
        {"loglog",
         {{"slope", num_or_null(t.loglog.valid, t.loglog.slope)},
          {"se", num_or_null(t.loglog.valid, t.loglog.se)},
          {"ci_lo", num_or_null(t.loglog.valid, t.loglog.ci_lo)},
          {"ci_hi", num_or_null(t.loglog.valid, t.loglog.ci_hi)},
          {"u_lo", t.loglog.u_lo},
          {"u_hi", t.loglog.u_hi},
          {"points", t.loglog.points},
          {"valid", t.loglog.valid}}},
        {"flatness_ratio", detail::num(flatness_ratio(t.survival, b, opt.window_lo, opt.window_hi,
                                                      opt.window_points))},
        {"fixed_point_ks", {{"statistic", ks.statistic}, {"critical", ks.critical}, {"reject", ks.reject}}},
        {"goldie",
         {{"m_beta", detail::to_json(g.m_beta)},
          {"m_beta_log_m_plus", detail::to_json(g.m_beta_log_m_plus)},
          {"q_beta", detail::to_json(g.q_beta)},
          {"em_one", g.em_one},
          {"stable", g.stable},
          {"degenerate_m", g.degenerate_m},
          {"all_finite_and_em1", g.all_finite_and_em1},
          {"overflow_saturations", g.saturations}}}};
  }

  detail::ojson ruin_json() {
    const auto& est = ruin_grid();
    detail::ojson rows = detail::ojson::array();
    for (const auto& r : est.rows) {
      rows.push_back({{"u", r.u},
                      {"psi_hat", r.psi_hat},
                      {"se", r.se},
                      {"ruined", r.ruined},
                      {"barrier_exits", r.barrier},
                      {"horizon_exits", r.horizon},
                      {"slack", r.slack}});
    }
    return detail::ojson{{"paths", est.paths},
                         {"n_max", cfg_.run.horizon.n_max},
                         {"barrier_K", cfg_.run.horizon.barrier_k},
                         {"overflow_saturations", est.saturations},
                         {"rows", rows}};
  }

  detail::ojson nonnull_json() {
    const auto& r = nonnull_report();
    const BlockSize bs = min_block_size(cfg_.model, cfg_.run.block_floor);
    return detail::ojson{{"k", r.k},
                         {"k_heuristic", !cfg_.run.block_size_override && bs.heuristic},
                         {"k_overridden", cfg_.run.block_size_override.has_value()},
                         {"n", r.n},
                         {"hits_m_above_one_q_positive", r.hits_up},
                         {"hits_m_below_one_q_positive", r.hits_down},
                         {"p_m_above_one_q_positive", r.p_up},
                         {"p_m_below_one_q_positive", r.p_down},
                         {"ci_m_above_one_q_positive", {r.ci_up.lo, r.ci_up.hi}},
                         {"ci_m_below_one_q_positive", {r.ci_down.lo, r.ci_down.hi}},
                         {"min_hits", kNonNullMinHits},
                         {"certified", r.certified},
                         {"witness_m_above_one", detail::to_json(r.witness_up)},
                         {"witness_m_below_one", detail::to_json(r.witness_down)},
                         {"support_unbounded", r.support.certified},
                         {"overflow_saturations", r.saturations}};
  }

  static detail::ojson num_or_null(bool ok, double x) { return ok ? detail::num(x) : detail::ojson(nullptr); }

  ExperimentConfig cfg_;
  std::filesystem::path out_;
  unsigned threads_;
  std::uint64_t seed_ = kDefaultSeed;
  std::uint64_t replicates_ = 1;
  std::optional<BetaResult> beta_;
  std::optional<ConditionReport> cond_;
  std::optional<YSampleSet> ys_;
  std::optional<YSampleSet> shifted_;
  std::optional<GoldieReport> goldie_;
  std::optional<TailEstimate> tail_;
  std::optional<RuinGridEstimate> ruin_;
  std::optional<NonNullReport> nonnull_;
};

/// Parses the config, runs one subcommand and maps failures to exit codes.
/// Diagnostics go to `err`.
inline int run(const std::string& sub, const std::string& config_path, const std::filesystem::path& out,
               const RunOverrides& ov, std::ostream& err, const char* env_seed = std::getenv("RUINLAB_SEED")) {
  try {
    Runner r(parse_config(config_path), out, ov, env_seed);
    r.dispatch(sub);
    return kExitOk;
  } catch (const AssumptionError& e) {
    err << "ruinlab: assumption failure: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const ValidationError& e) {
    err << "ruinlab: validation failure: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ruinlab: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace ruinlab
