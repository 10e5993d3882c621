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
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "ruinlab/affine.hpp"
#include "ruinlab/cumulant.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/parallel.hpp"
#include "ruinlab/paths.hpp"
#include "ruinlab/perpetuity.hpp"

namespace ruinlab {

/// Diffusion, infinite activity, two-sided jumps or claims unbounded below:
/// any of these alone gives the power-law regime.
struct GeneralConditions {
  bool holds = false;
  /// "sigma2_positive", "infinite_activity", "two_sided_jumps",
  /// "claims_unbounded_below" or "none".
  std::string branch = "none";
};

inline GeneralConditions check_general_conditions(const Model& m) {
  const auto& p = m.price;
  if (p.sigma2() > 0) return {true, "sigma2_positive"};
  if (p.infinite_activity()) return {true, "infinite_activity"};
  if (p.jumps().charges_negative() && p.jumps().charges_positive()) return {true, "two_sided_jumps"};
  if (m.business.claims().lower() == -kInf) return {true, "claims_unbounded_below"};
  return {};
}

/// One-sided jumps combined with an interarrival (or claim) support that
/// reaches 0 or infinity.
struct EndpointConditions {
  bool applicable = false;
  bool holds = false;
  std::string clause;
};

inline EndpointConditions check_endpoint_conditions(const Model& m) {
  EndpointConditions r;
  r.applicable = m.price.jumps().active() || m.price.infinite_activity();
  if (!r.applicable) return r;
  const auto& b = m.business;
  const double f_lo = b.interarrival().lower();
  const double f_hi = b.interarrival().upper();
  switch (classify_variant(b)) {
    case Variant::NonLife:
      r.clause = "interarrival_lower_is_zero";
      r.holds = f_lo == 0;
      break;
    case Variant::Annuity:
      r.clause = "interarrival_upper_is_infinite";
      r.holds = f_hi == kInf;
      break;
    case Variant::Mixed:
      if (b.c() < 0) {
        r.clause = "claims_or_interarrival_upper_is_infinite";
        r.holds = abs_upper(b.claims()) == kInf || f_hi == kInf;
      } else {
        r.clause = "positive_claims_lower_is_zero";
        r.holds = positive_part_lower(b.claims()) == 0;
      }
      break;
  }
  return r;
}

/// A strict inequality lhs > rhs ("greater") or lhs < rhs ("less") between
/// support bounds and the premium flow accumulated over one interarrival.
struct Hypothesis {
  bool applicable = false;
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  double margin = std::numeric_limits<double>::quiet_NaN();
  bool holds = false;
  std::string relation;
  std::string reason;
};

enum class HypothesisId { H1, H2, H3, H4, MixedA, MixedB, MixedC, MixedD };

inline const char* to_string(HypothesisId id) {
  switch (id) {
    case HypothesisId::H1: return "h1";
    case HypothesisId::H2: return "h2";
    case HypothesisId::H3: return "h3";
    case HypothesisId::H4: return "h4";
    case HypothesisId::MixedA: return "mixed_a";
    case HypothesisId::MixedB: return "mixed_b";
    case HypothesisId::MixedC: return "mixed_c";
    case HypothesisId::MixedD: return "mixed_d";
  }
  return "?";
}

inline constexpr HypothesisId kAllHypotheses[] = {
    HypothesisId::H1,     HypothesisId::H2,     HypothesisId::H3,     HypothesisId::H4,
    HypothesisId::MixedA, HypothesisId::MixedB, HypothesisId::MixedC, HypothesisId::MixedD};

struct HypothesisSet {
  Hypothesis h[8];
  std::optional<HypothesisId> active;
  /// Drift rate λ or κ used for the active hypothesis.
  double rate = 0;
  bool rate_is_lambda = false;
  /// Interarrival bound used: F̲ for c ≥ 0, F̄ for c < 0.
  double interarrival_bound = 0;

  Hypothesis& operator[](HypothesisId id) { return h[static_cast<int>(id)]; }
  const Hypothesis& operator[](HypothesisId id) const { return h[static_cast<int>(id)]; }
};

/// Evaluates whichever of the eight one-sided hypotheses matches the model
/// (variant × jump side). Premium terms use |c|, so for c < 0 the right-hand
/// sides are positive payment volumes.
inline HypothesisSet check_h_conditions(const Model& m) {
  HypothesisSet set;
  for (auto& h : set.h) h.reason = "variant or jump side does not match";

  auto fail_all = [&](const std::string& why) {
    for (auto& h : set.h) h.reason = why;
    return set;
  };
  if (m.price.sigma2() > 0 || m.price.infinite_activity()) return fail_all("not a finite-variation pure-jump logprice");
  if (m.business.claims().lower() == -kInf) return fail_all("claims unbounded below");
  OneSidedDrift drift;
  try {
    drift = lambda_kappa(m.price);
  } catch (const AssumptionError& e) {
    return fail_all(e.what());
  }
  if (std::holds_alternative<NotOneSided>(drift)) return fail_all("jumps are not one-sided");

  const bool is_lambda = std::holds_alternative<Lambda>(drift);
  const double rate = is_lambda ? std::get<Lambda>(drift).value : std::get<Kappa>(drift).value;
  const auto& b = m.business;
  const double c = b.c();
  const double f_lo = b.interarrival().lower();
  const double f_hi = b.interarrival().upper();
  const Variant variant = classify_variant(b);
  set.rate = rate;
  set.rate_is_lambda = is_lambda;

  // Premium volume over an interarrival of length t, discounted along the
  // extreme logprice path.
  auto premium = [&](double t) {
    return is_lambda ? (std::abs(c) / rate) * -std::expm1(-rate * t)
                     : (std::abs(c) / rate) * std::expm1(rate * t);
  };

  HypothesisId id;
  double lhs;
  bool greater;
  double bound;
  if (c >= 0) {
    id = variant == Variant::Mixed ? (is_lambda ? HypothesisId::MixedA : HypothesisId::MixedB)
                                   : (is_lambda ? HypothesisId::H1 : HypothesisId::H2);
    lhs = variant == Variant::Mixed ? negative_part_upper_abs(b.claims()) : abs_upper(b.claims());
    greater = true;
    bound = f_lo;
    if (!(f_lo > 0)) {
      set[id].reason = "requires interarrival lower bound > 0";
      return set;
    }
  } else {
    id = variant == Variant::Mixed ? (is_lambda ? HypothesisId::MixedC : HypothesisId::MixedD)
                                   : (is_lambda ? HypothesisId::H3 : HypothesisId::H4);
    lhs = variant == Variant::Mixed ? positive_part_lower(b.claims()) : b.claims().lower();
    greater = false;
    bound = f_hi;
    if (!(f_hi < kInf)) {
      set[id].reason = "requires interarrival upper bound < inf";
      return set;
    }
  }
  Hypothesis& h = set[id];
  h.applicable = true;
  h.reason.clear();
  h.lhs = lhs;
  h.rhs = premium(bound);
  h.margin = h.lhs - h.rhs;
  h.relation = greater ? ">" : "<";
  h.holds = greater ? (h.lhs > h.rhs) : (h.lhs < h.rhs);
  set.active = id;
  set.interarrival_bound = bound;
  return set;
}

struct BlockSize {
  std::int64_t k = 1;
  bool heuristic = false;
  /// The lower bound k must strictly exceed (NaN when no hypothesis applies).
  double bound = std::numeric_limits<double>::quiet_NaN();
  bool from_hypothesis = false;
};

inline std::int64_t smallest_integer_above(double x) {
  return static_cast<std::int64_t>(std::floor(x)) + 1;
}

/// Smallest block size for which the active hypothesis guarantees both
/// non-null sets. Where only "k large enough" is known, the heuristic
/// max(⌈2/(rate·F̄)⌉ + 1, floor) is used and flagged.
inline BlockSize min_block_size(const HypothesisSet& set, std::int64_t heuristic_floor = 8) {
  BlockSize r;
  if (!set.active) return r;
  r.from_hypothesis = true;
  const double rf = set.rate * set.interarrival_bound;
  switch (*set.active) {
    case HypothesisId::H1:
    case HypothesisId::H2:
    case HypothesisId::MixedA:
    case HypothesisId::MixedB:
      r.bound = 1.0 / rf;
      r.k = smallest_integer_above(r.bound);
      break;
    case HypothesisId::H3:
      r.bound = 2.0 / rf;
      r.k = smallest_integer_above(r.bound);
      break;
    case HypothesisId::H4:
    case HypothesisId::MixedC:
    case HypothesisId::MixedD:
      r.bound = 2.0 / rf;
      r.k = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(r.bound)) + 1, heuristic_floor);
      r.heuristic = true;
      break;
  }
  return r;
}

inline BlockSize min_block_size(const Model& m, std::int64_t heuristic_floor = 8) {
  return min_block_size(check_h_conditions(m), heuristic_floor);
}

struct ProportionCi {
  double lo = 0;
  double hi = 1;
};

/// Exact (Clopper–Pearson) two-sided interval for a binomial proportion.
inline ProportionCi clopper_pearson(std::uint64_t hits, std::uint64_t n, double alpha = 0.05) {
  ProportionCi ci;
  if (n == 0) return ci;
  const double k = static_cast<double>(hits);
  const double dn = static_cast<double>(n);
  if (hits > 0) ci.lo = boost::math::quantile(boost::math::beta_distribution<double>(k, dn - k + 1), alpha / 2);
  if (hits < n) ci.hi = boost::math::quantile(boost::math::beta_distribution<double>(k + 1, dn - k), 1 - alpha / 2);
  return ci;
}

struct NonNullReport {
  std::uint64_t n = 0;
  int k = 1;
  std::uint64_t hits_up = 0;
  std::uint64_t hits_down = 0;
  double p_up = 0;
  double p_down = 0;
  ProportionCi ci_up;
  ProportionCi ci_down;
  std::uint64_t saturations = 0;
  /// At least `min_hits` hits in each set.
  bool certified = false;
  /// Affine-map certificate built from the first witness of each set.
  std::optional<AffineMap> witness_up;
  std::optional<AffineMap> witness_down;
  SupportCertificate support;
};

inline constexpr std::uint64_t kNonNullMinHits = 10;

/// Frequencies of {M > 1, Q > 0} and {M < 1, Q > 0} over n block pairs.
template <class PairSampler>
NonNullReport estimate_nonnull_sets(const PairSampler& pairs, int k, std::uint64_t n,
                                    std::uint64_t seed, unsigned threads) {
  const auto draws = parallel_map<PerpetuitySample>(n, threads, [&](std::size_t i) {
    Xoshiro256 rng = make_stream(seed, StreamTag::kNonNull, i);
    return pairs(rng);
  });
  NonNullReport r;
  r.n = n;
  r.k = k;
  for (const auto& d : draws) {
    r.saturations += d.saturations;
    if (!(d.q > 0)) continue;
    if (d.m > 1) {
      ++r.hits_up;
      if (!r.witness_up) r.witness_up = AffineMap{d.m, d.q};
    } else if (d.m < 1) {
      ++r.hits_down;
      if (!r.witness_down) r.witness_down = AffineMap{d.m, d.q};
    }
  }
  r.p_up = n ? static_cast<double>(r.hits_up) / static_cast<double>(n) : 0.0;
  r.p_down = n ? static_cast<double>(r.hits_down) / static_cast<double>(n) : 0.0;
  r.ci_up = clopper_pearson(r.hits_up, n);
  r.ci_down = clopper_pearson(r.hits_down, n);
  r.certified = r.hits_up >= kNonNullMinHits && r.hits_down >= kNonNullMinHits;
  if (r.witness_up && r.witness_down) {
    r.support = support_unbounded_certificate(*r.witness_down, *r.witness_up);
  }
  return r;
}

inline NonNullReport estimate_nonnull_sets(const Model& m, int k, std::uint64_t n, std::uint64_t seed,
                                           unsigned threads, const PathOptions& opt = {}) {
  return estimate_nonnull_sets(ModelPairSampler{&m, k, opt}, k, n, seed, threads);
}

struct PredictedRegime {
  bool power_law = false;
  double beta = 0;
  /// Which condition fired: "general", "support_endpoint", a hypothesis
  /// name, or empty when undetermined.
  std::string via;
};

struct ConditionReport {
  Variant variant;
  BetaResult beta;
  AssumptionReport assumptions;
  GeneralConditions general;
  EndpointConditions endpoint;
  HypothesisSet hypotheses;
  BlockSize block;
  PredictedRegime regime;
};

/// Runs every sufficient condition and predicts the asymptotic regime. The
/// prediction is PowerLaw(β) only if β exists, the moment assumptions hold,
/// and at least one sufficient condition fires. Propagates AssumptionError
/// from find_beta.
inline ConditionReport classify_regime(const Model& m, std::int64_t heuristic_floor = 8) {
  ConditionReport r{classify_variant(m.business), find_beta(m), {}, {}, {}, {}, {}, {}};
  r.assumptions = validate_assumptions(m, r.beta.beta);
  r.general = check_general_conditions(m);
  r.endpoint = check_endpoint_conditions(m);
  r.hypotheses = check_h_conditions(m);
  r.block = min_block_size(r.hypotheses, heuristic_floor);
  std::string via;
  if (r.general.holds) via = "general";
  else if (r.endpoint.applicable && r.endpoint.holds) via = "support_endpoint";
  else if (r.hypotheses.active && r.hypotheses[*r.hypotheses.active].holds) via = to_string(*r.hypotheses.active);
  if (!via.empty() && r.assumptions.ok) {
    r.regime = {true, r.beta.beta, via};
  }
  return r;
}

}  // namespace ruinlab
