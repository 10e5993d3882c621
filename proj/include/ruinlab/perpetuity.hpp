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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ruinlab/error.hpp"
#include "ruinlab/parallel.hpp"
#include "ruinlab/paths.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {

struct YDraw {
  double value = 0;
  std::size_t terms = 0;
  /// The term cap was hit before the weight fell below the tolerance.
  bool capped = false;
  std::uint64_t saturations = 0;
};

/// Forward-truncated perpetuity Σ_{m≥1} W_{m−1} Q_m with W_m = M_1⋯M_m.
/// Stops after the first m with W_m < weight_tol, or at n_terms.
template <class PairSampler, class Rng>
YDraw sample_y(const PairSampler& pairs, std::size_t n_terms, double weight_tol, Rng& rng) {
  if (n_terms < 1) throw ValidationError("n_terms must be >= 1");
  if (!(weight_tol > 0)) throw ValidationError("weight_tol must be > 0");
  YDraw d;
  double w = 1.0;
  double y = 0.0;
  for (std::size_t m = 1; m <= n_terms; ++m) {
    const PerpetuitySample s = pairs(rng);
    d.saturations += s.saturations;
    y += w * s.q;
    w *= s.m;
    d.terms = m;
    if (w < weight_tol) break;
    if (m == n_terms) d.capped = true;
  }
  d.value = clamp_finite(y, d.saturations);
  return d;
}

/// Block-pair sampler of a model: (M^k, Q^k) from simulate_block.
struct ModelPairSampler {
  const Model* model;
  int k = 1;
  PathOptions options;

  PerpetuitySample operator()(Xoshiro256& rng) const {
    return simulate_block(*model, k, rng, options);
  }
};

/// Constant pair, for closed-form checks.
struct ConstantPairSampler {
  double m;
  double q;
  PerpetuitySample operator()(Xoshiro256&) const { return {m, q, 1, 0}; }
};

struct YSampleSet {
  std::vector<double> values;
  std::uint64_t capped = 0;
  std::uint64_t saturations = 0;
  std::uint64_t total_terms = 0;
};

/// n independent perpetuity draws; replicate i uses stream (seed, tag, i).
template <class PairSampler>
YSampleSet sample_y_many(const PairSampler& pairs, std::size_t n, std::size_t n_terms,
                         double weight_tol, std::uint64_t seed, unsigned threads,
                         StreamTag tag = StreamTag::kPerpetuity) {
  auto draws = parallel_map<YDraw>(n, threads, [&](std::size_t i) {
    Xoshiro256 rng = make_stream(seed, tag, i);
    return sample_y(pairs, n_terms, weight_tol, rng);
  });
  YSampleSet out;
  out.values.reserve(n);
  for (const auto& d : draws) {
    out.values.push_back(d.value);
    out.capped += d.capped ? 1 : 0;
    out.saturations += d.saturations;
    out.total_terms += d.terms;
  }
  return out;
}

/// Right-continuous empirical survival function Ḡ(u) = #{x > u}/N.
class EmpiricalSurvival {
 public:
  explicit EmpiricalSurvival(std::vector<double> samples) : sorted_(std::move(samples)) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }

  double operator()(double u) const {
    if (sorted_.empty()) return 0.0;
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), u);
    return static_cast<double>(sorted_.end() - it) / static_cast<double>(sorted_.size());
  }

  /// Binomial standard error of Ḡ(u).
  double se(double u) const {
    const double g = (*this)(u);
    return std::sqrt(g * (1 - g) / static_cast<double>(sorted_.size()));
  }

  double quantile(double p) const {
    const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(sorted_.size() - 1)));
    return sorted_[std::min(idx, sorted_.size() - 1)];
  }

 private:
  std::vector<double> sorted_;
};

struct SurvivalRow {
  double u;
  double survival;
  double se;
};

struct HillEstimate {
  double fraction = 0;
  std::size_t k = 0;
  double index = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  bool reliable = false;
};

struct LogLogSlope {
  double slope = 0;
  double se = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  double u_lo = 0;
  double u_hi = 0;
  std::size_t points = 0;
  bool valid = false;
};

struct TailOptions {
  double hill_fraction = 0.01;
  std::vector<double> hill_sensitivity{0.005, 0.01, 0.02};
  double window_lo = 0.90;
  double window_hi = 0.999;
  std::size_t window_points = 50;
  std::size_t min_samples = 10000;
};

struct TailEstimate {
  EmpiricalSurvival survival;
  std::vector<SurvivalRow> grid;
  HillEstimate hill;
  std::vector<HillEstimate> hill_sweep;
  LogLogSlope loglog;

  std::size_t samples() const noexcept { return survival.size(); }
};

/// Hill estimator on the k = ⌊fraction·N⌋ largest order statistics.
inline HillEstimate hill_estimate(const EmpiricalSurvival& s, double fraction) {
  HillEstimate h;
  h.fraction = fraction;
  const auto& x = s.sorted();
  const std::size_t n = x.size();
  h.k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (h.k < 1 || h.k >= n) return h;
  const double threshold = x[n - 1 - h.k];
  if (!(threshold > 0)) return h;
  double sum = 0;
  for (std::size_t i = 0; i < h.k; ++i) sum += std::log(x[n - 1 - i] / threshold);
  const double mean_log = sum / static_cast<double>(h.k);
  h.index = 1.0 / mean_log;
  const double rel = 1.96 / std::sqrt(static_cast<double>(h.k));
  h.ci_lo = h.index * (1 - rel);
  h.ci_hi = h.index * (1 + rel);
  h.reliable = h.k >= 50;
  return h;
}

/// Log-spaced points in [q(lo), q(hi)], the central window of the tail fit.
inline std::vector<double> tail_window(const EmpiricalSurvival& s, double lo, double hi,
                                       std::size_t points) {
  const double a = s.quantile(lo);
  const double b = s.quantile(hi);
  std::vector<double> u;
  if (!(a > 0) || !(b > a) || points < 2) return u;
  const double la = std::log(a);
  const double lb = std::log(b);
  for (std::size_t i = 0; i < points; ++i) {
    u.push_back(std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(points - 1)));
  }
  return u;
}

/// OLS slope of ln Ḡ(u) against ln u over the quantile window.
inline LogLogSlope loglog_slope(const EmpiricalSurvival& s, double lo, double hi,
                                std::size_t points) {
  LogLogSlope r;
  const auto u = tail_window(s, lo, hi, points);
  if (u.empty()) return r;
  std::vector<double> xs, ys;
  for (double v : u) {
    const double g = s(v);
    if (g <= 0) continue;
    xs.push_back(std::log(v));
    ys.push_back(std::log(g));
  }
  const std::size_t n = xs.size();
  if (n < 3) return r;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  r.slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - my - r.slope * (xs[i] - mx);
    rss += e * e;
  }
  r.se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  r.ci_lo = r.slope - 1.96 * r.se;
  r.ci_hi = r.slope + 1.96 * r.se;
  r.u_lo = u.front();
  r.u_hi = u.back();
  r.points = n;
  r.valid = true;
  return r;
}

/// max/min of u^β·Ḡ(u) over the quantile window; a bounded ratio is the
/// finite-sample shadow of 0 < liminf ≤ limsup < ∞. Returns +inf when the
/// window is empty or Ḡ vanishes on it.
inline double flatness_ratio(const EmpiricalSurvival& s, double beta, double lo, double hi,
                             std::size_t points) {
  const auto u = tail_window(s, lo, hi, points);
  if (u.empty()) return kInf;
  double mn = kInf, mx = 0;
  for (double v : u) {
    const double w = std::pow(v, beta) * s(v);
    mn = std::min(mn, w);
    mx = std::max(mx, w);
  }
  return mn > 0 ? mx / mn : kInf;
}

inline TailEstimate tail_estimate(std::vector<double> samples, const std::vector<double>& grid,
                                  const TailOptions& opt = {}) {
  if (samples.size() < opt.min_samples) {
    throw ValidationError("tail estimation needs at least " + std::to_string(opt.min_samples) +
                          " samples, got " + std::to_string(samples.size()));
  }
  TailEstimate t{EmpiricalSurvival(std::move(samples)), {}, {}, {}, {}};
  for (double u : grid) t.grid.push_back({u, t.survival(u), t.survival.se(u)});
  t.hill = hill_estimate(t.survival, opt.hill_fraction);
  for (double f : opt.hill_sensitivity) t.hill_sweep.push_back(hill_estimate(t.survival, f));
  t.loglog = loglog_slope(t.survival, opt.window_lo, opt.window_hi, opt.window_points);
  return t;
}

struct RuinBounds {
  double lower;
  double upper;
  double lower_se;
  double upper_se;
};

/// Ḡ(u) ≤ Ψ(u) ≤ Ḡ(u)/Ḡ(0), with the upper bound clipped to 1.
inline RuinBounds ruin_bounds(const EmpiricalSurvival& s, double u) {
  const double g0 = s(0.0);
  if (!(g0 > 0)) throw ValidationError("upper bound undefined: no mass above 0");
  const double n = static_cast<double>(s.size());
  RuinBounds b;
  b.lower = s(u);
  b.lower_se = s.se(u);
  const double ratio = b.lower / g0;
  if (ratio >= 1) {
    b.upper = 1.0;
    b.upper_se = 0.0;
  } else {
    // For u > 0, Ḡ(u)/Ḡ(0) is the conditional frequency P(Y > u | Y > 0).
    b.upper = ratio;
    b.upper_se = std::sqrt(ratio * (1 - ratio) / (n * g0));
  }
  return b;
}

inline RuinBounds ruin_bounds(const TailEstimate& t, double u) { return ruin_bounds(t.survival, u); }

struct MeanEstimate {
  double mean = 0;
  double se = 0;
};

inline MeanEstimate mean_and_se(const std::vector<double>& v, std::size_t n) {
  MeanEstimate e;
  if (n == 0) return e;
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += v[i];
  e.mean = s / static_cast<double>(n);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) ss += (v[i] - e.mean) * (v[i] - e.mean);
  e.se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return e;
}

struct GoldieReport {
  MeanEstimate m_beta;
  MeanEstimate m_beta_log_m_plus;
  MeanEstimate q_beta;
  MeanEstimate m_beta_log_m_plus_doubled;
  MeanEstimate q_beta_doubled;
  bool em_one = false;
  bool stable = false;
  /// All sampled M were equal: the check cannot distinguish anything.
  bool degenerate_m = false;
  bool all_finite_and_em1 = false;
  std::uint64_t saturations = 0;
};

namespace detail {
inline bool stable_pair(double a, double b) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) < 0.1 * scale;
}
}  // namespace detail

/// Monte Carlo check of E[M^β] = 1, E[M^β (ln M)^+] < ∞ and E|Q|^β < ∞. The
/// finiteness of the last two is judged by stability between n and 2n draws.
template <class PairSampler>
GoldieReport goldie_moment_check(const PairSampler& pairs, double beta, std::size_t n,
                                 std::uint64_t seed, unsigned threads) {
  const auto draws = parallel_map<PerpetuitySample>(2 * n, threads, [&](std::size_t i) {
    Xoshiro256 rng = make_stream(seed, StreamTag::kGoldie, i);
    return pairs(rng);
  });
  std::vector<double> mb(2 * n), mbl(2 * n), qb(2 * n);
  GoldieReport r;
  r.degenerate_m = true;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const auto& d = draws[i];
    r.saturations += d.saturations;
    mb[i] = std::pow(d.m, beta);
    mbl[i] = d.m > 1 ? mb[i] * std::log(d.m) : 0.0;
    qb[i] = std::pow(std::abs(d.q), beta);
    if (d.m != draws[0].m) r.degenerate_m = false;
  }
  r.m_beta = mean_and_se(mb, n);
  r.m_beta_log_m_plus = mean_and_se(mbl, n);
  r.q_beta = mean_and_se(qb, n);
  r.m_beta_log_m_plus_doubled = mean_and_se(mbl, 2 * n);
  r.q_beta_doubled = mean_and_se(qb, 2 * n);
  r.em_one = std::abs(r.m_beta.mean - 1.0) <= 4 * r.m_beta.se && !r.degenerate_m;
  r.stable = std::isfinite(r.m_beta_log_m_plus.mean) && std::isfinite(r.q_beta.mean) &&
             detail::stable_pair(r.m_beta_log_m_plus.mean, r.m_beta_log_m_plus_doubled.mean) &&
             detail::stable_pair(r.q_beta.mean, r.q_beta_doubled.mean);
  r.all_finite_and_em1 = r.em_one && r.stable;
  return r;
}

struct KsResult {
  double statistic;
  double critical;
  bool reject;
};

/// Asymptotic two-sample Kolmogorov–Smirnov critical value at level alpha.
inline double ks_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2));
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double crit = ks_critical(alpha, a.size(), b.size());
  return {d, crit, d > crit};
}

/// Draws of Q + M·Y′ with (M, Q) and Y′ independent, one per stream
/// (seed, kPerpetuityShifted, i). Under the fixed-point law these match Y.
template <class PairSampler>
YSampleSet sample_shifted_y_many(const PairSampler& pairs, std::size_t n, std::size_t n_terms,
                                 double weight_tol, std::uint64_t seed, unsigned threads) {
  auto draws = parallel_map<YDraw>(n, threads, [&](std::size_t i) {
    Xoshiro256 rng = make_stream(seed, StreamTag::kPerpetuityShifted, i);
    const PerpetuitySample head = pairs(rng);
    YDraw d = sample_y(pairs, n_terms, weight_tol, rng);
    d.saturations += head.saturations;
    d.value = clamp_finite(head.q + clamp_finite(head.m * d.value, d.saturations), d.saturations);
    return d;
  });
  YSampleSet out;
  out.values.reserve(n);
  for (const auto& d : draws) {
    out.values.push_back(d.value);
    out.capped += d.capped ? 1 : 0;
    out.saturations += d.saturations;
    out.total_terms += d.terms;
  }
  return out;
}

}  // namespace ruinlab
