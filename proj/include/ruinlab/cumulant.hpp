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
#include <string>

#include "ruinlab/distribution.hpp"
#include "ruinlab/error.hpp"
#include "ruinlab/model.hpp"

namespace ruinlab {

/// κ_V(θ) = μ_V θ + σ²θ²/2 + ρ(E[(1+J)^θ] − 1), so that E[e^{θV_t}] = e^{tκ_V(θ)}.
/// Returns +infinity when the jump moment diverges.
inline double levy_exponent(const PriceModel& p, double theta) {
  if (theta == 0) return 0.0;
  double k = p.mu_v() * theta + 0.5 * p.sigma2() * theta * theta;
  if (p.jumps().active()) {
    const double m = p.jumps().log_law()->mgf(theta);
    if (!std::isfinite(m)) return kInf;
    k += p.jumps().intensity() * (m - 1.0);
  }
  return k;
}

/// E[e^{x T_1}] for an interarrival law; +infinity outside the domain.
inline double mgf_interarrival(const Distribution& d, double x) { return d.mgf(x); }

/// H(q) = ln E[e^{−q V_{T_1}}] = ln E[e^{T_1 κ_V(−q)}].
inline double cumulant_h(const Model& m, double q) {
  if (q == 0) return 0.0;
  const double k = levy_exponent(m.price, -q);
  if (!std::isfinite(k)) return kInf;
  const double mgf = mgf_interarrival(m.business.interarrival(), k);
  if (!std::isfinite(mgf)) return kInf;
  return std::log(mgf);
}

/// E[V_1] = μ_V + ρ E[ln(1 + J)]; H'(0+) = −E[T_1]·E[V_1].
inline double logprice_mean_rate(const PriceModel& p) {
  double m = p.mu_v();
  if (p.jumps().active()) m += p.jumps().intensity() * p.jumps().log_law()->mean();
  return m;
}

struct BetaResult {
  double beta = 0;
  double bracket_lo = 0;
  double bracket_hi = 0;
  double h_at_beta = 0;
  /// Supremum of q with H(q) < ∞ as far as probing found; +infinity if no
  /// divergence was seen below the probe limit.
  double domain_limit = kInf;
  int iterations = 0;
  bool multiple_roots_suspected = false;
};

struct BetaOptions {
  double residual_tol = 1e-10;
  double width_tol = 1e-12;
  double probe_limit = 1e3;
  double initial_probe = 0.5;
};

namespace detail {

/// Bisects the finiteness boundary of H between a finite point and an
/// infinite one.
inline double locate_domain_limit(const Model& m, double finite_q, double infinite_q,
                                  double width_tol) {
  while (infinite_q - finite_q > width_tol * std::max(1.0, finite_q)) {
    const double mid = 0.5 * (finite_q + infinite_q);
    if (std::isfinite(cumulant_h(m, mid))) finite_q = mid;
    else infinite_q = mid;
  }
  return infinite_q;
}

}  // namespace detail

/// Positive root β of H. H is convex with H(0) = 0, so a root exists iff
/// H'(0+) < 0 and H turns positive inside its domain.
inline BetaResult find_beta(const Model& m, const BetaOptions& opt = {}) {
  if (!(logprice_mean_rate(m.price) > 0)) {
    throw AssumptionError("no positive root of the cumulant: H'(0+) >= 0");
  }
  BetaResult r;
  double lo = 0.0;
  double hi = opt.initial_probe;
  for (;;) {
    const double h = cumulant_h(m, hi);
    if (!std::isfinite(h)) {
      r.domain_limit = detail::locate_domain_limit(m, lo, hi, opt.width_tol);
      // Largest finite probe just below the boundary.
      const double edge = lo + (r.domain_limit - lo) * (1 - 1e-9);
      const double h_edge = cumulant_h(m, edge);
      if (!(h_edge > 0)) {
        throw AssumptionError(
            "cumulant jumps to +infinity before crossing zero (domain limit " +
            std::to_string(r.domain_limit) + ")");
      }
      hi = edge;
      break;
    }
    if (h > 0) break;
    lo = hi;
    hi *= 2;
    if (hi > opt.probe_limit) {
      throw AssumptionError("no root found below probe limit q = " +
                            std::to_string(opt.probe_limit));
    }
  }
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.beta = 0.5 * (lo + hi);
  while (hi - lo > opt.width_tol) {
    const double mid = 0.5 * (lo + hi);
    const double h_mid = cumulant_h(m, mid);
    ++r.iterations;
    r.beta = mid;
    if (std::abs(h_mid) <= opt.residual_tol) break;
    if (h_mid < 0) lo = mid;
    else hi = mid;
    r.beta = 0.5 * (lo + hi);
  }
  r.h_at_beta = cumulant_h(m, r.beta);
  if (std::isinf(r.domain_limit)) {
    // The doubling stopped at `hi`; probe one step further for a finite boundary.
    const double probe = std::min(opt.probe_limit, 4 * r.bracket_hi);
    if (!std::isfinite(cumulant_h(m, probe))) {
      r.domain_limit = detail::locate_domain_limit(m, r.bracket_hi, probe, opt.width_tol);
    }
  }
  // H is convex, so H < 0 on (0, β). A sign change there means numerical
  // trouble; the smallest root is returned regardless.
  for (int i = 1; i < 64; ++i) {
    if (cumulant_h(m, r.beta * i / 64.0) >= 0) {
      r.multiple_roots_suspected = true;
      break;
    }
  }
  return r;
}

struct AssumptionReport {
  double claim_moment = 0;
  double mgf_epsilon = 0;
  double mgf_at_epsilon = 0;
  bool ok = false;
  std::string failing;
};

/// E|ξ|^β < ∞ and E[e^{εT_1}] < ∞ for some ε > 0 (ε tried as 1, 1/2, 1/4, ...).
inline AssumptionReport validate_assumptions(const Model& m, double beta) {
  AssumptionReport rep;
  rep.claim_moment = m.business.claims().abs_moment(beta);
  for (double eps = 1.0; eps >= 1e-6; eps *= 0.5) {
    const double v = mgf_interarrival(m.business.interarrival(), eps);
    if (std::isfinite(v)) {
      rep.mgf_epsilon = eps;
      rep.mgf_at_epsilon = v;
      break;
    }
  }
  const bool moment_ok = std::isfinite(rep.claim_moment);
  const bool mgf_ok = rep.mgf_epsilon > 0;
  rep.ok = moment_ok && mgf_ok;
  if (!moment_ok) rep.failing = "claim moment E|xi|^beta diverges";
  else if (!mgf_ok) rep.failing = "no exponential moment of the interarrival law";
  return rep;
}

}  // namespace ruinlab
