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
#include <istream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ruinlab/error.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {

inline constexpr double kMaxFinite = std::numeric_limits<double>::max();

/// ∫_0^dt e^{−(v0 + slope·s)} ds, evaluated through expm1 so that tiny
/// |slope·dt| loses no precision.
inline double integral_exp_neg_linear(double v0, double slope, double dt) {
  if (dt <= 0) return 0.0;
  const double x = slope * dt;
  const double factor = (x == 0) ? 1.0 : -std::expm1(-x) / x;
  const double direct = std::exp(-v0) * dt * factor;
  if (std::isfinite(direct) && direct > 0) return direct;
  // Large exponents: combine in log space.
  double log_factor;
  if (x == 0) log_factor = 0;
  else if (x > 0) log_factor = std::log(-std::expm1(-x) / x);
  else log_factor = -x + std::log(-std::expm1(x) / -x);
  return std::exp(-v0 + std::log(dt) + log_factor);
}

/// e^{−v}·factor, saturated at the largest finite double. `saturations`
/// counts every clamp so callers can mark results as tainted.
inline double discounted(double v, double factor, std::uint64_t& saturations) {
  const double r = std::exp(-v) * factor;
  if (std::isfinite(r)) return r;
  if (std::isnan(r)) return 0.0;  // 0·inf: factor was zero
  ++saturations;
  return r > 0 ? kMaxFinite : -kMaxFinite;
}

inline double clamp_finite(double x, std::uint64_t& saturations) {
  if (std::isfinite(x)) return x;
  ++saturations;
  return x > 0 ? kMaxFinite : -kMaxFinite;
}

enum class EventKind { Claim, PriceJump, HorizonEnd };

/// `value` is ξ for claims and ln(1 + J) for price jumps.
struct Event {
  double time;
  EventKind kind;
  double value;
};

/// Merges the renewal claim clock with the Poisson price-jump clock.
template <class Rng>
class RandomEventSource {
 public:
  RandomEventSource(const Model& m, Rng& rng) : m_(m), rng_(rng) {
    next_claim_ = draw_interarrival();
    const double rho = m_.price.jumps().intensity();
    next_jump_ = rho > 0 ? draw_jump_wait() : kInf;
  }

  Event next() {
    if (next_jump_ < next_claim_) {
      Event e{next_jump_, EventKind::PriceJump, m_.price.jumps().log_law()->sample(rng_)};
      next_jump_ += draw_jump_wait();
      return e;
    }
    Event e{next_claim_, EventKind::Claim, m_.business.claims().sample(rng_)};
    next_claim_ += draw_interarrival();
    return e;
  }

  Rng& rng() noexcept { return rng_; }

 private:
  double draw_interarrival() {
    double t;
    do { t = m_.business.interarrival().sample(rng_); } while (!(t > 0));
    return t;
  }
  double draw_jump_wait() {
    return -std::log(rng_.uniform_open()) / m_.price.jumps().intensity();
  }

  const Model& m_;
  Rng& rng_;
  double next_claim_;
  double next_jump_;
};

/// Replays a fixed event list; emits HorizonEnd once exhausted.
class InjectedEventSource {
 public:
  explicit InjectedEventSource(std::vector<Event> events) : events_(std::move(events)) {}

  Event next() {
    if (pos_ < events_.size()) return events_[pos_++];
    const double t = events_.empty() ? 0.0 : events_.back().time;
    return {t, EventKind::HorizonEnd, 0.0};
  }

 private:
  std::vector<Event> events_;
  std::size_t pos_ = 0;
};

/// Parses the plain-text event format, one event per line:
///   <time> claim <xi>
///   <time> pjump <j>        (price relative jump J > −1)
///   <time> end
/// Blank lines and lines starting with '#' are ignored. Times must be
/// strictly increasing.
inline std::vector<Event> parse_event_stream(std::istream& in) {
  std::vector<Event> out;
  std::string line;
  int lineno = 0;
  double last = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double t;
    std::string tag;
    if (!(ls >> t >> tag)) {
      throw ValidationError("event stream line " + std::to_string(lineno) + ": malformed");
    }
    if (!std::isfinite(t) || t <= last) {
      throw ValidationError("event stream line " + std::to_string(lineno) +
                            ": times must be finite and strictly increasing from 0");
    }
    last = t;
    if (tag == "end") {
      out.push_back({t, EventKind::HorizonEnd, 0.0});
      continue;
    }
    double v;
    if (!(ls >> v) || !std::isfinite(v)) {
      throw ValidationError("event stream line " + std::to_string(lineno) + ": missing value");
    }
    if (tag == "claim") {
      if (v == 0) throw ValidationError("event stream line " + std::to_string(lineno) + ": zero claim");
      out.push_back({t, EventKind::Claim, v});
    } else if (tag == "pjump") {
      if (!(v > -1)) throw ValidationError("event stream line " + std::to_string(lineno) + ": jump <= -1");
      out.push_back({t, EventKind::PriceJump, std::log1p(v)});
    } else {
      throw ValidationError("event stream line " + std::to_string(lineno) + ": unknown tag '" + tag + "'");
    }
  }
  return out;
}

struct PathOptions {
  /// Time step of the Brownian grid; unused when σ² = 0.
  double grid_step = 1e-3;
};

/// A stretch of logprice path without jumps. `rel_integral` is
/// ∫ e^{−(V_s − v0)} ds over the piece: exact when V is linear, trapezoidal on
/// the Brownian grid otherwise.
struct PathPiece {
  double t0;
  double dt;
  double v0;
  double v1;
  double rel_integral;
};

/// Advances the logprice between events, cutting stretches into grid steps
/// when there is a Brownian component. With `pathwise` false only the end
/// values are needed, so each stretch is one exact Gaussian step and
/// rel_integral is NaN.
template <class Rng>
class LogpriceWalker {
 public:
  LogpriceWalker(const PriceModel& p, const PathOptions& opt, Rng* rng, bool pathwise = true)
      : mu_(p.mu_v()), sigma_(p.sigma()), step_(opt.grid_step), rng_(rng), pathwise_(pathwise) {
    if (sigma_ > 0 && rng_ == nullptr) {
      throw ValidationError("Brownian component requires a random source");
    }
    if (sigma_ > 0 && !(step_ > 0)) throw ValidationError("grid step must be > 0");
  }

  double v() const noexcept { return v_; }
  double t() const noexcept { return t_; }
  void jump(double log_factor) noexcept { v_ += log_factor; }

  /// Moves to time `to`, calling on_piece(const PathPiece&) for each piece;
  /// stops early (returning false) when on_piece returns false.
  template <class F>
  bool advance_to(double to, F&& on_piece) {
    const double dt = to - t_;
    if (dt <= 0) return true;
    if (sigma_ == 0) {
      const double v1 = v_ + mu_ * dt;
      const PathPiece piece{t_, dt, v_, v1, integral_exp_neg_linear(0.0, mu_, dt)};
      const bool go = on_piece(piece);
      v_ = v1;
      t_ = to;
      return go;
    }
    if (!pathwise_) {
      const double v1 = v_ + mu_ * dt + sigma_ * std::sqrt(dt) * normal_(*rng_);
      const PathPiece piece{t_, dt, v_, v1, std::numeric_limits<double>::quiet_NaN()};
      const bool go = on_piece(piece);
      v_ = v1;
      t_ = to;
      return go;
    }
    const auto n = static_cast<std::size_t>(std::ceil(dt / step_));
    const double h = dt / static_cast<double>(n);
    const double sd = sigma_ * std::sqrt(h);
    for (std::size_t i = 0; i < n; ++i) {
      const double v1 = v_ + mu_ * h + sd * normal_(*rng_);
      const double t0 = t_;
      const PathPiece piece{t0, h, v_, v1, 0.5 * h * (1.0 + std::exp(-(v1 - v_)))};
      v_ = v1;
      t_ = (i + 1 == n) ? to : t0 + h;
      if (!on_piece(piece)) return false;
    }
    return true;
  }

 private:
  double mu_;
  double sigma_;
  double step_;
  Rng* rng_;
  bool pathwise_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double v_ = 0;
  double t_ = 0;
};

/// One realization of the block pair: m = e^{−(V at block end)},
/// q = −∫ e^{−V_{s−}} dP_s over the block.
struct PerpetuitySample {
  double m;
  double q;
  int k;
  std::uint64_t saturations = 0;
};

/// Block pair over the next k claims of `src`. `rng` feeds the Brownian grid
/// and may be null when σ² = 0.
template <class Source, class Rng>
PerpetuitySample simulate_block_from(const Model& model, int k, Source& src, Rng* rng,
                                     const PathOptions& opt = {}) {
  if (k < 1) throw ValidationError("block size must be >= 1");
  const double c = model.business.c();
  LogpriceWalker<Rng> walker(model.price, opt, rng, c != 0);
  PerpetuitySample out{0, 0, k, 0};
  double integral = 0;
  double claim_sum = 0;
  int claims = 0;
  while (claims < k) {
    const Event e = src.next();
    walker.advance_to(e.time, [&](const PathPiece& p) {
      if (c != 0) integral += discounted(p.v0, p.rel_integral, out.saturations);
      return true;
    });
    switch (e.kind) {
      case EventKind::Claim:
        claim_sum += discounted(walker.v(), e.value, out.saturations);
        ++claims;
        break;
      case EventKind::PriceJump:
        walker.jump(e.value);
        break;
      case EventKind::HorizonEnd:
        throw ValidationError("event stream ended before the block's last claim");
    }
  }
  out.m = discounted(walker.v(), 1.0, out.saturations);
  out.q = clamp_finite(-clamp_finite(claim_sum, out.saturations) -
                           (c == 0 ? 0.0 : c * clamp_finite(integral, out.saturations)),
                       out.saturations);
  return out;
}

template <class Rng>
PerpetuitySample simulate_block(const Model& model, int k, Rng& rng, const PathOptions& opt = {}) {
  RandomEventSource<Rng> src(model, rng);
  return simulate_block_from(model, k, src, &rng, opt);
}

/// Exact draw of V_t: μ_V t + σW_t + compound Poisson sum of ln(1 + J).
template <class Rng>
double sample_logprice(const PriceModel& p, double t, Rng& rng) {
  double v = p.mu_v() * t;
  if (p.sigma2() > 0) v += p.sigma() * std::sqrt(t) * std::normal_distribution<double>()(rng);
  if (p.jumps().active()) {
    const auto n = std::poisson_distribution<long>(p.jumps().intensity() * t)(rng);
    for (long i = 0; i < n; ++i) v += p.jumps().log_law()->sample(rng);
  }
  return v;
}

/// Exact draw of the block factor M = e^{−V_{T_k}} without building the path.
template <class Rng>
double sample_block_factor(const Model& model, int k, Rng& rng) {
  double t = 0;
  for (int i = 0; i < k; ++i) t += model.business.interarrival().sample(rng);
  return std::exp(-sample_logprice(model.price, t, rng));
}

struct RuinHorizon {
  std::size_t n_max = 1000;
  double barrier_k = 1e4;
};

enum class RuinStatus { Ruined, SurvivedToBarrier, SurvivedToHorizon };

inline const char* to_string(RuinStatus s) {
  switch (s) {
    case RuinStatus::Ruined: return "ruined";
    case RuinStatus::SurvivedToBarrier: return "barrier";
    case RuinStatus::SurvivedToHorizon: return "horizon";
  }
  return "?";
}

struct RuinOutcome {
  RuinStatus status = RuinStatus::SurvivedToHorizon;
  /// Ruin time τ when status is Ruined, otherwise the stopping time.
  double time = 0;
  std::size_t claims = 0;
  /// Reserve at the stopping claim epoch (unresolved paths only).
  double reserve = 0;
};

/// Time s at which c·∫_0^s e^{−slope r} dr first reaches −x for c < 0, x > 0;
/// +infinity if the integral never gets there.
inline double annuity_crossing_time(double x, double c, double slope) {
  const double need = x / -c;
  if (slope == 0) return need;
  const double arg = -slope * need;
  if (arg <= -1) return kInf;
  return -std::log1p(arg) / slope;
}

/// Walks the reserve X from event to event for one initial capital u.
///
/// Between events X_t = e^{V_t − V_s}(X_s + c∫_s^t e^{−(V_r − V_s)}dr). With
/// σ² = 0 the bracket is monotone, so a continuous crossing (only possible
/// for c < 0) is located in closed form; with σ² > 0 crossings are checked on
/// the Brownian grid only. Barrier and horizon are checked at claim epochs.
template <class Source, class Rng>
RuinOutcome simulate_ruin_path_from(const Model& model, double u, const RuinHorizon& hz,
                                    Source& src, Rng* rng, const PathOptions& opt = {}) {
  if (!(u > 0)) throw ValidationError("initial capital must be > 0");
  const double c = model.business.c();
  LogpriceWalker<Rng> walker(model.price, opt, rng, c != 0);
  const bool exact = model.price.sigma2() == 0;
  RuinOutcome out;
  double x = u;
  bool ruined = false;
  for (;;) {
    const Event e = src.next();
    walker.advance_to(e.time, [&](const PathPiece& p) {
      if (c == 0) {
        x *= std::exp(p.v1 - p.v0);
        return true;
      }
      if (exact && c < 0) {
        const double s = annuity_crossing_time(x, c, (p.v1 - p.v0) / p.dt);
        if (s <= p.dt) {
          ruined = true;
          out.time = p.t0 + s;
          return false;
        }
      }
      x = std::exp(p.v1 - p.v0) * (x + c * p.rel_integral);
      if (x <= 0) {
        ruined = true;
        out.time = p.t0 + p.dt;
        return false;
      }
      return true;
    });
    if (ruined) {
      out.status = RuinStatus::Ruined;
      return out;
    }
    switch (e.kind) {
      case EventKind::PriceJump:
        x *= std::exp(e.value);
        break;
      case EventKind::HorizonEnd:
        out.status = RuinStatus::SurvivedToHorizon;
        out.time = e.time;
        out.reserve = x;
        return out;
      case EventKind::Claim:
        x += e.value;
        ++out.claims;
        out.time = e.time;
        if (x <= 0) {
          out.status = RuinStatus::Ruined;
          return out;
        }
        if (x >= hz.barrier_k * u) {
          out.status = RuinStatus::SurvivedToBarrier;
          out.reserve = x;
          return out;
        }
        if (out.claims >= hz.n_max) {
          out.status = RuinStatus::SurvivedToHorizon;
          out.reserve = x;
          return out;
        }
        break;
    }
  }
}

template <class Rng>
RuinOutcome simulate_ruin_path(const Model& model, double u, const RuinHorizon& hz, Rng& rng,
                               const PathOptions& opt = {}) {
  RandomEventSource<Rng> src(model, rng);
  return simulate_ruin_path_from(model, u, hz, src, &rng, opt);
}

/// Ruin status of one path for every u of an increasing grid at once.
///
/// Uses X^u_t = e^{V_t}(u − Y_t) with Y_t = −∫_0^t e^{−V_{s−}} dP_s: ruin for
/// u happens when Y first reaches u. Between events Y is monotone when
/// σ² = 0, so checking piece endpoints is exact. The walk stops once every u
/// is resolved or n_max claims have arrived.
template <class Source, class Rng>
std::vector<RuinOutcome> simulate_ruin_grid_from(const Model& model, const std::vector<double>& u_grid,
                                                 const RuinHorizon& hz, Source& src, Rng* rng,
                                                 const PathOptions& opt, std::uint64_t& saturations) {
  const double c = model.business.c();
  LogpriceWalker<Rng> walker(model.price, opt, rng, c != 0);
  std::vector<RuinOutcome> out(u_grid.size());
  std::vector<char> open(u_grid.size(), 1);
  std::size_t n_open = u_grid.size();
  double y = 0;
  std::size_t claims = 0;

  const bool exact = model.price.sigma2() == 0;
  auto mark_ruin = [&](auto&& time_of) {
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
      if (open[i] && y >= u_grid[i]) {
        open[i] = 0;
        --n_open;
        out[i] = {RuinStatus::Ruined, time_of(u_grid[i]), claims, 0.0};
      }
    }
  };
  auto close_rest = [&](RuinStatus st, double t) {
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
      if (!open[i]) continue;
      open[i] = 0;
      out[i] = {st, t, claims, std::exp(walker.v()) * (u_grid[i] - y)};
    }
    n_open = 0;
  };

  while (n_open > 0) {
    const Event e = src.next();
    walker.advance_to(e.time, [&](const PathPiece& p) {
      if (c != 0) {
        const double y0 = y;
        y = clamp_finite(y - c * discounted(p.v0, p.rel_integral, saturations), saturations);
        if (c < 0) {
          // Y rises monotonically over the piece; with σ² = 0 the crossing
          // of each u is solved in closed form.
          mark_ruin([&](double u) {
            if (!exact) return p.t0 + p.dt;
            const double s = annuity_crossing_time((u - y0) * std::exp(p.v0), c, (p.v1 - p.v0) / p.dt);
            return p.t0 + std::min(p.dt, s);
          });
        }
      }
      return n_open > 0;
    });
    if (n_open == 0) break;
    switch (e.kind) {
      case EventKind::PriceJump:
        walker.jump(e.value);
        break;
      case EventKind::HorizonEnd:
        close_rest(RuinStatus::SurvivedToHorizon, e.time);
        break;
      case EventKind::Claim: {
        y = clamp_finite(y - discounted(walker.v(), e.value, saturations), saturations);
        ++claims;
        mark_ruin([&](double) { return e.time; });
        const double growth = std::exp(walker.v());
        for (std::size_t i = 0; i < u_grid.size(); ++i) {
          if (open[i] && growth * (u_grid[i] - y) >= hz.barrier_k * u_grid[i]) {
            open[i] = 0;
            --n_open;
            out[i] = {RuinStatus::SurvivedToBarrier, e.time, claims, growth * (u_grid[i] - y)};
          }
        }
        if (n_open > 0 && claims >= hz.n_max) close_rest(RuinStatus::SurvivedToHorizon, e.time);
        break;
      }
    }
  }
  return out;
}

template <class Rng>
std::vector<RuinOutcome> simulate_ruin_grid(const Model& model, const std::vector<double>& u_grid,
                                            const RuinHorizon& hz, Rng& rng, const PathOptions& opt,
                                            std::uint64_t& saturations) {
  RandomEventSource<Rng> src(model, rng);
  return simulate_ruin_grid_from(model, u_grid, hz, src, &rng, opt, saturations);
}

}  // namespace ruinlab
