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
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ruinlab/error.hpp"
#include "ruinlab/quadrature.hpp"

namespace ruinlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed convex hull [lower, upper] of a support; bounds are extended reals.
struct Support {
  double lower = -kInf;
  double upper = kInf;
};

/// A closed interval of the support; points are degenerate intervals.
struct Interval {
  double lo;
  double hi;
};

/// One-dimensional law with an analytically known support.
///
/// Kinds compose: `shifted` and `negated` wrap another distribution, so
/// uniform(-2, -1) and negated(uniform(1, 2)) describe the same law and report
/// the same support. Instances are immutable and cheap to copy.
class Distribution {
 public:
  struct Exponential { double rate; };
  struct Gamma { double shape; double rate; };
  struct Uniform { double lo; double hi; };
  struct Deterministic { double value; };
  struct TwoPoint { double x1; double p1; double x2; };
  struct Shifted { std::shared_ptr<const Distribution> base; double offset; };
  struct Negated { std::shared_ptr<const Distribution> base; };
  /// Law of ln(1 + B) for a base B supported in (−1, ∞).
  struct Log1p { std::shared_ptr<const Distribution> base; };
  using Kind = std::variant<Exponential, Gamma, Uniform, Deterministic, TwoPoint,
                            Shifted, Negated, Log1p>;

  static Distribution exponential(double rate) {
    require(std::isfinite(rate) && rate > 0, "exponential: rate must be finite and > 0");
    return Distribution(Exponential{rate});
  }
  static Distribution gamma(double shape, double rate) {
    require(std::isfinite(shape) && shape > 0, "gamma: shape must be finite and > 0");
    require(std::isfinite(rate) && rate > 0, "gamma: rate must be finite and > 0");
    return Distribution(Gamma{shape, rate});
  }
  static Distribution uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
            "uniform: need finite lo < hi");
    return Distribution(Uniform{lo, hi});
  }
  static Distribution deterministic(double value) {
    require(std::isfinite(value), "deterministic: value must be finite");
    return Distribution(Deterministic{value});
  }
  static Distribution two_point(double x1, double p1, double x2) {
    require(std::isfinite(x1) && std::isfinite(x2) && x1 != x2,
            "two_point: need finite, distinct x1 and x2");
    require(p1 > 0 && p1 < 1, "two_point: p1 must lie in (0, 1)");
    return Distribution(TwoPoint{x1, p1, x2});
  }
  static Distribution shifted(Distribution base, double offset) {
    require(std::isfinite(offset), "shifted: offset must be finite");
    return Distribution(
        Shifted{std::make_shared<const Distribution>(std::move(base)), offset});
  }
  static Distribution negated(Distribution base) {
    return Distribution(Negated{std::make_shared<const Distribution>(std::move(base))});
  }
  /// ln(1 + B). Discrete bases are mapped pointwise so the result stays in
  /// closed form.
  static Distribution log1p_of(const Distribution& base) {
    require(base.lower() > -1, "log1p: base support must lie in (-1, inf)");
    if (const auto* d = std::get_if<Deterministic>(&base.kind_)) {
      return deterministic(std::log1p(d->value));
    }
    if (const auto* t = std::get_if<TwoPoint>(&base.kind_)) {
      return two_point(std::log1p(t->x1), t->p1, std::log1p(t->x2));
    }
    return Distribution(Log1p{std::make_shared<const Distribution>(base)});
  }

  const Kind& kind() const noexcept { return kind_; }
  const Support& support() const noexcept { return support_; }
  double lower() const noexcept { return support_.lower; }
  double upper() const noexcept { return support_.upper; }

  /// Support as a finite union of closed intervals (sorted by lower end).
  std::vector<Interval> support_intervals() const {
    std::vector<Interval> out = std::visit(
        [](const auto& k) -> std::vector<Interval> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential> || std::is_same_v<K, Gamma>) {
            return {{0.0, kInf}};
          } else if constexpr (std::is_same_v<K, Uniform>) {
            return {{k.lo, k.hi}};
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            return {{k.value, k.value}};
          } else if constexpr (std::is_same_v<K, TwoPoint>) {
            return {{k.x1, k.x1}, {k.x2, k.x2}};
          } else if constexpr (std::is_same_v<K, Shifted>) {
            auto v = k.base->support_intervals();
            for (auto& iv : v) { iv.lo += k.offset; iv.hi += k.offset; }
            return v;
          } else if constexpr (std::is_same_v<K, Negated>) {
            auto v = k.base->support_intervals();
            for (auto& iv : v) iv = {-iv.hi, -iv.lo};
            return v;
          } else {
            auto v = k.base->support_intervals();
            for (auto& iv : v) iv = {std::log1p(iv.lo), std::log1p(iv.hi)};
            return v;
          }
        },
        kind_);
    std::sort(out.begin(), out.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return out;
  }

  /// True if P(X = x) > 0.
  bool has_atom_at(double x) const {
    return std::visit(
        [x](const auto& k) -> bool {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Deterministic>) return k.value == x;
          else if constexpr (std::is_same_v<K, TwoPoint>) return k.x1 == x || k.x2 == x;
          else if constexpr (std::is_same_v<K, Shifted>) return k.base->has_atom_at(x - k.offset);
          else if constexpr (std::is_same_v<K, Negated>) return k.base->has_atom_at(-x);
          else if constexpr (std::is_same_v<K, Log1p>) return k.base->has_atom_at(std::expm1(x));
          else return false;
        },
        kind_);
  }

  /// P(X < 0) > 0 and P(X > 0) > 0 respectively.
  bool charges_negative() const noexcept { return support_.lower < 0; }
  bool charges_positive() const noexcept { return support_.upper > 0; }

  /// True when E[f(X)] is evaluated without quadrature.
  bool is_discrete() const {
    return std::visit(
        [](const auto& k) -> bool {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Deterministic> || std::is_same_v<K, TwoPoint>) return true;
          else if constexpr (std::is_same_v<K, Shifted> || std::is_same_v<K, Negated> ||
                             std::is_same_v<K, Log1p>) return k.base->is_discrete();
          else return false;
        },
        kind_);
  }

  template <class Rng>
  double sample(Rng& rng) const {
    return std::visit(
        [&rng](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            return -std::log(rng.uniform_open()) / k.rate;
          } else if constexpr (std::is_same_v<K, Gamma>) {
            return std::gamma_distribution<double>(k.shape, 1.0 / k.rate)(rng);
          } else if constexpr (std::is_same_v<K, Uniform>) {
            return k.lo + (k.hi - k.lo) * rng.uniform_open();
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            return k.value;
          } else if constexpr (std::is_same_v<K, TwoPoint>) {
            return rng.uniform_open() < k.p1 ? k.x1 : k.x2;
          } else if constexpr (std::is_same_v<K, Shifted>) {
            return k.base->sample(rng) + k.offset;
          } else if constexpr (std::is_same_v<K, Negated>) {
            return -k.base->sample(rng);
          } else {
            return std::log1p(k.base->sample(rng));
          }
        },
        kind_);
  }

  double mean() const {
    return std::visit(
        [](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) return 1.0 / k.rate;
          else if constexpr (std::is_same_v<K, Gamma>) return k.shape / k.rate;
          else if constexpr (std::is_same_v<K, Uniform>) return 0.5 * (k.lo + k.hi);
          else if constexpr (std::is_same_v<K, Deterministic>) return k.value;
          else if constexpr (std::is_same_v<K, TwoPoint>) return k.p1 * k.x1 + (1 - k.p1) * k.x2;
          else if constexpr (std::is_same_v<K, Shifted>) return k.base->mean() + k.offset;
          else if constexpr (std::is_same_v<K, Negated>) return -k.base->mean();
          else return k.base->expect([](double x) { return std::log1p(x); });
        },
        kind_);
  }

  double variance() const {
    return std::visit(
        [](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) return 1.0 / (k.rate * k.rate);
          else if constexpr (std::is_same_v<K, Gamma>) return k.shape / (k.rate * k.rate);
          else if constexpr (std::is_same_v<K, Uniform>) return (k.hi - k.lo) * (k.hi - k.lo) / 12.0;
          else if constexpr (std::is_same_v<K, Deterministic>) return 0.0;
          else if constexpr (std::is_same_v<K, TwoPoint>) {
            const double d = k.x1 - k.x2;
            return k.p1 * (1 - k.p1) * d * d;
          } else if constexpr (std::is_same_v<K, Log1p>) {
            const double m = k.base->expect([](double x) { return std::log1p(x); });
            return k.base->expect([m](double x) {
              const double d = std::log1p(x) - m;
              return d * d;
            });
          } else return k.base->variance();
        },
        kind_);
  }

  /// E[f(X) 1{a <= X <= b}]. Discrete kinds are summed exactly; continuous
  /// kinds use adaptive quadrature restricted to the support.
  double partial_expect(const std::function<double(double)>& f, double a,
                        double b) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            const double lo = std::max(a, 0.0);
            return numeric::integrate(
                [&](double x) {
                  const double dens = k.rate * std::exp(-k.rate * x);
                  return dens == 0 ? 0.0 : f(x) * dens;
                },
                lo, b);
          } else if constexpr (std::is_same_v<K, Gamma>) {
            const double lo = std::max(a, 0.0);
            const double log_norm = k.shape * std::log(k.rate) - std::lgamma(k.shape);
            return numeric::integrate(
                [&](double x) {
                  if (x <= 0) return 0.0;
                  const double dens = std::exp(log_norm + (k.shape - 1) * std::log(x) - k.rate * x);
                  return dens == 0 ? 0.0 : f(x) * dens;
                },
                lo, b);
          } else if constexpr (std::is_same_v<K, Uniform>) {
            const double lo = std::max(a, k.lo);
            const double hi = std::min(b, k.hi);
            return numeric::integrate(f, lo, hi) / (k.hi - k.lo);
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            return (k.value >= a && k.value <= b) ? f(k.value) : 0.0;
          } else if constexpr (std::is_same_v<K, TwoPoint>) {
            double s = 0;
            if (k.x1 >= a && k.x1 <= b) s += k.p1 * f(k.x1);
            if (k.x2 >= a && k.x2 <= b) s += (1 - k.p1) * f(k.x2);
            return s;
          } else if constexpr (std::is_same_v<K, Shifted>) {
            const double o = k.offset;
            return k.base->partial_expect([&](double x) { return f(x + o); }, a - o, b - o);
          } else if constexpr (std::is_same_v<K, Negated>) {
            return k.base->partial_expect([&](double x) { return f(-x); }, -b, -a);
          } else {
            return k.base->partial_expect([&](double x) { return f(std::log1p(x)); },
                                          std::expm1(a), std::expm1(b));
          }
        },
        kind_);
  }

  double expect(const std::function<double(double)>& f) const {
    return partial_expect(f, -kInf, kInf);
  }

  /// E[|X|^p] for p >= 0; closed form where available.
  double abs_moment(double p) const {
    if (p == 0) return 1.0;
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            return std::exp(std::lgamma(p + 1) - p * std::log(k.rate));
          } else if constexpr (std::is_same_v<K, Gamma>) {
            return std::exp(std::lgamma(k.shape + p) - std::lgamma(k.shape) - p * std::log(k.rate));
          } else if constexpr (std::is_same_v<K, Negated>) {
            return k.base->abs_moment(p);
          } else {
            return expect([p](double x) { return std::pow(std::abs(x), p); });
          }
        },
        kind_);
  }

  /// E[e^{xX}], +infinity outside the domain of the moment generating function.
  double mgf(double x) const {
    return std::visit(
        [x](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) {
            return x < k.rate ? k.rate / (k.rate - x) : kInf;
          } else if constexpr (std::is_same_v<K, Gamma>) {
            return x < k.rate ? std::pow(1.0 - x / k.rate, -k.shape) : kInf;
          } else if constexpr (std::is_same_v<K, Uniform>) {
            const double w = x * (k.hi - k.lo);
            if (w == 0) return 1.0;
            return std::exp(x * k.lo) * std::expm1(w) / w;
          } else if constexpr (std::is_same_v<K, Deterministic>) {
            return std::exp(x * k.value);
          } else if constexpr (std::is_same_v<K, TwoPoint>) {
            return k.p1 * std::exp(x * k.x1) + (1 - k.p1) * std::exp(x * k.x2);
          } else if constexpr (std::is_same_v<K, Shifted>) {
            const double m = k.base->mgf(x);
            return std::isinf(m) ? kInf : std::exp(x * k.offset) * m;
          } else if constexpr (std::is_same_v<K, Negated>) {
            return k.base->mgf(-x);
          } else {
            // E[(1 + B)^x]
            const double v = k.base->expect([x](double y) { return std::pow(1.0 + y, x); });
            return std::isfinite(v) ? v : kInf;
          }
        },
        kind_);
  }

  std::string describe() const {
    std::ostringstream os;
    std::visit(
        [&os](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential>) os << "exponential(" << k.rate << ")";
          else if constexpr (std::is_same_v<K, Gamma>) os << "gamma(" << k.shape << ", " << k.rate << ")";
          else if constexpr (std::is_same_v<K, Uniform>) os << "uniform(" << k.lo << ", " << k.hi << ")";
          else if constexpr (std::is_same_v<K, Deterministic>) os << "deterministic(" << k.value << ")";
          else if constexpr (std::is_same_v<K, TwoPoint>) os << "two_point(" << k.x1 << ", " << k.p1 << ", " << k.x2 << ")";
          else if constexpr (std::is_same_v<K, Shifted>) os << "shifted(" << k.base->describe() << ", " << k.offset << ")";
          else if constexpr (std::is_same_v<K, Negated>) os << "negated(" << k.base->describe() << ")";
          else os << "log1p(" << k.base->describe() << ")";
        },
        kind_);
    return os.str();
  }

 private:
  explicit Distribution(Kind kind) : kind_(std::move(kind)), support_(compute_support(kind_)) {}

  static void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
  }

  static Support compute_support(const Kind& kind) {
    return std::visit(
        [](const auto& k) -> Support {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Exponential> || std::is_same_v<K, Gamma>) return {0.0, kInf};
          else if constexpr (std::is_same_v<K, Uniform>) return {k.lo, k.hi};
          else if constexpr (std::is_same_v<K, Deterministic>) return {k.value, k.value};
          else if constexpr (std::is_same_v<K, TwoPoint>) return {std::min(k.x1, k.x2), std::max(k.x1, k.x2)};
          else if constexpr (std::is_same_v<K, Shifted>) {
            const Support s = k.base->support();
            return {s.lower + k.offset, s.upper + k.offset};
          } else if constexpr (std::is_same_v<K, Negated>) {
            const Support s = k.base->support();
            return {-s.upper, -s.lower};
          } else {
            const Support s = k.base->support();
            return {std::log1p(s.lower), std::log1p(s.upper)};
          }
        },
        kind);
  }

  Kind kind_;
  Support support_;
};

/// inf (supp X ∩ (0, ∞)); +infinity when X never exceeds 0.
inline double positive_part_lower(const Distribution& d) {
  double best = kInf;
  for (const auto& iv : d.support_intervals()) {
    if (iv.hi > 0) best = std::min(best, std::max(iv.lo, 0.0));
  }
  return best;
}

/// sup |supp X ∩ (−∞, 0)|; 0 when X never falls below 0.
inline double negative_part_upper_abs(const Distribution& d) {
  return d.lower() < 0 ? -d.lower() : 0.0;
}

/// sup |supp X|.
inline double abs_upper(const Distribution& d) {
  return std::max(std::abs(d.lower()), std::abs(d.upper()));
}

}  // namespace ruinlab
