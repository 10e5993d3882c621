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
#include <optional>
#include <string>
#include <variant>

#include "ruinlab/distribution.hpp"
#include "ruinlab/error.hpp"

namespace ruinlab {

/// Finite-activity jump part of the return process: jumps J arrive at rate
/// `intensity` with law `law`, and every jump satisfies J > −1.
class JumpMeasure {
 public:
  JumpMeasure() = default;
  JumpMeasure(double intensity, std::optional<Distribution> law)
      : intensity_(intensity), law_(std::move(law)) {
    if (!std::isfinite(intensity) || intensity < 0) {
      throw ValidationError("jump intensity must be finite and >= 0");
    }
    if (intensity > 0 && !law_) {
      throw ValidationError("jump law required when intensity > 0");
    }
    if (law_ && !(law_->lower() > -1)) {
      throw ValidationError("jump law support must lie in (-1, inf), got lower bound " +
                            std::to_string(law_->lower()));
    }
    if (intensity > 0) log_law_ = Distribution::log1p_of(*law_);
  }

  double intensity() const noexcept { return intensity_; }
  bool active() const noexcept { return intensity_ > 0; }
  const std::optional<Distribution>& law() const noexcept { return law_; }
  /// Law of ln(1 + J); present iff active().
  const std::optional<Distribution>& log_law() const noexcept { return log_law_; }

  bool charges_negative() const noexcept { return active() && law_->charges_negative(); }
  bool charges_positive() const noexcept { return active() && law_->charges_positive(); }

 private:
  double intensity_ = 0;
  std::optional<Distribution> law_;
  std::optional<Distribution> log_law_;
};

/// Lévy triplet (a, σ², Π) of the return process R with a finite-activity Π.
///
/// `infinite_activity` is metadata only: such models can be classified but
/// not simulated.
class PriceModel {
 public:
  PriceModel(double a, double sigma2, JumpMeasure jumps, bool infinite_activity = false)
      : a_(a), sigma2_(sigma2), jumps_(std::move(jumps)), infinite_activity_(infinite_activity) {
    if (!std::isfinite(a)) throw ValidationError("price drift a must be finite");
    if (!std::isfinite(sigma2) || sigma2 < 0) {
      throw ValidationError("sigma2 must be finite and >= 0");
    }
    if (sigma2 == 0 && !jumps_.active() && !infinite_activity) {
      throw ValidationError("price process is deterministic: need sigma2 > 0 or jumps");
    }
    if (jumps_.active()) {
      const Distribution& law = *jumps_.law();
      truncated_mean_numeric_ = !law.is_discrete();
      truncated_mean_ = law.partial_expect([](double x) { return x; }, -1.0, 1.0);
    }
    pi_h_ = jumps_.intensity() * truncated_mean_;
    mu_v_ = a_ - 0.5 * sigma2_ - pi_h_;
  }

  double a() const noexcept { return a_; }
  double sigma2() const noexcept { return sigma2_; }
  double sigma() const noexcept { return std::sqrt(sigma2_); }
  const JumpMeasure& jumps() const noexcept { return jumps_; }
  bool infinite_activity() const noexcept { return infinite_activity_; }

  /// Π(h) = ρ·E[J·1{|J| ≤ 1}].
  double pi_h() const noexcept { return pi_h_; }
  /// True if Π(h) came from quadrature rather than a closed form.
  bool pi_h_numeric() const noexcept { return truncated_mean_numeric_; }
  /// Drift of V in the representation V_t = μ_V t + σW_t + Σ ln(1 + J_i).
  double mu_v() const noexcept { return mu_v_; }

 private:
  double a_;
  double sigma2_;
  JumpMeasure jumps_;
  bool infinite_activity_;
  double truncated_mean_ = 0;
  bool truncated_mean_numeric_ = false;
  double pi_h_ = 0;
  double mu_v_ = 0;
};

enum class Variant { NonLife, Annuity, Mixed };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::NonLife: return "non_life";
    case Variant::Annuity: return "annuity";
    case Variant::Mixed: return "mixed";
  }
  return "?";
}

/// Premium rate c, claim law of ξ and interarrival law of the renewal process.
class BusinessModel {
 public:
  BusinessModel(double c, Distribution claims, Distribution interarrival)
      : c_(c), claims_(std::move(claims)), interarrival_(std::move(interarrival)) {
    if (!std::isfinite(c)) throw ValidationError("premium rate c must be finite");
    if (claims_.has_atom_at(0.0)) throw ValidationError("claim law has an atom at 0");
    if (interarrival_.lower() < 0) {
      throw ValidationError("interarrival law must be supported in [0, inf)");
    }
    if (interarrival_.has_atom_at(0.0)) {
      throw ValidationError("interarrival law has an atom at 0");
    }
    if (c >= 0 && claims_.lower() >= 0) {
      throw ValidationError("ruin never happens: rejected (c >= 0 and claims > 0)");
    }
    if (c < 0 && claims_.upper() <= 0) {
      throw ValidationError("ruin happens for sure: rejected (c < 0 and claims <= 0)");
    }
  }

  double c() const noexcept { return c_; }
  const Distribution& claims() const noexcept { return claims_; }
  const Distribution& interarrival() const noexcept { return interarrival_; }

 private:
  double c_;
  Distribution claims_;
  Distribution interarrival_;
};

struct Model {
  PriceModel price;
  BusinessModel business;
};

inline Variant classify_variant(const BusinessModel& b) {
  if (b.claims().upper() <= 0) return Variant::NonLife;
  if (b.claims().lower() >= 0) return Variant::Annuity;
  return Variant::Mixed;
}

struct LogpriceParams {
  double mu_v;
  double sigma;
  double rho;
  /// Law of ln(1 + J); empty when there are no jumps.
  std::optional<Distribution> log_jump_law;
  bool pi_h_numeric;
};

inline LogpriceParams logprice_params(const PriceModel& p) {
  return {p.mu_v(), p.sigma(), p.jumps().intensity(), p.jumps().log_law(), p.pi_h_numeric()};
}

/// Finite-variation one-sided cases: the logprice falls at rate λ between
/// positive jumps, or rises at rate κ between negative jumps.
struct Lambda { double value; };
struct Kappa { double value; };
struct NotOneSided {};
using OneSidedDrift = std::variant<Lambda, Kappa, NotOneSided>;

inline OneSidedDrift lambda_kappa(const PriceModel& p) {
  if (p.sigma2() > 0 || p.infinite_activity() || !p.jumps().active()) return NotOneSided{};
  const bool neg = p.jumps().charges_negative();
  const bool pos = p.jumps().charges_positive();
  if (neg && pos) return NotOneSided{};
  if (pos) {
    const double lambda = p.pi_h() - p.a();
    if (!(lambda > 0)) {
      throw AssumptionError(
          "no positive cumulant root possible: positive jumps need Pi(h) - a > 0, got " +
          std::to_string(lambda));
    }
    return Lambda{lambda};
  }
  if (neg) {
    const double kappa = p.a() - p.pi_h();
    if (!(kappa > 0)) {
      throw AssumptionError(
          "no positive cumulant root possible: negative jumps need a - Pi(h) > 0, got " +
          std::to_string(kappa));
    }
    return Kappa{kappa};
  }
  return NotOneSided{};
}

}  // namespace ruinlab
