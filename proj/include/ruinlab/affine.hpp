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

#include "ruinlab/error.hpp"

namespace ruinlab {

/// The map x ↦ a·x + b, an element of the affine semigroup of the line.
struct AffineMap {
  double a = 1;
  double b = 0;

  static constexpr AffineMap identity() noexcept { return {1, 0}; }
  constexpr double operator()(double x) const noexcept { return a * x + b; }
  friend constexpr bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// (h1 h2)(x) = h1(h2(x)), i.e. (a1 a2, b1 + a1 b2).
constexpr AffineMap affine_compose(const AffineMap& h1, const AffineMap& h2) noexcept {
  return {h1.a * h2.a, h1.b + h1.a * h2.b};
}

constexpr AffineMap operator*(const AffineMap& h1, const AffineMap& h2) noexcept {
  return affine_compose(h1, h2);
}

/// b / (1 − a); translations (a = 1) have none.
inline double affine_fixed_point(const AffineMap& h) {
  if (h.a == 1) throw ValidationError("no fixed point: a = 1");
  return h.b / (1 - h.a);
}

struct SupportCertificate {
  bool certified = false;
  /// Left end of the certified half-line [from, ∞) inside the support.
  double from = 0;
};

/// If some contracting h (0 < a < 1) and expanding h' (a' > 1) generated by
/// the support of (A, B) satisfy x0(h') < x0(h), then [x0(h), ∞) lies in the
/// support of the solution of Y = AY + B.
inline SupportCertificate support_unbounded_certificate(const AffineMap& h, const AffineMap& h_prime) {
  SupportCertificate c;
  if (!(h.a > 0 && h.a < 1) || !(h_prime.a > 1)) return c;
  const double x0 = affine_fixed_point(h);
  const double x0p = affine_fixed_point(h_prime);
  c.certified = x0p < x0;
  c.from = x0;
  return c;
}

}  // namespace ruinlab
