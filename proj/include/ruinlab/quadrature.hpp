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
#include <functional>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace ruinlab::numeric {

inline constexpr double kQuadratureTolerance = 1e-12;

/// Adaptive double-exponential quadrature of f over [a, b]. Either endpoint
/// may be infinite; a == b gives 0.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = kQuadratureTolerance) {
  if (!(a < b)) return 0.0;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (std::isfinite(a) && std::isfinite(b)) {
    thread_local boost::math::quadrature::tanh_sinh<double> finite;
    return finite.integrate(f, a, b, tol);
  }
  thread_local boost::math::quadrature::exp_sinh<double> half;
  if (std::isfinite(a)) return half.integrate(f, a, inf, tol);
  if (std::isfinite(b)) return half.integrate(f, -inf, b, tol);
  // Whole line: split at 0.
  return half.integrate(f, -inf, 0.0, tol) + half.integrate(f, 0.0, inf, tol);
}

}  // namespace ruinlab::numeric
