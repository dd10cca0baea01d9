/*
 Copyright 2026 The tpfc authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cmath>

namespace tpfc
{

  /// Hyper-dual scalar carrying a value, two directional derivatives and the
  /// mixed second derivative along those directions. Evaluating a smooth
  /// function on Dual2 inputs seeded with directions (a, b) yields
  /// f, ∇f·a, ∇f·b and aᵀ(∇²f)b exactly (to roundoff), with no truncation
  /// error. The value channel performs the same double arithmetic as a plain
  /// evaluation, so seeding with zero directions reproduces it bit for bit.
  struct Dual2
  {
    double v = 0.0;  // value
    double a = 0.0;  // derivative along direction 1
    double b = 0.0;  // derivative along direction 2
    double ab = 0.0; // mixed second derivative

    constexpr Dual2() = default;
    constexpr Dual2(double value) : v(value) {}
    constexpr Dual2(double value, double da, double db, double dab) : v(value), a(da), b(db), ab(dab) {}
  };

  constexpr Dual2 operator+(const Dual2 &x, const Dual2 &y)
  {
    return {x.v + y.v, x.a + y.a, x.b + y.b, x.ab + y.ab};
  }
  constexpr Dual2 operator-(const Dual2 &x, const Dual2 &y)
  {
    return {x.v - y.v, x.a - y.a, x.b - y.b, x.ab - y.ab};
  }
  constexpr Dual2 operator-(const Dual2 &x) { return {-x.v, -x.a, -x.b, -x.ab}; }

  constexpr Dual2 operator*(const Dual2 &x, const Dual2 &y)
  {
    return {x.v * y.v,
            x.a * y.v + x.v * y.a,
            x.b * y.v + x.v * y.b,
            x.ab * y.v + x.a * y.b + x.b * y.a + x.v * y.ab};
  }

  /// Chain rule for a scalar function given f(u), f'(u), f''(u).
  constexpr Dual2 chain(const Dual2 &u, double f, double df, double ddf)
  {
    return {f, df * u.a, df * u.b, df * u.ab + ddf * u.a * u.b};
  }

  inline Dual2 operator/(const Dual2 &x, const Dual2 &y)
  {
    const double inv = 1.0 / y.v;
    return x * chain(y, inv, -inv * inv, 2.0 * inv * inv * inv);
  }

  constexpr Dual2 &operator+=(Dual2 &x, const Dual2 &y) { return x = x + y; }
  constexpr Dual2 &operator-=(Dual2 &x, const Dual2 &y) { return x = x - y; }
  inline Dual2 &operator*=(Dual2 &x, const Dual2 &y) { return x = x * y; }

  inline Dual2 sin(const Dual2 &u) { return chain(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v)); }
  inline Dual2 cos(const Dual2 &u) { return chain(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v)); }
  inline Dual2 tan(const Dual2 &u)
  {
    const double t = std::tan(u.v);
    const double sec2 = 1.0 + t * t;
    return chain(u, t, sec2, 2.0 * sec2 * t);
  }
  inline Dual2 exp(const Dual2 &u)
  {
    const double e = std::exp(u.v);
    return chain(u, e, e, e);
  }
  inline Dual2 sqrt(const Dual2 &u)
  {
    const double s = std::sqrt(u.v);
    return chain(u, s, 0.5 / s, -0.25 / (s * u.v));
  }

} // namespace tpfc
