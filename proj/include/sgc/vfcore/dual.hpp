#pragma once

#include <cmath>
#include <type_traits>

namespace sgc {

// Forward-mode dual number v + d*eps with eps^2 = 0.
// Nesting Dual<Dual<T>> yields higher directional derivatives.
template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(T value, T deriv) : v(value), d(deriv) {}
  template <class U>
    requires std::is_arithmetic_v<U>
  constexpr Dual(U c) : v(T(c)), d(T(0.0)) {}
  constexpr Dual(const T& value)
    requires(!std::is_arithmetic_v<T>)
      : v(value), d(T(0.0)) {}

  constexpr Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  constexpr Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  constexpr Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  constexpr Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend constexpr Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend constexpr Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend constexpr Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend constexpr Dual operator+(const Dual& a) { return a; }
  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
  }
  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    T inv = T(1.0) / b.v;
    T q = a.v * inv;
    return {q, (a.d - q * b.d) * inv};
  }
  friend constexpr Dual operator*(const Dual& a, double c) { return {a.v * c, a.d * c}; }
  friend constexpr Dual operator*(double c, const Dual& a) { return {a.v * c, a.d * c}; }
  friend constexpr Dual operator/(const Dual& a, double c) { return {a.v / c, a.d / c}; }
  friend constexpr Dual operator+(const Dual& a, double c) { return {a.v + c, a.d}; }
  friend constexpr Dual operator+(double c, const Dual& a) { return {a.v + c, a.d}; }
  friend constexpr Dual operator-(const Dual& a, double c) { return {a.v - c, a.d}; }
  friend constexpr Dual operator-(double c, const Dual& a) { return {c - a.v, -a.d}; }
  friend constexpr Dual operator/(double c, const Dual& a) { return Dual(c) / a; }

  friend Dual sin(const Dual& a) {
    using std::cos;
    using std::sin;
    return {sin(a.v), a.d * cos(a.v)};
  }
  friend Dual cos(const Dual& a) {
    using std::cos;
    using std::sin;
    return {cos(a.v), -(a.d * sin(a.v))};
  }
  friend Dual exp(const Dual& a) {
    using std::exp;
    T e = exp(a.v);
    return {e, a.d * e};
  }
  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    T r = sqrt(a.v);
    return {r, a.d / (r * 2.0)};
  }
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

template <class T>
struct dual_depth : std::integral_constant<int, 0> {};
template <class T>
struct dual_depth<Dual<T>> : std::integral_constant<int, 1 + dual_depth<T>::value> {};
template <class T>
inline constexpr int dual_depth_v = dual_depth<T>::value;

inline constexpr int kMaxDualDepth = 4;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

}  // namespace sgc
