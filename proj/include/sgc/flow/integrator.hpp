#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgc/vfcore/dual.hpp"
#include "sgc/vfcore/error.hpp"

namespace sgc {

enum class IntegratorMethod { RK4, RK45 };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::RK4;
  double step = 0.0;          // RK4 step; 0 means horizon / default_steps
  int default_steps = 2000;
  double abs_tol = 1e-11;     // RK45
  double rel_tol = 1e-10;     // RK45
  long max_steps = 50'000'000;
};

inline double rk4_step_size(const IntegratorConfig& cfg, double horizon) {
  if (cfg.step > 0.0) return cfg.step;
  return std::max(std::abs(horizon), 1e-300) / cfg.default_steps;
}

// Integrates y' = rhs(t, y) from t0 to t1 in place. rhs has signature
// rhs(double t, const std::vector<T>& y, std::vector<T>& dy). `horizon` sets
// the default RK4 step so that sub-intervals of one problem share a step size.
template <class T, class Rhs>
void integrate(Rhs&& rhs, double t0, double t1, std::vector<T>& y, const IntegratorConfig& cfg,
               double horizon) {
  const double span = t1 - t0;
  if (span == 0.0) return;
  const std::size_t n = y.size();
  std::vector<T> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n);

  auto check_finite = [&](const std::vector<T>& v, double t) {
    for (const auto& e : v)
      if (!std::isfinite(value_of(e)))
        throw IntegrationError("state became non-finite at t = " + std::to_string(t));
  };

  if (cfg.method == IntegratorMethod::RK4) {
    const double hmax = rk4_step_size(cfg, horizon);
    const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / hmax - 1e-9)));
    if (steps > cfg.max_steps) throw IntegrationError("RK4 step count exceeds the configured maximum");
    const double h = span / static_cast<double>(steps);
    double t = t0;
    for (long s = 0; s < steps; ++s) {
      rhs(t, y, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + k1[i] * (0.5 * h);
      rhs(t + 0.5 * h, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + k2[i] * (0.5 * h);
      rhs(t + 0.5 * h, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + k3[i] * h;
      rhs(t + h, tmp, k4);
      for (std::size_t i = 0; i < n; ++i) y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
      t = t0 + static_cast<double>(s + 1) * h;
    }
    check_finite(y, t1);
    return;
  }

  // Dormand-Prince 5(4) with error control on the value parts.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = span > 0 ? 1.0 : -1.0;
  double t = t0;
  double h = std::min(std::abs(span), std::max(std::abs(horizon), std::abs(span)) / 100.0);
  std::vector<T> ynew(n);
  long count = 0;
  rhs(t, y, k1);
  while (dir * (t1 - t) > 0.0) {
    if (++count > cfg.max_steps) throw IntegrationError("RK45 step count exceeds the configured maximum");
    if (h < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("RK45 step size underflow");
    bool last = h >= std::abs(t1 - t);
    double hs = last ? (t1 - t) : dir * h;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + k1[i] * (hs * a21);
    rhs(t + c2 * hs, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + (k1[i] * a31 + k2[i] * a32) * hs;
    rhs(t + c3 * hs, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + (k1[i] * a41 + k2[i] * a42 + k3[i] * a43) * hs;
    rhs(t + c4 * hs, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + (k1[i] * a51 + k2[i] * a52 + k3[i] * a53 + k4[i] * a54) * hs;
    rhs(t + c5 * hs, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + (k1[i] * a61 + k2[i] * a62 + k3[i] * a63 + k4[i] * a64 + k5[i] * a65) * hs;
    rhs(t + hs, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + (k1[i] * b1 + k3[i] * b3 + k4[i] * b4 + k5[i] * b5 + k6[i] * b6) * hs;
    rhs(t + hs, ynew, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = value_of((k1[i] * e1 + k3[i] * e3 + k4[i] * e4 + k5[i] * e5 + k6[i] * e6 + k7[i] * e7) * hs);
      double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(value_of(y[i])), std::abs(value_of(ynew[i])));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) throw IntegrationError("state became non-finite at t = " + std::to_string(t));
    if (err <= 1.0) {
      t = last ? t1 : t + hs;
      y.swap(ynew);
      k1.swap(k7);
    }
    double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::abs(hs) * fac;
  }
  check_finite(y, t1);
}

}  // namespace sgc
