#include "sgc/flow/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgc/vfcore/error.hpp"

namespace sgc {

Control Control::uniform(double s, std::vector<double> v1, std::vector<double> v2) {
  if (!(s > 0.0)) throw DomainError("control horizon must be positive");
  if (v1.empty() || v1.size() != v2.size()) throw DomainError("control components must be non-empty and equal length");
  Control c;
  const std::size_t n = v1.size();
  c.knots.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) c.knots[k] = s * static_cast<double>(k) / static_cast<double>(n);
  c.knots[n] = s;
  c.v1 = std::move(v1);
  c.v2 = std::move(v2);
  return c;
}

Control Control::zero(double s, std::size_t pieces) {
  return uniform(s, std::vector<double>(pieces, 0.0), std::vector<double>(pieces, 0.0));
}

std::size_t Control::piece_at(double t) const {
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  if (it == knots.begin()) return 0;
  std::size_t k = static_cast<std::size_t>(it - knots.begin()) - 1;
  return std::min(k, pieces() - 1);
}

double Control::mean_v1() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < pieces(); ++k) acc += v1[k] * width(k);
  return acc / horizon();
}

void Control::validate() const {
  if (v1.empty() || v1.size() != v2.size() || knots.size() != v1.size() + 1)
    throw DomainError("control has inconsistent sizes");
  if (knots.front() != 0.0) throw DomainError("control knots must start at 0");
  for (std::size_t k = 0; k < pieces(); ++k)
    if (!(knots[k + 1] > knots[k])) throw DomainError("control knots must be strictly increasing");
  for (std::size_t k = 0; k < pieces(); ++k)
    if (!std::isfinite(v1[k]) || !std::isfinite(v2[k])) throw DomainError("control values must be finite");
}

namespace {

std::vector<double> merge_knots(std::vector<double> a, double s) {
  std::sort(a.begin(), a.end());
  std::vector<double> out;
  const double tol = 1e-13 * s;
  for (double t : a) {
    t = std::clamp(t, 0.0, s);
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  }
  out.front() = 0.0;
  if (s - out.back() <= tol) out.back() = s;
  else out.push_back(s);
  return out;
}

// Cumulative integral of the piecewise-constant rate at the knots, pinned to end at s.
std::vector<double> cumulative(const Control& c, const std::vector<double>& rate) {
  std::vector<double> phi(c.knots.size(), 0.0);
  for (std::size_t k = 0; k < c.pieces(); ++k) phi[k + 1] = phi[k] + rate[k] * c.width(k);
  phi.back() = c.horizon();
  return phi;
}

std::size_t locate(const std::vector<double>& knots, double t) {
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  std::size_t k = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
  return std::min(k, knots.size() - 2);
}

}  // namespace

double l2_distance(const Control& a, const Control& b) {
  a.validate();
  b.validate();
  if (std::abs(a.horizon() - b.horizon()) > 1e-12 * a.horizon())
    throw DomainError("controls have different horizons");
  std::vector<double> all = a.knots;
  all.insert(all.end(), b.knots.begin(), b.knots.end());
  auto knots = merge_knots(all, a.horizon());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    double m = 0.5 * (knots[k] + knots[k + 1]);
    std::size_t ia = a.piece_at(m), ib = b.piece_at(m);
    double d1 = a.v1[ia] - b.v1[ib], d2 = a.v2[ia] - b.v2[ib];
    acc += (d1 * d1 + d2 * d2) * (knots[k + 1] - knots[k]);
  }
  return std::sqrt(acc);
}

Control rho(const Control& v, double alpha) {
  v.validate();
  const double s = v.horizon();
  const double c = v.mean_v1();
  std::vector<double> rate(v.pieces());
  for (std::size_t k = 0; k < v.pieces(); ++k) {
    rate[k] = 1.0 + v.v1[k] - c;
    if (!(rate[k] > alpha))
      throw DomainError("control is not admissible for rho: 1 + v1 - mean(v1) = " + std::to_string(rate[k]) +
                        " <= alpha");
  }
  if (!(1.0 + c > 0.0)) throw DomainError("control is not admissible for rho: 1 + mean(v1) <= 0");
  auto phi = cumulative(v, rate);
  // preimages of the v2 knots under phi
  std::vector<double> all = v.knots;
  for (std::size_t j = 1; j + 1 < v.knots.size(); ++j) {
    std::size_t k = locate(phi, v.knots[j]);
    all.push_back(v.knots[k] + (v.knots[j] - phi[k]) / rate[k]);
  }
  Control out;
  out.knots = merge_knots(all, s);
  const std::size_t n = out.knots.size() - 1;
  out.v1.resize(n);
  out.v2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.5 * (out.knots[i] + out.knots[i + 1]);
    std::size_t k = v.piece_at(m);
    double u = phi[k] + rate[k] * (m - v.knots[k]);
    std::size_t j = v.piece_at(u);
    out.v1[i] = c + (1.0 + c) * (v.v1[k] - c);
    out.v2[i] = rate[k] * v.v2[j];
  }
  return out;
}

Control rho_inverse(const Control& w, double alpha) {
  w.validate();
  const double s = w.horizon();
  const double c = w.mean_v1();
  if (!(1.0 + c > 0.0)) throw DomainError("control is not admissible for rho inverse: 1 + mean(w1) <= 0");
  std::vector<double> rate(w.pieces());
  for (std::size_t k = 0; k < w.pieces(); ++k) {
    rate[k] = 1.0 + (w.v1[k] - c) / (1.0 + c);
    if (!(rate[k] > alpha))
      throw DomainError("control is not admissible for rho inverse: reparametrization rate " +
                        std::to_string(rate[k]) + " <= alpha");
  }
  auto phi = cumulative(w, rate);
  std::vector<double> all = w.knots;
  all.insert(all.end(), phi.begin(), phi.end());
  Control out;
  out.knots = merge_knots(all, s);
  const std::size_t n = out.knots.size() - 1;
  out.v1.resize(n);
  out.v2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.5 * (out.knots[i] + out.knots[i + 1]);
    std::size_t k1 = w.piece_at(m);
    std::size_t k2 = locate(phi, m);
    out.v1[i] = c + (rate[k1] - 1.0);
    out.v2[i] = w.v2[k2] / rate[k2];
  }
  return out;
}

}  // namespace sgc
