#pragma once

#include <cstddef>
#include <vector>

namespace sgc {

// Piecewise-constant control (v1, v2) on [0, s]. Pieces are given by knots
// 0 = knots[0] < ... < knots[K] = s; Control::uniform builds the usual
// equal-width grid. Trajectories follow x' = (1 + v1) X1 + v2 X2.
struct Control {
  std::vector<double> knots;
  std::vector<double> v1;
  std::vector<double> v2;

  static Control uniform(double s, std::vector<double> v1, std::vector<double> v2);
  static Control zero(double s, std::size_t pieces);

  double horizon() const { return knots.back(); }
  std::size_t pieces() const { return v1.size(); }
  double width(std::size_t k) const { return knots[k + 1] - knots[k]; }
  // Index of the piece containing t (right-continuous, last piece closed).
  std::size_t piece_at(double t) const;
  double mean_v1() const;
  void validate() const;
};

// L2 distance between two controls on the same horizon, exact for piecewise constants.
double l2_distance(const Control& a, const Control& b);

// Reparametrization map rho and its inverse. Both require 1 + v1 - mean(v1) > alpha.
Control rho(const Control& v, double alpha = 0.5);
Control rho_inverse(const Control& w, double alpha = 0.5);

}  // namespace sgc
