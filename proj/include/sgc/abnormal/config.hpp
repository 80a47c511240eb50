#pragma once

#include "sgc/flow/flow.hpp"

namespace sgc {

// Discretization and tolerance settings shared by the analysis modules.
struct AnalysisConfig {
  NumericsConfig numerics;
  int grid = 200;              // control-grid subintervals on [0, s]
  int quad_points = 2;         // Gauss-Legendre points per subinterval for the second variation
  int jacobi_steps = 400;      // RK4 steps for the Jacobi shooting problem
  double rank_tol = 1e-7;      // relative singular-value cutoff for numerical rank
  double eig_tol = 1e-6;       // relative eigenvalue cutoff for null directions
  double goh_tol = 1e-8;
  double strictness_tol = 1e-8;
  double j_projection_min = 1e-3;
  double alpha = 0.5;          // admissibility margin for the reparametrization map
};

}  // namespace sgc
