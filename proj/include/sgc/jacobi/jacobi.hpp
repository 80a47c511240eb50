#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgc/abnormal/abnormal.hpp"

namespace sgc {

// Coefficients of (ad X1)^m X2 = beta X1 + sum_i alpha^i (ad X1)^i X2 along
// gamma, with m = intrinsic_dim - 2.
struct StructuralFunctions {
  int order = 0;                    // m
  std::vector<double> t;
  std::vector<double> beta;
  Eigen::MatrixXd alpha;            // order x t.size(), row i = alpha^i
  std::vector<double> residual;     // relative least-squares residual per t
  std::vector<double> independence; // relative smallest singular value of [X1, X2, ..., (ad X1)^{m-1} X2]
  std::vector<double> transversality; // same with [[X1,X2],X2] appended
};

StructuralFunctions structural_functions(const ManifoldFrame& frame, const std::vector<double>& t_grid,
                                         const AnalysisConfig& cfg = {});

// Jacobi boundary problem for the endpoint map (case a) or the extended map (case b).
enum class ShootingCase { Endpoint, Extended };

struct ShootingResult {
  double s = 0.0;
  double determinant = 0.0;
  int rank_deficiency = 0;
  Eigen::MatrixXd boundary;         // rows: boundary conditions, columns: basis of admissible initial covectors
  Eigen::VectorXd singular_values;
  double zeta_residual = 0.0;       // consistency of the transported covector derivatives
  double legendre_min = 0.0;
};

ShootingResult shooting_determinant(const ManifoldFrame& frame, const AbnormalData& abnormal, ShootingCase which,
                                    const AnalysisConfig& cfg = {});
// Convenience: computes the abnormal covector at s first.
ShootingResult shooting_determinant(const ManifoldFrame& frame, double s, ShootingCase which,
                                    const AnalysisConfig& cfg = {});

// Closed-form conjugacy indicators for 4-dimensional frames:
//   Endpoint: det[X1, X2, g_0, W]
//   Extended: det[X2, g_0, int beta exp(-int alpha^1) g_t dt, W]
// with g_t the transported X2 and W = [[X1,X2],X2], all at gamma(s).
double engel_indicator(const ManifoldFrame& frame, double s, ShootingCase which, const AnalysisConfig& cfg = {});

struct Zero {
  double s = 0.0;
  int multiplicity = 1;
  bool tangential = false;          // touches zero without a sign change
};

struct ZeroScan {
  double scan_step = 0.02;
  double tol = 1e-10;               // bisection width
  double magnitude_rel = 1e-6;      // |f| below this fraction of max|f| counts as zero
  bool open_lo = true;              // exclude the left endpoint
  std::function<int(double)> multiplicity;  // optional, evaluated at each zero
};

// Zeros of a scalar function on [lo, hi] by sign-change scan and bisection.
std::vector<Zero> locate_zeros(const std::function<double(double)>& f, double lo, double hi, const ZeroScan& opts);

}  // namespace sgc
