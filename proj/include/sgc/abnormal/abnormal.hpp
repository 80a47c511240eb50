#pragma once

#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "sgc/abnormal/config.hpp"

namespace sgc {

struct DifferentialMatrix {
  Eigen::MatrixXd matrix;           // m x (N+1): X1(gamma(s)), then g_{t_j}^s(gamma(s))
  std::vector<double> times;        // midpoints t_j
  Eigen::VectorXd singular_values;
  int rank = 0;
  bool underresolved = false;       // fewer columns than the intrinsic dimension
};

// Image of the endpoint differential on piecewise-constant controls, in
// tangent coordinates at gamma(s).
DifferentialMatrix differential_matrix(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg = {});

struct AbnormalData {
  double s = 0.0;
  Eigen::VectorXd lambda;           // unit covector at gamma(s), tangent coordinates
  int corank = 0;
  Eigen::VectorXd singular_values;
  std::vector<double> eta_times;    // 0, grid midpoints, s
  std::vector<Eigen::VectorXd> eta; // lambda carried back to gamma(t)
  Eigen::VectorXd eta0;
  double goh_residual = 0.0;        // max |<eta(t), [X1,X2]>|
  double legendre_min = 0.0;        // min <eta(t), [[X1,X2],X2]>
  double annihilation_residual = 0.0;
  bool underresolved = false;
};

// Abnormal covector along gamma on [0, s]. Throws HypothesisError when the
// corank is not one. The sign is fixed so the Legendre quantity is positive at t = 0.
AbnormalData abnormal_covector(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg = {});

// Largest lambda_0-component over unit left-null vectors of the extended
// differential (d0F; d0J). Zero for a strictly abnormal curve.
double strictness_check(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg = {});

// L2 norm of the unit cost gradient (1, 0) projected onto ker d0F.
double j_projection(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg = {});

struct HypothesisReport {
  double s = 0.0;
  int corank = 0;
  double goh_residual = 0.0;
  double legendre_min = 0.0;
  double strictness_residual = 0.0;
  double j_projection_norm = 0.0;
  std::string failed_check;         // empty when all hypotheses hold
};

// Runs every hypothesis check; never throws on a failed hypothesis.
HypothesisReport check_hypotheses(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg = {});

nlohmann::json to_json(const AbnormalData& a);
nlohmann::json to_json(const HypothesisReport& r);

}  // namespace sgc
