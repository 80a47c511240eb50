#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgc/abnormal/abnormal.hpp"

namespace sgc {

// Endpoint map F or extended map (F, J).
enum class Variant { Endpoint, Extended };

const char* variant_name(Variant v);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int points, std::vector<double>& nodes, std::vector<double>& weights);

// Bracket kernels of the second variation, all evaluated at the base point
// after pulling back by the flow of X1:
//   l(t)      = <lambda, [gdot_t, g_t]>
//   b(t)      = <lambda, [X2, gdot_t]>
//   B(tau, t) = <lambda, [gdot_tau, gdot_t]>
// with g_t the transported X2 and gdot_t its t-derivative.
struct BracketKernels {
  double s = 0.0;
  int grid = 0;
  int quad_points = 0;
  std::vector<double> nodes;        // Gauss nodes, cell-major
  std::vector<double> weights;
  Eigen::VectorXd l;                // at nodes
  Eigen::VectorXd b;                // at nodes
  Eigen::MatrixXd gdot;             // m x nodes: tangent coordinates of pulled-back gdot_t
  Eigen::MatrixXd dual;             // m x nodes: lambda(D gdot_t) E0, so B(tau,t) = dual_t . gdot_tau - dual_tau . gdot_t
  // cell integrals used by the assembly
  Eigen::VectorXd cell_l, cell_b, cell_diag;   // cell_diag = integral of B over {tau < t} inside the cell
  Eigen::MatrixXd cell_gdot, cell_dual;        // m x N
  Eigen::VectorXd x1_base;          // X1 at the base point
  Eigen::VectorXd x2_end;           // X2(gamma(s)) pulled back to the base point
  Eigen::VectorXd covector;         // lambda pulled back to the base point

  double kernel_B(std::size_t tau_node, std::size_t t_node) const;
};

BracketKernels bracket_kernels(const ManifoldFrame& frame, const AbnormalData& abnormal, const AnalysisConfig& cfg = {});

// Discretized second variation on span{c} + piecewise constants, with its linear constraints.
struct SecondVariation {
  Variant variant = Variant::Endpoint;
  double s = 0.0;
  Eigen::MatrixXd form;             // (N+1) x (N+1), coordinates (c, w_1, ..., w_N)
  Eigen::MatrixXd constraints;      // rows x (N+1)
};

SecondVariation assemble_form(const BracketKernels& k, Variant variant);

struct Inertia {
  int negative = 0;
  int null = 0;
  int positive = 0;
  Eigen::VectorXd eigenvalues;      // of the form restricted to the constraint kernel, ascending
  double min_abs = 0.0;
  double max_abs = 0.0;
  int constraint_rank = 0;
};

Inertia inertia(const SecondVariation& q, double rel_tol = 1e-6, double rank_tol = 1e-10);

struct IndexPair {
  Inertia endpoint;
  Inertia extended;
};

// Inertia of both variants at one horizon.
IndexPair hessian_indices(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg = {});

struct ProfileRow {
  double s = 0.0;
  int ind_f = -1, null_f = -1, ind_ext = -1, null_ext = -1;
  double min_abs_eig = 0.0;
  std::string error;                // non-empty if this horizon failed
};

// Index pairs over a list of horizons; independent per s and evaluated in parallel.
std::vector<ProfileRow> index_profile(const ManifoldFrame& frame, const std::vector<double>& s_values,
                                      const AnalysisConfig& cfg = {}, unsigned threads = 0);

struct HessianZero {
  double s = 0.0;
  int multiplicity = 1;             // jump of the negative index
};

struct HessianZeroSets {
  std::vector<HessianZero> endpoint;
  std::vector<HessianZero> extended;
};

// Horizons in (lo, hi] where the negative index of each variant jumps,
// located by bisection to `tol`.
HessianZeroSets hessian_zeros(const ManifoldFrame& frame, double lo, double hi, double scan_step, double tol,
                              const AnalysisConfig& cfg = {}, unsigned threads = 0);

}  // namespace sgc
