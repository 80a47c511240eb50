#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sgc/flow/control.hpp"
#include "sgc/flow/integrator.hpp"
#include "sgc/vfcore/frame.hpp"

namespace sgc {

struct NumericsConfig {
  IntegratorConfig integrator;
  DiffConfig diff;
};

// Flow of X1 for time t starting at x (t may be negative).
Eigen::VectorXd flow_x1(const ManifoldFrame& frame, const Eigen::VectorXd& x, double t, const NumericsConfig& cfg = {});

// Endpoint of x' = (1 + v1) X1 + v2 X2 from the base point.
Eigen::VectorXd endpoint(const ManifoldFrame& frame, const Control& v, const NumericsConfig& cfg = {});

// Samples the trajectory of a control and writes "t,x1,...,xn" rows.
void write_trajectory_csv(const ManifoldFrame& frame, const Control& v, int samples, std::ostream& out,
                          const NumericsConfig& cfg = {});

// Pushforward of a tangent vector (tangent coordinates at gamma(t0)) to gamma(t1)
// along the reference curve gamma(t) = exp(t X1) x0.
Eigen::VectorXd transport(const ManifoldFrame& frame, double t0, double t1, const Eigen::VectorXd& vec,
                          const NumericsConfig& cfg = {});
// Covector at gamma(t0) carried to gamma(t1) so that pairings with transported vectors are preserved.
Eigen::VectorXd cotransport(const ManifoldFrame& frame, double t0, double t1, const Eigen::VectorXd& covec,
                            const NumericsConfig& cfg = {});

// The field x -> (exp((t - tau) X1)_* Z)(x).
FieldPtr pushforward_field(const ManifoldFrame& frame, FieldPtr z, double tau, double t,
                           const NumericsConfig& cfg = {});

// Reference curve sampled at ascending times with its tangent transport.
class CurveSamples {
 public:
  CurveSamples(const ManifoldFrame& frame, std::vector<double> times, const NumericsConfig& cfg = {});

  std::size_t size() const { return times_.size(); }
  double time(std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }
  const Eigen::VectorXd& point(std::size_t i) const { return points_[i]; }
  const TangentChart& chart(std::size_t i) const { return charts_[i]; }
  // Tangent-coordinate matrix of D(exp t_i X1) from x0 to gamma(t_i).
  const Eigen::MatrixXd& flow_matrix(std::size_t i) const { return flow_[i]; }
  // Transfer of tangent coordinates from gamma(t_i) to gamma(t_j).
  Eigen::MatrixXd transfer(std::size_t i, std::size_t j) const;
  // Tangent coordinates of a field at gamma(t_i).
  Eigen::VectorXd field_coords(const VectorField& f, std::size_t i) const;

 private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> points_;
  std::vector<TangentChart> charts_;
  std::vector<Eigen::MatrixXd> flow_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> flow_lu_;
};

// For each field Z and time t, the pulled-back field h = (exp(-t X1))_* Z at x0:
// its tangent coordinates and the ambient Jacobian Dh(x0) E0 (n x m), where E0
// is the tangent frame at x0. Computed by a single variational sweep per
// tangent direction.
struct PushforwardJets {
  std::vector<double> times;
  std::vector<std::vector<Eigen::VectorXd>> coords;     // [field][time]
  std::vector<std::vector<Eigen::MatrixXd>> jacobian;   // [field][time]
  Eigen::MatrixXd frame0;
};

PushforwardJets pushforward_jets(const ManifoldFrame& frame, const std::vector<FieldPtr>& fields,
                                 std::vector<double> times, const NumericsConfig& cfg = {});

}  // namespace sgc
