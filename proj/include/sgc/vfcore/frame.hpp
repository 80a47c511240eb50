#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "sgc/vfcore/field.hpp"

namespace sgc {

// Columns span the tangent space of the embedded manifold at a point.
using TangentFrameFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct ManifoldFrame {
  std::size_t ambient_dim = 0;
  std::size_t intrinsic_dim = 0;
  FieldPtr x1;
  FieldPtr x2;
  TangentFrameFn tangent_frame;
  Eigen::VectorXd base_point;
  std::string label;
};

// Least-squares tangent coordinates of ambient vectors at a fixed point.
class TangentChart {
 public:
  explicit TangentChart(Eigen::MatrixXd frame);
  Eigen::VectorXd coords(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd coords(const Eigen::MatrixXd& v) const;
  // Ambient covector mu with mu . v = lambda . coords(v) for tangent v.
  Eigen::VectorXd ambient_covector(const Eigen::VectorXd& lambda) const;
  const Eigen::MatrixXd& frame() const { return e_; }
  Eigen::Index dim() const { return e_.cols(); }

 private:
  Eigen::MatrixXd e_;
  Eigen::MatrixXd pinv_;
};

TangentChart chart_at(const ManifoldFrame& frame, const Eigen::VectorXd& x);
Eigen::VectorXd tangent_coordinates(const ManifoldFrame& frame, const Eigen::VectorXd& x, const Eigen::VectorXd& v);

struct FrameCheck {
  double frame_min_singular = 0.0;   // smallest singular value of the tangent frame, relative
  double tangency_residual = 0.0;    // X1, X2 distance from the tangent span, relative
  double independence = 0.0;        // smallest singular value of [X1 X2] in tangent coordinates, relative
  bool ok = false;
};

FrameCheck check_frame(const ManifoldFrame& frame, const Eigen::VectorXd& x, double tol = 1e-8);

std::vector<std::string> builtin_frame_names();
ManifoldFrame builtin_frame(std::string_view name);
// Builtin name, "builtin:<name>", or path to a JSON frame file.
ManifoldFrame resolve_frame(const std::string& source);

ManifoldFrame frame_from_json(const nlohmann::json& j);
ManifoldFrame load_frame(const std::filesystem::path& path);

// Expression strings of the builtin Engel-type frame, for writing JSON frame files.
nlohmann::json builtin_frame_json(std::string_view name);

}  // namespace sgc
