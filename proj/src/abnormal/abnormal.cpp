#include "sgc/abnormal/abnormal.hpp"

#include <cmath>
#include <limits>

#include "sgc/vfcore/bracket.hpp"

namespace sgc {

namespace {

void check_horizon(double s, const AnalysisConfig& cfg) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("horizon s must be positive and finite");
  if (cfg.grid < 1) throw ConfigError("grid must have at least one subinterval");
}

// Curve samples at 0, the grid midpoints and s.
CurveSamples grid_curve(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg) {
  const int n = cfg.grid;
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n) + 2);
  times.push_back(0.0);
  for (int j = 0; j < n; ++j) times.push_back(s * (j + 0.5) / n);
  times.push_back(s);
  return CurveSamples(frame, std::move(times), cfg.numerics);
}

DifferentialMatrix differential_from(const ManifoldFrame& frame, const CurveSamples& curve, const AnalysisConfig& cfg) {
  const std::size_t last = curve.size() - 1;
  const int n = cfg.grid;
  const Eigen::Index m = curve.chart(last).dim();
  DifferentialMatrix d;
  d.matrix.resize(m, n + 1);
  d.matrix.col(0) = curve.field_coords(*frame.x1, last);
  for (int j = 0; j < n; ++j) {
    std::size_t i = static_cast<std::size_t>(j) + 1;
    d.matrix.col(j + 1) = curve.transfer(i, last) * curve.field_coords(*frame.x2, i);
    d.times.push_back(curve.time(i));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.matrix);
  d.singular_values = svd.singularValues();
  const double top = d.singular_values.size() ? d.singular_values(0) : 0.0;
  for (Eigen::Index k = 0; k < d.singular_values.size(); ++k)
    if (d.singular_values(k) > cfg.rank_tol * top) ++d.rank;
  d.underresolved = n + 1 < m;
  return d;
}

}  // namespace

DifferentialMatrix differential_matrix(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg) {
  check_horizon(s, cfg);
  return differential_from(frame, grid_curve(frame, s, cfg), cfg);
}

AbnormalData abnormal_covector(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg) {
  check_horizon(s, cfg);
  CurveSamples curve = grid_curve(frame, s, cfg);
  DifferentialMatrix d = differential_from(frame, curve, cfg);
  const Eigen::Index m = d.matrix.rows();
  AbnormalData a;
  a.s = s;
  a.corank = static_cast<int>(m) - d.rank;
  a.singular_values = d.singular_values;
  a.underresolved = d.underresolved;
  if (a.corank == 0)
    throw HypothesisError("corank", "the endpoint differential is surjective at s = " + std::to_string(s) +
                                        "; the reference curve is not singular");
  if (a.corank >= 2)
    throw HypothesisError("corank", "corank " + std::to_string(a.corank) + " at s = " + std::to_string(s) +
                                        " is outside the corank-one setting");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.matrix, Eigen::ComputeFullU);
  a.lambda = svd.matrixU().col(m - 1).normalized();

  FieldPtr y = bracket(frame.x1, frame.x2, cfg.numerics.diff);
  FieldPtr w = bracket(y, frame.x2, cfg.numerics.diff);
  const std::size_t last = curve.size() - 1;
  std::vector<double> legendre(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    Eigen::VectorXd eta = curve.transfer(i, last).transpose() * a.lambda;
    a.goh_residual = std::max(a.goh_residual, std::abs(eta.dot(curve.field_coords(*y, i))));
    legendre[i] = eta.dot(curve.field_coords(*w, i));
    double ann = std::max(std::abs(eta.dot(curve.field_coords(*frame.x1, i))),
                          std::abs(eta.dot(curve.field_coords(*frame.x2, i))));
    a.annihilation_residual = std::max(a.annihilation_residual, ann);
    a.eta_times.push_back(curve.time(i));
    a.eta.push_back(std::move(eta));
  }
  double sign = legendre[0] < 0.0 ? -1.0 : 1.0;
  if (sign < 0.0) {
    a.lambda = -a.lambda;
    for (auto& e : a.eta) e = -e;
  }
  a.legendre_min = std::numeric_limits<double>::infinity();
  for (double l : legendre) a.legendre_min = std::min(a.legendre_min, sign * l);
  a.eta0 = a.eta.front();
  return a;
}

double strictness_check(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg) {
  check_horizon(s, cfg);
  DifferentialMatrix d = differential_matrix(frame, s, cfg);
  const Eigen::Index m = d.matrix.rows();
  const Eigen::Index cols = d.matrix.cols();
  Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(m + 1, cols);
  ext.topRows(m) = d.matrix;
  ext(m, 0) = 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ext, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cfg.rank_tol * sv(0)) ++rank;
  double acc = 0.0;
  for (Eigen::Index k = rank; k < m + 1; ++k) acc += svd.matrixU()(m, k) * svd.matrixU()(m, k);
  return std::sqrt(acc);
}

double j_projection(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg) {
  check_horizon(s, cfg);
  DifferentialMatrix d = differential_matrix(frame, s, cfg);
  const int n = cfg.grid;
  const Eigen::Index m = d.matrix.rows();
  const double rh = std::sqrt(s / n);
  // L2-orthonormal control coordinates: first n entries v1, last n entries v2
  Eigen::MatrixXd op(m, 2 * n);
  for (int j = 0; j < n; ++j) {
    op.col(j) = d.matrix.col(0) * rh;
    op.col(n + j) = d.matrix.col(j + 1) * rh;
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * n);
  grad.head(n).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(op, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd proj = grad;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cfg.rank_tol * sv(0)) {
      Eigen::VectorXd v = svd.matrixV().col(k);
      proj -= v * v.dot(grad);
    }
  return proj.norm();
}

HypothesisReport check_hypotheses(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg) {
  HypothesisReport r;
  r.s = s;
  DifferentialMatrix d = differential_matrix(frame, s, cfg);
  r.corank = static_cast<int>(d.matrix.rows()) - d.rank;
  r.strictness_residual = strictness_check(frame, s, cfg);
  r.j_projection_norm = j_projection(frame, s, cfg);
  if (r.corank != 1) {
    r.goh_residual = std::numeric_limits<double>::quiet_NaN();
    r.legendre_min = std::numeric_limits<double>::quiet_NaN();
    r.failed_check = "corank";
    return r;
  }
  AbnormalData a = abnormal_covector(frame, s, cfg);
  r.goh_residual = a.goh_residual;
  r.legendre_min = a.legendre_min;
  if (!(r.goh_residual < cfg.goh_tol)) r.failed_check = "goh";
  else if (!(r.legendre_min > 0.0)) r.failed_check = "legendre";
  else if (!(r.strictness_residual < cfg.strictness_tol)) r.failed_check = "strictness";
  else if (!(r.j_projection_norm > cfg.j_projection_min)) r.failed_check = "j_projection";
  return r;
}

namespace {
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
}  // namespace

nlohmann::json to_json(const AbnormalData& a) {
  return {{"s", a.s},
          {"corank", a.corank},
          {"lambda", std::vector<double>(a.lambda.data(), a.lambda.data() + a.lambda.size())},
          {"singular_values",
           std::vector<double>(a.singular_values.data(), a.singular_values.data() + a.singular_values.size())},
          {"goh_residual", num(a.goh_residual)},
          {"legendre_min", num(a.legendre_min)},
          {"annihilation_residual", num(a.annihilation_residual)},
          {"underresolved", a.underresolved}};
}

nlohmann::json to_json(const HypothesisReport& r) {
  nlohmann::json j{{"s", r.s},
                   {"corank", r.corank},
                   {"goh_residual", num(r.goh_residual)},
                   {"legendre_min", num(r.legendre_min)},
                   {"strictness_residual", num(r.strictness_residual)},
                   {"j_projection_norm", num(r.j_projection_norm)},
                   {"hypotheses_hold", r.failed_check.empty()}};
  if (!r.failed_check.empty()) j["failed_check"] = r.failed_check;
  return j;
}

}  // namespace sgc
