#include "sgc/vfcore/frame.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "sgc/vfcore/expr.hpp"

namespace sgc {

using json = nlohmann::json;

TangentChart::TangentChart(Eigen::MatrixXd frame) : e_(std::move(frame)) {
  pinv_ = e_.completeOrthogonalDecomposition().pseudoInverse();
}

Eigen::VectorXd TangentChart::coords(const Eigen::VectorXd& v) const { return pinv_ * v; }
Eigen::MatrixXd TangentChart::coords(const Eigen::MatrixXd& v) const { return pinv_ * v; }
Eigen::VectorXd TangentChart::ambient_covector(const Eigen::VectorXd& lambda) const {
  return pinv_.transpose() * lambda;
}

TangentChart chart_at(const ManifoldFrame& frame, const Eigen::VectorXd& x) {
  return TangentChart(frame.tangent_frame(x));
}

Eigen::VectorXd tangent_coordinates(const ManifoldFrame& frame, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  return chart_at(frame, x).coords(v);
}

FrameCheck check_frame(const ManifoldFrame& frame, const Eigen::VectorXd& x, double tol) {
  FrameCheck c;
  Eigen::MatrixXd e = frame.tangent_frame(x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  const auto& sv = svd.singularValues();
  c.frame_min_singular = sv(0) > 0 ? sv(sv.size() - 1) / sv(0) : 0.0;
  TangentChart chart(e);
  Eigen::MatrixXd xs(x.size(), 2);
  xs.col(0) = (*frame.x1)(x);
  xs.col(1) = (*frame.x2)(x);
  Eigen::MatrixXd coords = chart.coords(xs);
  for (int j = 0; j < 2; ++j) {
    double nrm = xs.col(j).norm();
    double res = (xs.col(j) - e * coords.col(j)).norm();
    c.tangency_residual = std::max(c.tangency_residual, nrm > 0 ? res / nrm : res);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> s2(coords);
  const auto& sv2 = s2.singularValues();
  c.independence = sv2(0) > 0 ? sv2(1) / sv2(0) : 0.0;
  c.ok = c.frame_min_singular > tol && c.tangency_residual < std::sqrt(tol) && c.independence > tol;
  return c;
}

namespace {

// Left-invariant field (R, theta) -> (R A, a) on SO(3) x R, R stored row-major.
class LeftInvariantField final : public TemplatedField<LeftInvariantField> {
 public:
  LeftInvariantField(Eigen::Matrix3d a, double theta_rate, std::string name)
      : a_(std::move(a)), rate_(theta_rate), name_(std::move(name)) {}
  std::size_t dim() const override { return 10; }
  int dual_capacity() const override { return kMaxDualDepth; }
  std::string describe() const override { return name_; }

  template <class T>
  void apply(std::span<const T> x, std::span<T> out) const {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T acc(0.0);
        for (int k = 0; k < 3; ++k)
          if (a_(k, j) != 0.0) acc += x[static_cast<std::size_t>(3 * i + k)] * a_(k, j);
        out[static_cast<std::size_t>(3 * i + j)] = acc;
      }
    out[9] = T(rate_);
  }

  const Eigen::Matrix3d& matrix() const { return a_; }
  double rate() const { return rate_; }

 private:
  Eigen::Matrix3d a_;
  double rate_;
  std::string name_;
};

std::array<Eigen::Matrix3d, 3> so3_basis() {
  std::array<Eigen::Matrix3d, 3> t;
  for (int i = 0; i < 3; ++i) {
    t[static_cast<std::size_t>(i)].setZero();
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        // (T_i)_{jk} = -eps_{ijk}
        int eps = (i - j) * (j - k) * (k - i) / 2;
        t[static_cast<std::size_t>(i)](j, k) = -eps;
      }
  }
  return t;
}

Eigen::MatrixXd so3r_tangent_frame(const Eigen::VectorXd& x) {
  static const auto t = so3_basis();
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(3 * i + j);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(10, 4);
  for (int c = 0; c < 3; ++c) {
    Eigen::Matrix3d rt = r * t[static_cast<std::size_t>(c)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) e(3 * i + j, c) = rt(i, j);
  }
  e(9, 3) = 1.0;
  return e;
}

Eigen::MatrixXd identity_frame(const Eigen::VectorXd& x) {
  return Eigen::MatrixXd::Identity(x.size(), x.size());
}

struct EngelData {
  Eigen::Matrix3d a1, a2;
  double r1, r2;
};

EngelData engel_data() {
  auto t = so3_basis();
  const double c = 1.0 / std::numbers::sqrt2;
  return {(t[0] + t[1]) * c, t[0] * c, 2.0 * c, c};
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> left_invariant_strings(const Eigen::Matrix3d& a, double rate) {
  std::vector<std::string> comps;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::string s;
      for (int k = 0; k < 3; ++k) {
        double c = a(k, j);
        if (c == 0.0) continue;
        std::string term = number(std::abs(c)) + "*x" + std::to_string(3 * i + k + 1);
        if (s.empty()) s = c < 0 ? "-" + term : term;
        else s += (c < 0 ? " - " : " + ") + term;
      }
      comps.push_back(s.empty() ? "0" : s);
    }
  comps.push_back(number(rate));
  return comps;
}

ManifoldFrame make_engel() {
  auto d = engel_data();
  ManifoldFrame f;
  f.ambient_dim = 10;
  f.intrinsic_dim = 4;
  f.x1 = std::make_shared<LeftInvariantField>(d.a1, d.r1, "X1");
  f.x2 = std::make_shared<LeftInvariantField>(d.a2, d.r2, "X2");
  f.tangent_frame = so3r_tangent_frame;
  f.base_point = Eigen::VectorXd::Zero(10);
  f.base_point(0) = f.base_point(4) = f.base_point(8) = 1.0;
  f.label = "engel-so3r";
  return f;
}

json martinet_json() {
  return json{{"label", "martinet"},
              {"ambient_dim", 3},
              {"fields", {{"X1", {"0", "1", "x1*x1"}}, {"X2", {"1", "0", "0"}}}},
              {"base_point", {0.0, 0.0, 0.0}},
              {"tangent_frame", "identity"}};
}

json heisenberg_json() {
  return json{{"label", "heisenberg"},
              {"ambient_dim", 3},
              {"fields", {{"X1", {"1", "0", "-0.5*x2"}}, {"X2", {"0", "1", "0.5*x1"}}}},
              {"base_point", {0.0, 0.0, 0.0}},
              {"tangent_frame", "identity"}};
}

std::string strip_builtin_prefix(const std::string& s) {
  const std::string prefix = "builtin:";
  return s.rfind(prefix, 0) == 0 ? s.substr(prefix.size()) : s;
}

}  // namespace

std::vector<std::string> builtin_frame_names() { return {"engel-so3r", "martinet", "heisenberg"}; }

ManifoldFrame builtin_frame(std::string_view name) {
  if (name == "engel-so3r") return make_engel();
  if (name == "martinet") return frame_from_json(martinet_json());
  if (name == "heisenberg") return frame_from_json(heisenberg_json());
  throw ConfigError("unknown builtin frame '" + std::string(name) + "'");
}

json builtin_frame_json(std::string_view name) {
  if (name == "martinet") return martinet_json();
  if (name == "heisenberg") return heisenberg_json();
  if (name != "engel-so3r") throw ConfigError("unknown builtin frame '" + std::string(name) + "'");
  auto d = engel_data();
  auto f = make_engel();
  return json{{"label", "engel-so3r"},
              {"ambient_dim", 10},
              {"fields", {{"X1", left_invariant_strings(d.a1, d.r1)}, {"X2", left_invariant_strings(d.a2, d.r2)}}},
              {"base_point", std::vector<double>(f.base_point.data(), f.base_point.data() + 10)},
              {"tangent_frame", "builtin:engel-so3r"}};
}

ManifoldFrame frame_from_json(const json& j) {
  try {
    ManifoldFrame f;
    f.ambient_dim = j.at("ambient_dim").get<std::size_t>();
    if (f.ambient_dim < 2) throw ConfigError("ambient_dim must be at least 2");
    const auto& fields = j.at("fields");
    auto load_field = [&](const char* key) {
      auto comps = fields.at(key).get<std::vector<std::string>>();
      if (comps.size() != f.ambient_dim)
        throw ConfigError(std::string("field ") + key + " has " + std::to_string(comps.size()) +
                          " components, expected " + std::to_string(f.ambient_dim));
      return ExpressionField::parse(comps, key);
    };
    f.x1 = load_field("X1");
    f.x2 = load_field("X2");
    auto bp = j.at("base_point").get<std::vector<double>>();
    if (bp.size() != f.ambient_dim) throw ConfigError("base_point has the wrong dimension");
    f.base_point = Eigen::Map<Eigen::VectorXd>(bp.data(), static_cast<Eigen::Index>(bp.size()));
    std::string tf = j.value("tangent_frame", std::string("identity"));
    if (tf == "identity") {
      f.tangent_frame = identity_frame;
      f.intrinsic_dim = f.ambient_dim;
    } else if (tf.rfind("builtin:", 0) == 0) {
      auto b = builtin_frame(strip_builtin_prefix(tf));
      if (b.ambient_dim != f.ambient_dim) throw ConfigError("tangent frame '" + tf + "' has a different ambient dimension");
      f.tangent_frame = b.tangent_frame;
      f.intrinsic_dim = b.intrinsic_dim;
    } else {
      throw ConfigError("unknown tangent_frame '" + tf + "'");
    }
    f.label = j.value("label", std::string("custom"));
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid frame definition: ") + e.what());
  }
}

ManifoldFrame load_frame(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open frame file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("frame file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  auto f = frame_from_json(j);
  if (!j.contains("label")) f.label = path.stem().string();
  return f;
}

ManifoldFrame resolve_frame(const std::string& source) {
  std::string name = strip_builtin_prefix(source);
  for (const auto& b : builtin_frame_names())
    if (b == name) return builtin_frame(name);
  if (source.rfind("builtin:", 0) == 0) throw ConfigError("unknown builtin frame '" + name + "'");
  return load_frame(source);
}

}  // namespace sgc
