#include "sgc/flow/flow.hpp"

#include <algorithm>
#include <ostream>

namespace sgc {

namespace {

// y = (x, columns c_1..c_k); x' = X1(x), c_j' = DX1(x) c_j.
template <class T>
struct VariationalRhs {
  const VectorField& f;
  std::size_t n;
  std::size_t k;
  DiffConfig diff;

  void operator()(double, const std::vector<T>& y, std::vector<T>& dy) const {
    std::span<const T> x(y.data(), n);
    f.eval(x, std::span<T>(dy.data(), n));
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t off = n * (c + 1);
      directional_derivative<T>(f, x, std::span<const T>(y.data() + off, n), std::span<T>(dy.data() + off, n), diff);
    }
  }
};

template <class T>
void integrate_variational(const VectorField& f, std::vector<T>& y, std::size_t n, double t0, double t1,
                           const NumericsConfig& cfg, double horizon) {
  VariationalRhs<T> rhs{f, n, y.size() / n - 1, cfg.diff};
  integrate<T>(rhs, t0, t1, y, cfg.integrator, horizon);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v, std::size_t off, std::size_t n) {
  return Eigen::Map<const Eigen::VectorXd>(v.data() + off, static_cast<Eigen::Index>(n));
}

// Ambient transport matrix: J(t1) for J(t0) = j0, integrating from gamma-point x at t0.
Eigen::MatrixXd carry(const ManifoldFrame& frame, const Eigen::VectorXd& x, const Eigen::MatrixXd& j0, double duration,
                      const NumericsConfig& cfg, Eigen::VectorXd* end_point) {
  const std::size_t n = frame.ambient_dim;
  const std::size_t k = static_cast<std::size_t>(j0.cols());
  std::vector<double> y(n * (k + 1));
  std::copy(x.data(), x.data() + n, y.begin());
  for (std::size_t c = 0; c < k; ++c)
    std::copy(j0.col(static_cast<Eigen::Index>(c)).data(), j0.col(static_cast<Eigen::Index>(c)).data() + n,
              y.begin() + static_cast<std::ptrdiff_t>(n * (c + 1)));
  integrate_variational<double>(*frame.x1, y, n, 0.0, duration, cfg, std::abs(duration));
  if (end_point) *end_point = to_eigen(y, 0, n);
  Eigen::MatrixXd out(n, k);
  for (std::size_t c = 0; c < k; ++c) out.col(static_cast<Eigen::Index>(c)) = to_eigen(y, n * (c + 1), n);
  return out;
}

// Tangent-coordinate transport matrix from gamma(t0) to gamma(t1).
Eigen::MatrixXd transport_matrix(const ManifoldFrame& frame, double t0, double t1, const NumericsConfig& cfg) {
  Eigen::VectorXd x0 = flow_x1(frame, frame.base_point, t0, cfg);
  TangentChart c0 = chart_at(frame, x0);
  Eigen::VectorXd x1;
  Eigen::MatrixXd j = carry(frame, x0, c0.frame(), t1 - t0, cfg, &x1);
  return chart_at(frame, x1).coords(j);
}

class PushforwardField final : public TemplatedField<PushforwardField> {
 public:
  PushforwardField(const ManifoldFrame& frame, FieldPtr z, double sigma, NumericsConfig cfg)
      : x1_(frame.x1), z_(std::move(z)), sigma_(sigma), cfg_(cfg) {}

  std::size_t dim() const override { return x1_->dim(); }
  int dual_capacity() const override {
    if (cfg_.diff.mode != DiffMode::Dual) return 0;
    return std::max(0, std::min(x1_->dual_capacity() - 1, z_->dual_capacity()));
  }
  std::string describe() const override { return "pushforward(" + z_->describe() + ")"; }

  template <class T>
  void apply(std::span<const T> x, std::span<T> out) const {
    const std::size_t n = x.size();
    std::vector<T> y(x.begin(), x.end());
    const double horizon = std::abs(sigma_);
    if (sigma_ != 0.0) integrate_variational<T>(*x1_, y, n, 0.0, -sigma_, cfg_, horizon);
    y.resize(2 * n);
    z_->eval(std::span<const T>(y.data(), n), std::span<T>(y.data() + n, n));
    if (sigma_ != 0.0) integrate_variational<T>(*x1_, y, n, 0.0, sigma_, cfg_, horizon);
    for (std::size_t i = 0; i < n; ++i) out[i] = y[n + i];
  }

 private:
  FieldPtr x1_, z_;
  double sigma_;
  NumericsConfig cfg_;
};

}  // namespace

Eigen::VectorXd flow_x1(const ManifoldFrame& frame, const Eigen::VectorXd& x, double t, const NumericsConfig& cfg) {
  std::vector<double> y = to_std(x);
  integrate_variational<double>(*frame.x1, y, frame.ambient_dim, 0.0, t, cfg, std::abs(t));
  return to_eigen(y, 0, frame.ambient_dim);
}

Eigen::VectorXd endpoint(const ManifoldFrame& frame, const Control& v, const NumericsConfig& cfg) {
  v.validate();
  const std::size_t n = frame.ambient_dim;
  std::vector<double> y = to_std(frame.base_point);
  std::vector<double> a(n), b(n);
  for (std::size_t k = 0; k < v.pieces(); ++k) {
    const double u1 = 1.0 + v.v1[k], u2 = v.v2[k];
    auto rhs = [&](double, const std::vector<double>& s, std::vector<double>& ds) {
      frame.x1->eval(std::span<const double>(s), std::span<double>(a));
      frame.x2->eval(std::span<const double>(s), std::span<double>(b));
      for (std::size_t i = 0; i < n; ++i) ds[i] = u1 * a[i] + u2 * b[i];
    };
    integrate<double>(rhs, v.knots[k], v.knots[k + 1], y, cfg.integrator, v.horizon());
  }
  return to_eigen(y, 0, n);
}

void write_trajectory_csv(const ManifoldFrame& frame, const Control& v, int samples, std::ostream& out,
                          const NumericsConfig& cfg) {
  if (samples < 1) throw ConfigError("trajectory needs at least one sample interval");
  out << "t";
  for (std::size_t i = 1; i <= frame.ambient_dim; ++i) out << ",x" << i;
  out << "\n";
  out.precision(12);
  for (int i = 0; i <= samples; ++i) {
    double t = v.horizon() * i / samples;
    Eigen::VectorXd p = frame.base_point;
    if (t > 0) {
      Control part;
      std::size_t k = v.piece_at(t);
      part.knots.assign(v.knots.begin(), v.knots.begin() + static_cast<std::ptrdiff_t>(k + 1));
      part.knots.push_back(t);
      part.v1.assign(v.v1.begin(), v.v1.begin() + static_cast<std::ptrdiff_t>(k + 1));
      part.v2.assign(v.v2.begin(), v.v2.begin() + static_cast<std::ptrdiff_t>(k + 1));
      if (part.knots[k + 1] <= part.knots[k]) {
        part.knots.erase(part.knots.begin() + static_cast<std::ptrdiff_t>(k + 1));
        part.v1.pop_back();
        part.v2.pop_back();
      }
      p = endpoint(frame, part, cfg);
    }
    out << t;
    for (Eigen::Index j = 0; j < p.size(); ++j) out << "," << p(j);
    out << "\n";
  }
}

Eigen::VectorXd transport(const ManifoldFrame& frame, double t0, double t1, const Eigen::VectorXd& vec,
                          const NumericsConfig& cfg) {
  Eigen::VectorXd x0 = flow_x1(frame, frame.base_point, t0, cfg);
  TangentChart c0 = chart_at(frame, x0);
  Eigen::VectorXd x1;
  Eigen::MatrixXd j = carry(frame, x0, c0.frame() * vec, t1 - t0, cfg, &x1);
  return chart_at(frame, x1).coords(Eigen::VectorXd(j.col(0)));
}

Eigen::VectorXd cotransport(const ManifoldFrame& frame, double t0, double t1, const Eigen::VectorXd& covec,
                            const NumericsConfig& cfg) {
  Eigen::MatrixXd a = transport_matrix(frame, t0, t1, cfg);
  return a.transpose().partialPivLu().solve(covec);
}

FieldPtr pushforward_field(const ManifoldFrame& frame, FieldPtr z, double tau, double t, const NumericsConfig& cfg) {
  return std::make_shared<PushforwardField>(frame, std::move(z), t - tau, cfg);
}

CurveSamples::CurveSamples(const ManifoldFrame& frame, std::vector<double> times, const NumericsConfig& cfg)
    : times_(std::move(times)) {
  if (times_.empty()) throw ConfigError("curve sampling needs at least one time");
  if (!std::is_sorted(times_.begin(), times_.end()) || times_.front() < 0.0)
    throw ConfigError("curve sample times must be ascending and non-negative");
  const std::size_t n = frame.ambient_dim;
  const double horizon = times_.back();
  TangentChart c0 = chart_at(frame, frame.base_point);
  const std::size_t m = static_cast<std::size_t>(c0.dim());
  std::vector<double> y(n * (m + 1));
  std::copy(frame.base_point.data(), frame.base_point.data() + n, y.begin());
  for (std::size_t c = 0; c < m; ++c) {
    auto col = c0.frame().col(static_cast<Eigen::Index>(c));
    std::copy(col.data(), col.data() + n, y.begin() + static_cast<std::ptrdiff_t>(n * (c + 1)));
  }
  double t = 0.0;
  points_.reserve(times_.size());
  for (double ti : times_) {
    integrate_variational<double>(*frame.x1, y, n, t, ti, cfg, horizon);
    t = ti;
    Eigen::VectorXd p = to_eigen(y, 0, n);
    Eigen::MatrixXd pm(n, m);
    for (std::size_t c = 0; c < m; ++c) pm.col(static_cast<Eigen::Index>(c)) = to_eigen(y, n * (c + 1), n);
    charts_.push_back(chart_at(frame, p));
    flow_.push_back(charts_.back().coords(pm));
    flow_lu_.emplace_back(flow_.back());
    points_.push_back(std::move(p));
  }
}

Eigen::MatrixXd CurveSamples::transfer(std::size_t i, std::size_t j) const {
  // F_j F_i^{-1} = (F_i^{-T} F_j^T)^T
  Eigen::MatrixXd ft = flow_lu_[i].transpose().solve(flow_[j].transpose());
  return ft.transpose();
}

Eigen::VectorXd CurveSamples::field_coords(const VectorField& f, std::size_t i) const {
  return charts_[i].coords(f(points_[i]));
}

PushforwardJets pushforward_jets(const ManifoldFrame& frame, const std::vector<FieldPtr>& fields,
                                 std::vector<double> times, const NumericsConfig& cfg) {
  if (!std::is_sorted(times.begin(), times.end()) || times.empty() || times.front() < 0.0)
    throw ConfigError("jet times must be ascending and non-negative");
  const std::size_t n = frame.ambient_dim;
  const auto ni = static_cast<Eigen::Index>(n);
  const double horizon = times.back();
  TangentChart chart0 = chart_at(frame, frame.base_point);
  const Eigen::Index m = chart0.dim();

  PushforwardJets jets;
  jets.times = times;
  jets.frame0 = chart0.frame();
  jets.coords.assign(fields.size(), std::vector<Eigen::VectorXd>(times.size()));
  jets.jacobian.assign(fields.size(), std::vector<Eigen::MatrixXd>(times.size(), Eigen::MatrixXd::Zero(ni, m)));

  bool use_dual = cfg.diff.mode == DiffMode::Dual && frame.x1->dual_capacity() >= 2;
  for (const auto& f : fields) use_dual = use_dual && f->dual_capacity() >= 1;

  if (use_dual) {
    std::vector<D1> y(n * (n + 1)), zv(n);
    for (Eigen::Index dir = 0; dir < m; ++dir) {
      for (std::size_t i = 0; i < n; ++i) y[i] = D1(frame.base_point(static_cast<Eigen::Index>(i)), chart0.frame()(static_cast<Eigen::Index>(i), dir));
      for (std::size_t i = n; i < y.size(); ++i) y[i] = D1(0.0);
      for (std::size_t c = 0; c < n; ++c) y[n * (c + 1) + c] = D1(1.0);
      double t = 0.0;
      Eigen::MatrixXd m0(ni, ni), m1(ni, ni);
      Eigen::VectorXd z0(ni), z1(ni);
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        integrate_variational<D1>(*frame.x1, y, n, t, times[ti], cfg, horizon);
        t = times[ti];
        for (std::size_t c = 0; c < n; ++c)
          for (std::size_t r = 0; r < n; ++r) {
            m0(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = y[n * (c + 1) + r].v;
            m1(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = y[n * (c + 1) + r].d;
          }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(m0);
        for (std::size_t fi = 0; fi < fields.size(); ++fi) {
          fields[fi]->eval(std::span<const D1>(y.data(), n), std::span<D1>(zv));
          for (std::size_t r = 0; r < n; ++r) {
            z0(static_cast<Eigen::Index>(r)) = zv[r].v;
            z1(static_cast<Eigen::Index>(r)) = zv[r].d;
          }
          Eigen::VectorXd c0 = lu.solve(z0);
          Eigen::VectorXd c1 = lu.solve(z1 - m1 * c0);
          if (dir == 0) jets.coords[fi][ti] = chart0.coords(c0);
          jets.jacobian[fi][ti].col(dir) = c1;
        }
      }
    }
    return jets;
  }

  // finite differences along each tangent direction
  auto sweep = [&](const Eigen::VectorXd& start, std::vector<std::vector<Eigen::VectorXd>>& out) {
    std::vector<double> y(n * (n + 1), 0.0), zv(n);
    std::copy(start.data(), start.data() + n, y.begin());
    for (std::size_t c = 0; c < n; ++c) y[n * (c + 1) + c] = 1.0;
    out.assign(fields.size(), std::vector<Eigen::VectorXd>(times.size()));
    double t = 0.0;
    Eigen::MatrixXd m0(ni, ni);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      integrate_variational<double>(*frame.x1, y, n, t, times[ti], cfg, horizon);
      t = times[ti];
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) m0(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = y[n * (c + 1) + r];
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(m0);
      for (std::size_t fi = 0; fi < fields.size(); ++fi) {
        fields[fi]->eval(std::span<const double>(y.data(), n), std::span<double>(zv));
        out[fi][ti] = lu.solve(Eigen::Map<const Eigen::VectorXd>(zv.data(), ni));
      }
    }
  };
  std::vector<std::vector<Eigen::VectorXd>> center, plus, minus;
  sweep(frame.base_point, center);
  for (std::size_t fi = 0; fi < fields.size(); ++fi)
    for (std::size_t ti = 0; ti < times.size(); ++ti) jets.coords[fi][ti] = chart0.coords(center[fi][ti]);
  std::span<const double> bp(frame.base_point.data(), n);
  for (Eigen::Index dir = 0; dir < m; ++dir) {
    Eigen::VectorXd e = chart0.frame().col(dir);
    double eps = fd_displacement(bp, cfg.diff) / e.norm();
    sweep(frame.base_point + eps * e, plus);
    sweep(frame.base_point - eps * e, minus);
    for (std::size_t fi = 0; fi < fields.size(); ++fi)
      for (std::size_t ti = 0; ti < times.size(); ++ti)
        jets.jacobian[fi][ti].col(dir) = (plus[fi][ti] - minus[fi][ti]) / (2.0 * eps);
  }
  return jets;
}

}  // namespace sgc
