#include "sgc/jacobi/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgc/vfcore/bracket.hpp"

namespace sgc {

namespace {

int structural_order(const ManifoldFrame& frame) {
  const int m = static_cast<int>(frame.intrinsic_dim) - 2;
  if (m < 2)
    throw HypothesisError("dimension", "Jacobi analysis needs intrinsic dimension at least 4, got " +
                                           std::to_string(frame.intrinsic_dim));
  return m;
}

struct BracketSet {
  std::vector<FieldPtr> ad;   // (ad X1)^i X2, i = 0..m
  FieldPtr w;                 // [[X1,X2],X2]
  std::vector<FieldPtr> lj;   // [(ad X1) X2, (ad X1)^j X2], j = 0..m-1 (entries 0, 1 unused)
};

BracketSet make_brackets(const ManifoldFrame& frame, int m, const DiffConfig& diff) {
  BracketSet b;
  b.ad = ad_chain(frame.x1, frame.x2, m, diff);
  b.w = bracket(b.ad[1], frame.x2, diff);
  b.lj.resize(static_cast<std::size_t>(m));
  for (int j = 2; j < m; ++j) b.lj[static_cast<std::size_t>(j)] = bracket(b.ad[1], b.ad[static_cast<std::size_t>(j)], diff);
  return b;
}

struct PointStructure {
  double beta = 0.0;
  Eigen::VectorXd alpha;
  double residual = 0.0;
  double independence = 0.0;
  double transversality = 0.0;
};

double rel_min_singular(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  return sv(0) > 0 ? sv(sv.size() - 1) / sv(0) : 0.0;
}

PointStructure structure_at(const Eigen::VectorXd& x1, const std::vector<Eigen::VectorXd>& ad, const Eigen::VectorXd& w,
                            int m) {
  const Eigen::Index dim = x1.size();
  Eigen::MatrixXd v(dim, m + 1);
  v.col(0) = x1;
  for (int i = 0; i < m; ++i) v.col(i + 1) = ad[static_cast<std::size_t>(i)];
  const Eigen::VectorXd& target = ad[static_cast<std::size_t>(m)];
  Eigen::VectorXd coef = v.colPivHouseholderQr().solve(target);
  PointStructure p;
  p.beta = coef(0);
  p.alpha = coef.tail(m);
  double tn = target.norm();
  p.residual = (v * coef - target).norm() / (tn > 0 ? tn : 1.0);
  p.independence = rel_min_singular(v);
  Eigen::MatrixXd vw(dim, m + 2);
  vw << v, w;
  p.transversality = rel_min_singular(vw);
  return p;
}

// Brackets in tangent coordinates along a sampled curve.
struct Sampled {
  CurveSamples curve;
  int m;
  std::vector<Eigen::VectorXd> x1, w;
  std::vector<std::vector<Eigen::VectorXd>> ad;   // [sample][i]
  std::vector<std::vector<Eigen::VectorXd>> lj;   // [sample][j]
  std::vector<PointStructure> st;
};

Sampled sample_brackets(const ManifoldFrame& frame, std::vector<double> times, const AnalysisConfig& cfg,
                        bool need_lj) {
  const int m = structural_order(frame);
  BracketSet b = make_brackets(frame, m, cfg.numerics.diff);
  Sampled out{CurveSamples(frame, std::move(times), cfg.numerics), m, {}, {}, {}, {}, {}};
  const std::size_t n = out.curve.size();
  out.x1.resize(n);
  out.w.resize(n);
  out.ad.resize(n);
  out.lj.resize(n);
  out.st.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.x1[i] = out.curve.field_coords(*frame.x1, i);
    out.w[i] = out.curve.field_coords(*b.w, i);
    for (int k = 0; k <= m; ++k) out.ad[i].push_back(out.curve.field_coords(*b.ad[static_cast<std::size_t>(k)], i));
    out.lj[i].resize(static_cast<std::size_t>(m));
    if (need_lj)
      for (int j = 2; j < m; ++j)
        out.lj[i][static_cast<std::size_t>(j)] = out.curve.field_coords(*b.lj[static_cast<std::size_t>(j)], i);
    out.st[i] = structure_at(out.x1[i], out.ad[i], out.w[i], m);
  }
  return out;
}

std::vector<double> uniform_times(double s, int intervals) {
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) t[static_cast<std::size_t>(i)] = s * i / intervals;
  t.back() = s;
  return t;
}

// Orthonormal complement of the columns of c, oriented so det[c, basis] > 0.
Eigen::MatrixXd oriented_complement(const Eigen::MatrixXd& c) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU);
  const Eigen::Index r = c.cols();
  Eigen::MatrixXd basis = svd.matrixU().rightCols(c.rows() - r);
  Eigen::MatrixXd full(c.rows(), c.rows());
  full << c, basis;
  if (full.determinant() < 0) basis.col(0) = -basis.col(0);
  return basis;
}

}  // namespace

StructuralFunctions structural_functions(const ManifoldFrame& frame, const std::vector<double>& t_grid,
                                         const AnalysisConfig& cfg) {
  Sampled smp = sample_brackets(frame, t_grid, cfg, false);
  StructuralFunctions sf;
  sf.order = smp.m;
  sf.t = t_grid;
  sf.alpha.resize(smp.m, static_cast<Eigen::Index>(t_grid.size()));
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const auto& p = smp.st[i];
    sf.beta.push_back(p.beta);
    sf.alpha.col(static_cast<Eigen::Index>(i)) = p.alpha;
    sf.residual.push_back(p.residual);
    sf.independence.push_back(p.independence);
    sf.transversality.push_back(p.transversality);
  }
  return sf;
}

ShootingResult shooting_determinant(const ManifoldFrame& frame, double s, ShootingCase which,
                                    const AnalysisConfig& cfg) {
  return shooting_determinant(frame, abnormal_covector(frame, s, cfg), which, cfg);
}

ShootingResult shooting_determinant(const ManifoldFrame& frame, const AbnormalData& abnormal, ShootingCase which,
                                    const AnalysisConfig& cfg) {
  const double s = abnormal.s;
  const int steps = cfg.jacobi_steps;
  if (steps < 1) throw ConfigError("jacobi_steps must be positive");
  Sampled smp = sample_brackets(frame, uniform_times(s, 2 * steps), cfg, true);
  const int m = smp.m;
  const std::size_t last = smp.curve.size() - 1;
  const Eigen::VectorXd& lambda = abnormal.lambda;

  // transfer to gamma(s) and the Legendre coefficients
  std::vector<Eigen::MatrixXd> g(smp.curve.size());
  std::vector<double> l0(smp.curve.size());
  std::vector<Eigen::VectorXd> lcoef(smp.curve.size(), Eigen::VectorXd::Zero(m));
  ShootingResult r;
  r.s = s;
  r.legendre_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= last; ++i) {
    g[i] = smp.curve.transfer(i, last);
    Eigen::VectorXd eta = g[i].transpose() * lambda;
    l0[i] = eta.dot(smp.w[i]);
    for (int j = 2; j < m; ++j) lcoef[i](j) = eta.dot(smp.lj[i][static_cast<std::size_t>(j)]);
    r.legendre_min = std::min(r.legendre_min, l0[i]);
  }
  if (!(r.legendre_min > 0.0))
    throw HypothesisError("legendre", "Legendre coefficient vanishes along the curve (min " +
                                          std::to_string(r.legendre_min) + ")");

  // admissible initial covectors at gamma(s)
  const Eigen::VectorXd& x1s = smp.x1[last];
  const Eigen::VectorXd& x2s = smp.ad[last][0];
  Eigen::MatrixXd cons(lambda.size(), which == ShootingCase::Endpoint ? 3 : 2);
  if (which == ShootingCase::Endpoint) cons << x2s, x1s, lambda;
  else cons << x2s, lambda;
  Eigen::MatrixXd theta = oriented_complement(cons);
  const Eigen::Index d = theta.cols();

  // state (z^f, z^1, ..., z^{m-1}), one column per admissible covector
  const int nz = m;
  r.boundary.resize(which == ShootingCase::Endpoint ? m - 1 : m, d);
  double scale = 0.0;
  const double h = s / steps;
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::VectorXd th = theta.col(c);
    const double omega = -th.dot(x1s);
    std::vector<double> zdot(smp.curve.size());
    for (std::size_t i = 0; i <= last; ++i) {
      zdot[i] = -th.dot(g[i] * smp.ad[i][1]);
      double rhs = smp.st[i].beta * omega;
      for (int k = 0; k < m; ++k) rhs += smp.st[i].alpha(k) * (-th.dot(g[i] * smp.ad[i][static_cast<std::size_t>(k)]));
      double lhs = -th.dot(g[i] * smp.ad[i][static_cast<std::size_t>(m)]);
      r.zeta_residual = std::max(r.zeta_residual, std::abs(lhs - rhs));
    }
    auto deriv = [&](std::size_t i, const Eigen::VectorXd& z) {
      Eigen::VectorXd dz(nz);
      const auto& st = smp.st[i];
      const double top = z(nz - 1);
      dz(0) = -st.beta * top;
      double acc = zdot[i];
      for (int j = 2; j < m; ++j) acc += lcoef[i](j) * z(j);
      dz(1) = -st.alpha(1) * top + acc / l0[i];
      for (int j = 2; j < m; ++j) dz(j) = -st.alpha(j) * top - z(j - 1);
      return dz;
    };
    Eigen::VectorXd z = Eigen::VectorXd::Zero(nz);
    for (int k = 0; k < steps; ++k) {
      std::size_t i0 = static_cast<std::size_t>(2 * k);
      Eigen::VectorXd k1 = deriv(i0, z);
      Eigen::VectorXd k2 = deriv(i0 + 1, z + 0.5 * h * k1);
      Eigen::VectorXd k3 = deriv(i0 + 1, z + 0.5 * h * k2);
      Eigen::VectorXd k4 = deriv(i0 + 2, z + h * k3);
      z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      scale = std::max(scale, z.cwiseAbs().maxCoeff());
    }
    if (which == ShootingCase::Endpoint) r.boundary.col(c) = z.tail(m - 1);
    else r.boundary.col(c) = z;
  }
  r.determinant = r.boundary.determinant();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.boundary);
  r.singular_values = svd.singularValues();
  for (Eigen::Index k = 0; k < r.singular_values.size(); ++k)
    if (r.singular_values(k) <= 1e-6 * std::max(scale, 1e-300)) ++r.rank_deficiency;
  return r;
}

double engel_indicator(const ManifoldFrame& frame, double s, ShootingCase which, const AnalysisConfig& cfg) {
  if (frame.intrinsic_dim != 4)
    throw HypothesisError("dimension", "closed-form indicators need intrinsic dimension 4, got " +
                                           std::to_string(frame.intrinsic_dim));
  if (!(s > 0.0)) throw DomainError("horizon s must be positive");
  const int steps = cfg.jacobi_steps;
  Sampled smp = sample_brackets(frame, uniform_times(s, 2 * steps), cfg, false);
  const std::size_t last = smp.curve.size() - 1;
  Eigen::Matrix4d mat;
  const Eigen::VectorXd g0 = smp.curve.transfer(0, last) * smp.ad[0][0];
  if (which == ShootingCase::Endpoint) {
    mat << smp.x1[last], smp.ad[last][0], g0, smp.w[last];
    return mat.determinant();
  }
  // cumulative integral of alpha^1 on the half-step grid
  const double hh = s / (2.0 * steps);
  std::vector<double> a1(smp.curve.size()), cum(smp.curve.size(), 0.0);
  for (std::size_t i = 0; i <= last; ++i) a1[i] = smp.st[i].alpha(1);
  for (std::size_t i = 0; i + 2 <= last; i += 2) {
    cum[i + 1] = cum[i] + hh * (5.0 * a1[i] + 8.0 * a1[i + 1] - a1[i + 2]) / 12.0;
    cum[i + 2] = cum[i] + hh * (a1[i] + 4.0 * a1[i + 1] + a1[i + 2]) / 3.0;
  }
  Eigen::VectorXd integral = Eigen::VectorXd::Zero(4);
  for (std::size_t i = 0; i <= last; ++i) {
    double w = (i == 0 || i == last) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += (w * hh / 3.0) * smp.st[i].beta * std::exp(-cum[i]) * (smp.curve.transfer(i, last) * smp.ad[i][0]);
  }
  mat << smp.ad[last][0], g0, integral, smp.w[last];
  return mat.determinant();
}

std::vector<Zero> locate_zeros(const std::function<double(double)>& f, double lo, double hi, const ZeroScan& opts) {
  if (!(hi > lo) || !(opts.scan_step > 0.0)) throw ConfigError("invalid zero-scan interval or step");
  std::vector<double> xs;
  for (long i = opts.open_lo ? 1 : 0;; ++i) {
    double x = lo + opts.scan_step * static_cast<double>(i);
    if (x >= hi - 1e-12 * std::max(1.0, std::abs(hi))) break;
    xs.push_back(x);
  }
  xs.push_back(hi);
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);
  double top = 0.0;
  for (double v : fs) top = std::max(top, std::abs(v));
  const double thr = opts.magnitude_rel * top;

  std::vector<Zero> zeros;
  auto push = [&](double x, bool tangential) {
    for (const auto& z : zeros)
      if (std::abs(z.s - x) <= std::max(10.0 * opts.tol, 1e-9)) return;
    Zero z;
    z.s = x;
    z.tangential = tangential;
    if (opts.multiplicity) z.multiplicity = std::max(1, opts.multiplicity(x));
    zeros.push_back(z);
  };
  auto bisect = [&](double a, double fa, double b) {
    while (b - a > opts.tol) {
      double mid = 0.5 * (a + b);
      double fm = f(mid);
      if (fm == 0.0) return mid;
      if ((fm < 0) == (fa < 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (fs[i] == 0.0) {
      push(xs[i], false);
      continue;
    }
    if (i + 1 < xs.size() && fs[i + 1] != 0.0 && (fs[i] < 0) != (fs[i + 1] < 0)) {
      push(bisect(xs[i], fs[i], xs[i + 1]), false);
      continue;
    }
    bool interior = i > 0 && i + 1 < xs.size();
    if (interior && std::abs(fs[i]) <= std::abs(fs[i - 1]) &&
        std::abs(fs[i]) <= std::abs(fs[i + 1]) && (fs[i - 1] < 0) == (fs[i] < 0) && (fs[i + 1] < 0) == (fs[i] < 0)) {
      // golden-section search for the touching point
      double a = xs[i - 1], b = xs[i + 1];
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = b - gr * (b - a), d = a + gr * (b - a);
      double fc = std::abs(f(c)), fd = std::abs(f(d));
      while (b - a > opts.tol) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - gr * (b - a);
          fc = std::abs(f(c));
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + gr * (b - a);
          fd = std::abs(f(d));
        }
      }
      double x = 0.5 * (a + b);
      if (std::abs(f(x)) <= thr) push(x, true);
    }
  }
  // near-zero value at the closed right endpoint
  if (std::abs(fs.back()) <= thr) push(xs.back(), false);
  std::sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) { return a.s < b.s; });
  return zeros;
}

}  // namespace sgc
