#include "sgc/hessian/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>

#include "sgc/vfcore/bracket.hpp"

namespace sgc {

const char* variant_name(Variant v) { return v == Variant::Endpoint ? "F" : "Ext"; }

void gauss_legendre(int points, std::vector<double>& nodes, std::vector<double>& weights) {
  if (points < 1) throw ConfigError("quadrature needs at least one point per cell");
  // Golub-Welsch
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(points, points);
  for (int i = 1; i < points; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    jm(i, i - 1) = jm(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
  nodes.resize(static_cast<std::size_t>(points));
  weights.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = 2.0 * v * v;
  }
}

double BracketKernels::kernel_B(std::size_t tau, std::size_t t) const {
  const auto ti = static_cast<Eigen::Index>(t), ta = static_cast<Eigen::Index>(tau);
  return dual.col(ti).dot(gdot.col(ta)) - dual.col(ta).dot(gdot.col(ti));
}

BracketKernels bracket_kernels(const ManifoldFrame& frame, const AbnormalData& abnormal, const AnalysisConfig& cfg) {
  const double s = abnormal.s;
  const int n = cfg.grid;
  const int q = cfg.quad_points;
  if (n < 1) throw ConfigError("grid must have at least one subinterval");
  std::vector<double> xi, wi;
  gauss_legendre(q, xi, wi);
  const double h = s / n;

  // outer nodes, then diagonal sub-nodes, then s
  struct Req {
    double t;
    std::size_t slot;
  };
  std::vector<Req> req;
  const std::size_t n_outer = static_cast<std::size_t>(n) * static_cast<std::size_t>(q);
  const std::size_t n_inner = n_outer * static_cast<std::size_t>(q);
  auto outer_t = [&](int j, int a) { return h * j + 0.5 * h * (xi[static_cast<std::size_t>(a)] + 1.0); };
  auto inner_t = [&](int j, int a, int b) {
    double left = h * j;
    return left + 0.5 * (outer_t(j, a) - left) * (xi[static_cast<std::size_t>(b)] + 1.0);
  };
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < q; ++a) req.push_back({outer_t(j, a), req.size()});
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) req.push_back({inner_t(j, a, b), req.size()});
  req.push_back({s, req.size()});
  std::vector<Req> sorted = req;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Req& x, const Req& y) { return x.t < y.t; });
  std::vector<double> times(sorted.size());
  std::vector<std::size_t> where(req.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    times[i] = sorted[i].t;
    where[sorted[i].slot] = i;
  }

  FieldPtr y = bracket(frame.x1, frame.x2, cfg.numerics.diff);
  PushforwardJets jets = pushforward_jets(frame, {y, frame.x2}, times, cfg.numerics);
  TangentChart chart0(jets.frame0);
  const Eigen::Index m = chart0.dim();
  Eigen::VectorXd mu = chart0.ambient_covector(abnormal.eta0);

  auto ch = [&](std::size_t slot) -> const Eigen::VectorXd& { return jets.coords[0][where[slot]]; };
  auto ck = [&](std::size_t slot) -> const Eigen::VectorXd& { return jets.coords[1][where[slot]]; };
  auto vh = [&](std::size_t slot) -> Eigen::VectorXd { return jets.jacobian[0][where[slot]].transpose() * mu; };
  auto vk = [&](std::size_t slot) -> Eigen::VectorXd { return jets.jacobian[1][where[slot]].transpose() * mu; };

  BracketKernels k;
  k.s = s;
  k.grid = n;
  k.quad_points = q;
  k.covector = abnormal.eta0;
  k.x1_base = chart0.coords((*frame.x1)(frame.base_point));
  const std::size_t end_slot = req.size() - 1;
  k.x2_end = ck(end_slot);
  const Eigen::VectorXd vk_end = vk(end_slot);

  k.l.resize(static_cast<Eigen::Index>(n_outer));
  k.b.resize(static_cast<Eigen::Index>(n_outer));
  k.gdot.resize(m, static_cast<Eigen::Index>(n_outer));
  k.dual.resize(m, static_cast<Eigen::Index>(n_outer));
  for (std::size_t i = 0; i < n_outer; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    Eigen::VectorXd vhi = vh(i);
    k.gdot.col(ii) = ch(i);
    k.dual.col(ii) = vhi;
    k.l(ii) = vk(i).dot(ch(i)) - vhi.dot(ck(i));
    k.b(ii) = vhi.dot(k.x2_end) - vk_end.dot(ch(i));
    k.nodes.push_back(req[i].t);
  }
  const double lmin = k.l.minCoeff();
  if (!(lmin > 0.0))
    throw HypothesisError("legendre", "Legendre quantity is not positive along the curve (min " +
                                          std::to_string(lmin) + ")");

  k.cell_l = Eigen::VectorXd::Zero(n);
  k.cell_b = Eigen::VectorXd::Zero(n);
  k.cell_diag = Eigen::VectorXd::Zero(n);
  k.cell_gdot = Eigen::MatrixXd::Zero(m, n);
  k.cell_dual = Eigen::MatrixXd::Zero(m, n);
  for (int j = 0; j < n; ++j) {
    for (int a = 0; a < q; ++a) {
      const std::size_t oi = static_cast<std::size_t>(j * q + a);
      const double w = 0.5 * h * wi[static_cast<std::size_t>(a)];
      k.weights.push_back(w);
      const auto oe = static_cast<Eigen::Index>(oi);
      k.cell_l(j) += w * k.l(oe);
      k.cell_b(j) += w * k.b(oe);
      k.cell_gdot.col(j) += w * k.gdot.col(oe);
      k.cell_dual.col(j) += w * k.dual.col(oe);
      const double span = req[oi].t - h * j;
      double inner = 0.0;
      for (int b = 0; b < q; ++b) {
        const std::size_t si = n_outer + oi * static_cast<std::size_t>(q) + static_cast<std::size_t>(b);
        const double wb = 0.5 * span * wi[static_cast<std::size_t>(b)];
        inner += wb * (k.dual.col(oe).dot(ch(si)) - vh(si).dot(k.gdot.col(oe)));
      }
      k.cell_diag(j) += w * inner;
    }
  }
  (void)n_inner;
  return k;
}

namespace {

// Orthonormal basis of the orthogonal complement of the columns of v.
Eigen::MatrixXd complement(const Eigen::MatrixXd& v) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * sv(0)) ++r;
  return svd.matrixU().rightCols(v.rows() - r);
}

}  // namespace

SecondVariation assemble_form(const BracketKernels& k, Variant variant) {
  const int n = k.grid;
  const double h = k.s / n;
  const double rh = std::sqrt(h);
  SecondVariation sv;
  sv.variant = variant;
  sv.s = k.s;
  sv.form = Eigen::MatrixXd::Zero(n + 1, n + 1);
  auto& f = sv.form;
  for (int j = 0; j < n; ++j) {
    f(j + 1, j + 1) = (k.cell_l(j) + k.cell_diag(j)) / h;
    f(0, j + 1) = f(j + 1, 0) = 0.5 * k.cell_b(j) / rh;
  }
  // cross-cell integral over tau in cell a, t in cell c (a < c)
  Eigen::MatrixXd cross = k.cell_dual.transpose() * k.cell_gdot;  // (c, a) -> dual_c . gdot_a
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < c; ++a) {
      double val = cross(c, a) - cross(a, c);
      f(a + 1, c + 1) = f(c + 1, a + 1) = 0.5 * val / h;
    }

  const Eigen::Index m = k.covector.size();
  Eigen::MatrixXd spanned(m, variant == Variant::Endpoint ? 2 : 1);
  spanned.col(0) = k.covector;
  if (variant == Variant::Endpoint) spanned.col(1) = k.x1_base;
  Eigen::MatrixXd rows = complement(spanned);
  Eigen::MatrixXd cols(m, n + 1);
  cols.col(0) = -k.x2_end;
  cols.rightCols(n) = k.cell_gdot / rh;
  sv.constraints = rows.transpose() * cols;
  return sv;
}

Inertia inertia(const SecondVariation& q, double rel_tol, double rank_tol) {
  Inertia r;
  Eigen::MatrixXd z;
  if (q.constraints.rows() == 0) {
    z = Eigen::MatrixXd::Identity(q.form.rows(), q.form.cols());
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q.constraints, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > rank_tol * sv(0)) ++r.constraint_rank;
    z = svd.matrixV().rightCols(q.form.cols() - r.constraint_rank);
  }
  Eigen::MatrixXd restricted = z.transpose() * q.form * z;
  restricted = 0.5 * (restricted + restricted.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(restricted, Eigen::EigenvaluesOnly);
  r.eigenvalues = es.eigenvalues();
  r.max_abs = r.eigenvalues.cwiseAbs().maxCoeff();
  r.min_abs = r.eigenvalues.cwiseAbs().minCoeff();
  const double thr = rel_tol * r.max_abs;
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
    double e = r.eigenvalues(i);
    if (std::abs(e) <= thr) ++r.null;
    else if (e < 0) ++r.negative;
    else ++r.positive;
  }
  return r;
}

IndexPair hessian_indices(const ManifoldFrame& frame, double s, const AnalysisConfig& cfg) {
  AbnormalData a = abnormal_covector(frame, s, cfg);
  BracketKernels k = bracket_kernels(frame, a, cfg);
  return {inertia(assemble_form(k, Variant::Endpoint), cfg.eig_tol),
          inertia(assemble_form(k, Variant::Extended), cfg.eig_tol)};
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (unsigned t = 0; t < threads; ++t)
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    }));
  for (auto& j : jobs) j.get();
}

}  // namespace

std::vector<ProfileRow> index_profile(const ManifoldFrame& frame, const std::vector<double>& s_values,
                                      const AnalysisConfig& cfg, unsigned threads) {
  std::vector<ProfileRow> rows(s_values.size());
  parallel_for(s_values.size(), threads, [&](std::size_t i) {
    ProfileRow& r = rows[i];
    r.s = s_values[i];
    try {
      IndexPair p = hessian_indices(frame, r.s, cfg);
      r.ind_f = p.endpoint.negative;
      r.null_f = p.endpoint.null;
      r.ind_ext = p.extended.negative;
      r.null_ext = p.extended.null;
      r.min_abs_eig = std::min(p.endpoint.min_abs, p.extended.min_abs);
    } catch (const Error& e) {
      r.error = e.what();
    }
  });
  return rows;
}

HessianZeroSets hessian_zeros(const ManifoldFrame& frame, double lo, double hi, double scan_step, double tol,
                              const AnalysisConfig& cfg, unsigned threads) {
  if (!(hi > lo) || !(scan_step > 0.0)) throw ConfigError("invalid scan interval or step");
  std::vector<double> grid;
  for (long i = 1;; ++i) {
    double s = lo + scan_step * static_cast<double>(i);
    if (s >= hi - 1e-12 * hi) break;
    grid.push_back(s);
  }
  grid.push_back(hi);
  auto rows = index_profile(frame, grid, cfg, threads);
  for (const auto& r : rows)
    if (!r.error.empty()) throw Error("Hessian failed at s = " + std::to_string(r.s) + ": " + r.error);

  auto locate = [&](Variant variant) {
    auto raw_negative = [&](double s) {
      IndexPair p = hessian_indices(frame, s, cfg);
      const Inertia& in = variant == Variant::Endpoint ? p.endpoint : p.extended;
      return static_cast<int>((in.eigenvalues.array() < 0.0).count());
    };
    std::vector<int> neg(rows.size()), nul(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      neg[i] = variant == Variant::Endpoint ? rows[i].ind_f : rows[i].ind_ext;
      nul[i] = variant == Variant::Endpoint ? rows[i].null_f : rows[i].null_ext;
    }
    std::vector<HessianZero> zeros;
    auto add_zero = [&](double s) {
      for (auto& z : zeros)
        if (std::abs(z.s - s) < 10.0 * tol) {
          ++z.multiplicity;
          return;
        }
      zeros.push_back({s, 1});
    };
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      for (int level = neg[i] + 1; level <= neg[i + 1]; ++level) {
        double a = grid[i], b = grid[i + 1];
        while (b - a > tol) {
          double mid = 0.5 * (a + b);
          if (raw_negative(mid) >= level) b = mid;
          else a = mid;
        }
        add_zero(0.5 * (a + b));
      }
    }
    for (int k = 0; k < nul.back(); ++k) add_zero(hi);
    std::sort(zeros.begin(), zeros.end(), [](const HessianZero& x, const HessianZero& y) { return x.s < y.s; });
    return zeros;
  };
  return {locate(Variant::Endpoint), locate(Variant::Extended)};
}

}  // namespace sgc
