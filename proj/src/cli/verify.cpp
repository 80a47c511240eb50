#include "sgc/cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "sgc/hessian/hessian.hpp"
#include "sgc/jacobi/jacobi.hpp"
#include "sgc/vfcore/bracket.hpp"

namespace sgc::verify {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string list(const std::vector<double>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "}";
}

double bisect(double (*f)(double), double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, b); ++i) {
    double m = 0.5 * (a + b), fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double tangent_factor(double s) { return s * std::cos(0.5 * s) - 2.0 * std::sin(0.5 * s); }

// Largest deviation between two zero sets, infinity when the counts differ.
double set_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<double> expand(const std::vector<Zero>& zs) {
  std::vector<double> out;
  for (const auto& z : zs)
    for (int k = 0; k < z.multiplicity; ++k) out.push_back(z.s);
  return out;
}

std::vector<double> expand(const std::vector<HessianZero>& zs) {
  std::vector<double> out;
  for (const auto& z : zs)
    for (int k = 0; k < z.multiplicity; ++k) out.push_back(z.s);
  return out;
}

AnalysisConfig example_config() { return AnalysisConfig{}; }

std::vector<double> shooting_zeros(const ManifoldFrame& f, ShootingCase c, double hi, double step,
                                   const AnalysisConfig& cfg) {
  ZeroScan zs;
  zs.scan_step = step;
  zs.tol = 1e-9;
  return expand(locate_zeros([&](double s) { return shooting_determinant(f, s, c, cfg).determinant; }, 0.0, hi, zs));
}

std::vector<double> engel_zeros(const ManifoldFrame& f, ShootingCase c, double hi, double step,
                                const AnalysisConfig& cfg) {
  ZeroScan zs;
  zs.scan_step = step;
  zs.tol = 1e-9;
  return expand(locate_zeros([&](double s) { return engel_indicator(f, s, c, cfg); }, 0.0, hi, zs));
}

CriterionResult c1(const VerifyOptions& opts) {
  CriterionResult r{1, "endpoint conjugate times at k*pi", false, "", 0.0};
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig cfg = example_config();
  cfg.jacobi_steps = 400;
  cfg.grid = 400;
  const double hi = 3 * kPi;
  auto t0 = std::chrono::steady_clock::now();
  auto shoot = shooting_zeros(f, ShootingCase::Endpoint, hi, 0.02, cfg);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto engel = engel_zeros(f, ShootingCase::Endpoint, hi, 0.02, cfg);
  auto oracle = endpoint_roots(hi);
  double ds = set_distance(shoot, oracle), de = set_distance(engel, oracle);
  r.passed = ds < opts.zero_tol && de < opts.zero_tol && secs < 60.0;
  r.detail = "shooting " + list(shoot) + " (dev " + fmt(ds) + ", " + fmt(secs) + " s), engel " + list(engel) +
             " (dev " + fmt(de) + "), oracle " + list(oracle);
  return r;
}

CriterionResult c2(const VerifyOptions& opts) {
  CriterionResult r{2, "extended conjugate times", false, "", 0.0};
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig cfg = example_config();
  cfg.jacobi_steps = 400;
  cfg.grid = 400;
  const double hi = 4 * kPi;
  auto shoot = shooting_zeros(f, ShootingCase::Extended, hi, 0.02, cfg);
  auto engel = engel_zeros(f, ShootingCase::Extended, hi, 0.02, cfg);
  auto oracle = extended_roots(hi);
  double ds = set_distance(shoot, oracle), de = set_distance(engel, oracle);
  r.passed = ds < opts.zero_tol && de < opts.zero_tol;
  r.detail = "shooting " + list(shoot) + " (dev " + fmt(ds) + "), engel " + list(engel) + " (dev " + fmt(de) +
             "), oracle " + list(oracle);
  return r;
}

CriterionResult c3(const VerifyOptions& opts) {
  CriterionResult r{3, "index-pair sequence", false, "", 0.0};
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig cfg = example_config();
  cfg.grid = 200;
  std::vector<double> roots = endpoint_roots(6 * kPi);
  auto ext = extended_roots(6 * kPi);
  roots.insert(roots.end(), ext.begin(), ext.end());
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              roots.end());
  std::vector<double> samples;
  double prev = 0.0;
  for (double z : roots) {
    samples.push_back(0.5 * (prev + z));
    prev = z;
  }
  // beyond the last root, before the next zero of either indicator
  double next = bisect(tangent_factor, 6 * kPi + 0.5, 7 * kPi - 1e-9);
  samples.push_back(0.5 * (prev + std::min(next, 7 * kPi)));
  const std::vector<std::pair<int, int>> expected{{0, 0}, {1, 0}, {2, 1}, {2, 2}, {3, 2},
                                                  {4, 3}, {4, 4}, {5, 4}, {6, 5}};
  auto rows = index_profile(f, samples, cfg, opts.threads);
  bool ok = rows.size() == expected.size();
  std::string got;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    got += "(" + std::to_string(rows[i].ind_f) + "," + std::to_string(rows[i].ind_ext) + ")";
    if (i < expected.size())
      ok = ok && rows[i].error.empty() && rows[i].ind_f == expected[i].first && rows[i].ind_ext == expected[i].second &&
           rows[i].null_f == 0 && rows[i].null_ext == 0;
  }
  r.passed = ok;
  r.detail = "samples " + list(samples) + " -> " + got;
  return r;
}

CriterionResult c4(const VerifyOptions& opts) {
  CriterionResult r{4, "index equals zero count", false, "", 0.0};
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig cfg = example_config();
  const double hi = 6 * kPi;
  auto zf = shooting_zeros(f, ShootingCase::Endpoint, hi, 0.02, cfg);
  auto ze = shooting_zeros(f, ShootingCase::Extended, hi, 0.02, cfg);
  std::vector<double> all = zf;
  all.insert(all.end(), ze.begin(), ze.end());
  std::mt19937 rng(opts.seed);
  std::uniform_real_distribution<double> uni(0.2, hi);
  std::vector<double> samples;
  while (samples.size() < 20) {
    double s = uni(rng);
    bool near = std::any_of(all.begin(), all.end(), [&](double z) { return std::abs(z - s) <= 0.1; });
    if (!near) samples.push_back(s);
  }
  auto rows = index_profile(f, samples, cfg, opts.threads);
  int bad = 0;
  std::string first_bad;
  for (const auto& row : rows) {
    int cf = static_cast<int>(std::count_if(zf.begin(), zf.end(), [&](double z) { return z < row.s; }));
    int ce = static_cast<int>(std::count_if(ze.begin(), ze.end(), [&](double z) { return z < row.s; }));
    if (!row.error.empty() || row.ind_f != cf || row.ind_ext != ce) {
      if (bad++ == 0)
        first_bad = " first mismatch at s=" + fmt(row.s) + ": (" + std::to_string(row.ind_f) + "," +
                    std::to_string(row.ind_ext) + ") vs (" + std::to_string(cf) + "," + std::to_string(ce) + ")";
    }
  }
  r.passed = bad == 0;
  r.detail = std::to_string(rows.size() - static_cast<std::size_t>(bad)) + "/20 horizons match" + first_bad;
  return r;
}

CriterionResult c5(const VerifyOptions&) {
  CriterionResult r{5, "hypothesis battery", false, "", 0.0};
  auto f = builtin_frame("engel-so3r");
  auto rep = check_hypotheses(f, 4.0, example_config());
  r.passed = rep.corank == 1 && rep.goh_residual < 1e-8 && rep.legendre_min > 0.0 && rep.strictness_residual < 1e-8 &&
             rep.j_projection_norm > 0.1;
  r.detail = "s=4: corank " + std::to_string(rep.corank) + ", goh " + fmt(rep.goh_residual) + ", legendre_min " +
             fmt(rep.legendre_min) + ", strictness " + fmt(rep.strictness_residual) + ", j_projection " +
             fmt(rep.j_projection_norm);
  return r;
}

Eigen::VectorXd random_point(std::mt19937& rng) {
  std::normal_distribution<double> n01;
  Eigen::Quaterniond q(n01(rng), n01(rng), n01(rng), n01(rng));
  q.normalize();
  Eigen::Matrix3d rm = q.toRotationMatrix();
  Eigen::VectorXd x(10);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) x(3 * i + j) = rm(i, j);
  x(9) = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
  return x;
}

CriterionResult c6(const VerifyOptions& opts) {
  CriterionResult r{6, "bracket ground truth and structural functions", false, "", 0.0};
  auto f = builtin_frame("engel-so3r");
  std::mt19937 rng(opts.seed + 6);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x = random_point(rng);
    Eigen::VectorXd lhs = iterated_ad(f.x1, f.x2, 2, x).value;
    Eigen::VectorXd rhs = 0.5 * (*f.x1)(x) - (*f.x2)(x);
    worst = std::max(worst, (lhs - rhs).norm());
  }
  std::vector<double> ts;
  for (int i = 0; i <= 60; ++i) ts.push_back(6 * kPi * i / 60.0);
  auto sf = structural_functions(f, ts, example_config());
  double dev = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    dev = std::max({dev, std::abs(sf.alpha(0, c) + 1.0), std::abs(sf.alpha(1, c)), std::abs(sf.beta[i] - 0.5)});
  }
  r.passed = worst < 1e-10 && dev < 1e-8;
  r.detail = "bracket residual " + fmt(worst) + " over 50 points, structural deviation " + fmt(dev);
  return r;
}

CriterionResult c7(const VerifyOptions& opts) {
  CriterionResult r{7, "reparametrization invariance", false, "", 0.0};
  auto rep = rho_battery(builtin_frame("engel-so3r"), opts.rho_samples, opts.seed + 7);
  r.passed = rep.passed && rep.samples == opts.rho_samples;
  r.detail = std::to_string(rep.samples) + " controls, max endpoint gap " + fmt(rep.max_endpoint_gap) +
             ", max round trip " + fmt(rep.max_round_trip) + " (bound " + fmt(rep.round_trip_bound) + ")";
  return r;
}

CriterionResult c8(const VerifyOptions&) {
  CriterionResult r{8, "degeneracy onset at pi", false, "", 0.0};
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig cfg = example_config();
  cfg.grid = 200;
  auto closest = [](const Inertia& in) {
    Eigen::Index k;
    in.eigenvalues.cwiseAbs().minCoeff(&k);
    return in.eigenvalues(k);
  };
  auto below = hessian_indices(f, kPi - 1e-3, cfg).endpoint;
  auto above = hessian_indices(f, kPi + 1e-3, cfg).endpoint;
  double eb = closest(below), ea = closest(above);
  bool crossing = (eb > 0) != (ea > 0) && above.negative == below.negative + 1;
  double m200 = hessian_indices(f, kPi, cfg).endpoint.min_abs;
  cfg.grid = 400;
  double m400 = hessian_indices(f, kPi, cfg).endpoint.min_abs;
  double ratio = m200 / m400;
  r.passed = crossing && ratio >= 4.0;
  r.detail = "closest eigenvalue " + fmt(eb) + " -> " + fmt(ea) + ", index " + std::to_string(below.negative) + " -> " +
             std::to_string(above.negative) + "; min|eig| at pi: " + fmt(m200) + " (N=200), " + fmt(m400) +
             " (N=400), ratio " + fmt(ratio);
  return r;
}

CriterionResult c9(const VerifyOptions& opts) {
  CriterionResult r{9, "cross-method zero agreement", false, "", 0.0};
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig cfg = example_config();
  const double hi = 6 * kPi;
  auto hz = hessian_zeros(f, 0.0, hi, 0.25, 1e-6, cfg, opts.threads);
  auto hf = expand(hz.endpoint), he = expand(hz.extended);
  auto jf = shooting_zeros(f, ShootingCase::Endpoint, hi, 0.02, cfg);
  auto je = shooting_zeros(f, ShootingCase::Extended, hi, 0.02, cfg);
  auto ef = engel_zeros(f, ShootingCase::Endpoint, hi, 0.02, cfg);
  auto ee = engel_zeros(f, ShootingCase::Extended, hi, 0.02, cfg);
  double dev = std::max({set_distance(hf, jf), set_distance(hf, ef), set_distance(jf, ef), set_distance(he, je),
                         set_distance(he, ee), set_distance(je, ee)});
  r.passed = dev < 2.0 * opts.zero_tol;
  r.detail = "F: hessian " + list(hf) + ", jacobi " + list(jf) + ", engel " + list(ef) + "; Ext: hessian " + list(he) +
             ", jacobi " + list(je) + ", engel " + list(ee) + "; max deviation " + fmt(dev);
  return r;
}

}  // namespace

double endpoint_indicator(double s) { return std::sin(s); }
double extended_indicator(double s) { return s * std::sin(s) + 2.0 * (std::cos(s) - 1.0); }

std::vector<double> endpoint_roots(double hi) {
  std::vector<double> out;
  for (int k = 1; k * kPi <= hi * (1 + 1e-12); ++k) out.push_back(k * kPi);
  return out;
}

std::vector<double> extended_roots(double hi) {
  std::vector<double> out;
  for (int k = 1; 2 * k * kPi <= hi * (1 + 1e-12); ++k) out.push_back(2 * k * kPi);
  // s cos(s/2) = 2 sin(s/2) has one root in each ((2k+1) pi, (2k+3) pi) branch of tan(s/2)
  for (int k = 1;; ++k) {
    double a = (2 * k) * kPi + 1e-9, b = (2 * k + 1) * kPi - 1e-9;
    if (a > hi) break;
    double z = bisect(tangent_factor, a, b);
    if (z <= hi) out.push_back(z);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9}; }

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
  using Fn = CriterionResult (*)(const VerifyOptions&);
  static const Fn table[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9};
  if (id < 1 || id > 9) throw ConfigError("unknown acceptance criterion " + std::to_string(id));
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](opts);
  } catch (const Error& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Control random_admissible_control(unsigned seed, double alpha) {
  std::mt19937 rng(seed);
  double s = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
  int pieces = std::uniform_int_distribution<int>(4, 40)(rng);
  // |v1 - mean| <= 2 * amp keeps 1 + v1 - mean above alpha
  double amp = 0.45 * (1.0 - alpha);
  std::uniform_real_distribution<double> d1(-amp, amp), d2(-1.0, 1.0);
  std::vector<double> v1(static_cast<std::size_t>(pieces)), v2(static_cast<std::size_t>(pieces));
  for (int k = 0; k < pieces; ++k) {
    v1[static_cast<std::size_t>(k)] = d1(rng);
    v2[static_cast<std::size_t>(k)] = d2(rng);
  }
  return Control::uniform(s, std::move(v1), std::move(v2));
}

RhoReport rho_battery(const ManifoldFrame& frame, int samples, unsigned seed, const AnalysisConfig& cfg) {
  RhoReport rep;
  rep.passed = true;
  for (int i = 0; i < samples; ++i) {
    Control v = random_admissible_control(seed + static_cast<unsigned>(i), cfg.alpha);
    Control w = rho(v, cfg.alpha);
    Control flat = v;
    std::fill(flat.v1.begin(), flat.v1.end(), v.mean_v1());
    double gap = (endpoint(frame, w, cfg.numerics) - endpoint(frame, flat, cfg.numerics)).norm();
    double norm = l2_distance(v, Control::zero(v.horizon(), 1));
    double bound = 1e-10 * (1.0 + norm);
    double trip = std::max(l2_distance(rho_inverse(w, cfg.alpha), v), l2_distance(rho(rho_inverse(v, cfg.alpha), cfg.alpha), v));
    rep.max_endpoint_gap = std::max(rep.max_endpoint_gap, gap);
    rep.max_round_trip = std::max(rep.max_round_trip, trip);
    rep.round_trip_bound = std::max(rep.round_trip_bound, bound);
    rep.passed = rep.passed && gap < 1e-7 && trip < bound;
    ++rep.samples;
  }
  return rep;
}

nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}};
}

nlohmann::json to_json(const RhoReport& r) {
  return {{"samples", r.samples},
          {"max_endpoint_gap", r.max_endpoint_gap},
          {"max_round_trip", r.max_round_trip},
          {"round_trip_bound", r.round_trip_bound},
          {"passed", r.passed}};
}

}  // namespace sgc::verify
