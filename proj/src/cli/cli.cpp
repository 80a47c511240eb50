#include "sgc/cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "sgc/cli/verify.hpp"
#include "sgc/hessian/hessian.hpp"
#include "sgc/jacobi/jacobi.hpp"

namespace sgc::cli {

using nlohmann::json;

namespace {

double tol_abs(const RunConfig& c) { return c.analysis.numerics.integrator.abs_tol; }

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

std::string load_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Finds --config before the real parse so file values become flag defaults.
std::string find_config(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

void sync(RunConfig& c) {
  auto& n = c.analysis.numerics;
  if (c.integrator == "rk4")
    n.integrator.method = IntegratorMethod::RK4;
  else if (c.integrator == "rk45")
    n.integrator.method = IntegratorMethod::RK45;
  else
    throw ConfigError("unknown integrator '" + c.integrator + "' (rk4 | rk45)");
  if (c.diff == "dual")
    n.diff.mode = DiffMode::Dual;
  else if (c.diff == "fd")
    n.diff.mode = DiffMode::FiniteDifference;
  else
    throw ConfigError("unknown differentiation mode '" + c.diff + "' (dual | fd)");
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path), os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot write output file '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }
  void finish() {
    os_->flush();
    if (!*os_) throw ConfigError("write failed for '" + (path_.empty() ? std::string("stdout") : path_) + "'");
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* os_;
};

json zero_list(const std::vector<Zero>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back({{"s", z.s}, {"multiplicity", z.multiplicity}, {"tangential", z.tangential}});
  return a;
}

json zero_list(const std::vector<HessianZero>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back({{"s", z.s}, {"multiplicity", z.multiplicity}});
  return a;
}

std::vector<double> expanded(const json& list) {
  std::vector<double> out;
  for (const auto& z : list)
    for (int k = 0; k < z.at("multiplicity").get<int>(); ++k) out.push_back(z.at("s").get<double>());
  return out;
}

json distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return nullptr;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

int cmd_analyze(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ManifoldFrame f = resolve_frame(c.frame);
  HypothesisReport rep = check_hypotheses(f, c.s, c.analysis);
  json j = to_json(rep);
  j["frame"] = f.label;
  int code = kOk;
  if (!rep.failed_check.empty()) {
    err << "hypothesis failed: " << rep.failed_check << "\n";
    code = kHypothesis;
  } else {
    IndexPair ip = hessian_indices(f, c.s, c.analysis);
    j["indF"] = ip.endpoint.negative;
    j["nullF"] = ip.endpoint.null;
    j["indExt"] = ip.extended.negative;
    j["nullExt"] = ip.extended.null;
    j["min_abs_eig"] = std::min(ip.endpoint.min_abs, ip.extended.min_abs);
  }
  Output o(c.out, out);
  o.stream() << j.dump(2) << "\n";
  o.finish();
  return code;
}

int cmd_conjugate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ManifoldFrame f = resolve_frame(c.frame);
  const bool all = c.method == "all";
  if (!all && c.method != "hessian" && c.method != "jacobi" && c.method != "engel")
    throw ConfigError("unknown method '" + c.method + "' (hessian | jacobi | engel | all)");
  json j{{"frame", f.label}, {"range", {c.s_min, c.s_max}}, {"methods", json::object()}};
  const bool empty = !(c.s_max > c.s_min);
  ZeroScan zs;
  zs.scan_step = c.step;
  zs.tol = c.zero_tol;
  auto scan = [&](auto&& fn) { return empty ? std::vector<Zero>{} : locate_zeros(fn, c.s_min, c.s_max, zs); };

  if (all || c.method == "hessian") {
    HessianZeroSets hz;
    if (!empty) hz = hessian_zeros(f, c.s_min, c.s_max, c.hessian_step, c.hessian_tol, c.analysis, c.threads);
    j["methods"]["hessian"] = {{"F", zero_list(hz.endpoint)}, {"Ext", zero_list(hz.extended)}};
  }
  if (all || c.method == "jacobi") {
    json m;
    for (auto [name, which] : {std::pair{"F", ShootingCase::Endpoint}, std::pair{"Ext", ShootingCase::Extended}})
      m[name] = zero_list(scan([&](double s) { return shooting_determinant(f, s, which, c.analysis).determinant; }));
    j["methods"]["jacobi"] = m;
  }
  if (c.method == "engel" || (all && f.intrinsic_dim == 4)) {
    if (f.intrinsic_dim != 4)
      throw HypothesisError("dimension", "engel indicators need intrinsic dimension 4, frame has " +
                                             std::to_string(f.intrinsic_dim));
    json m;
    for (auto [name, which] : {std::pair{"F", ShootingCase::Endpoint}, std::pair{"Ext", ShootingCase::Extended}})
      m[name] = zero_list(scan([&](double s) { return engel_indicator(f, s, which, c.analysis); }));
    j["methods"]["engel"] = m;
  } else if (all) {
    j["skipped"] = {{"engel", "intrinsic dimension is not 4"}};
  }
  if (all) {
    json table = json::array();
    std::vector<std::string> names;
    for (auto it = j["methods"].begin(); it != j["methods"].end(); ++it) names.push_back(it.key());
    for (std::size_t a = 0; a < names.size(); ++a)
      for (std::size_t b = a + 1; b < names.size(); ++b)
        for (const char* v : {"F", "Ext"}) {
          json d = distance(expanded(j["methods"][names[a]][v]), expanded(j["methods"][names[b]][v]));
          table.push_back({{"a", names[a]}, {"b", names[b]}, {"variant", v}, {"max_distance", d}});
          if (d.is_null()) err << "warning: " << names[a] << " and " << names[b] << " disagree on the number of " << v << " zeros\n";
        }
    j["agreement"] = table;
  }
  Output o(c.out, out);
  o.stream() << j.dump(2) << "\n";
  o.finish();
  return kOk;
}

void write_gnuplot(const std::string& path, const std::string& csv) {
  std::ofstream g(path);
  if (!g) throw ConfigError("cannot write gnuplot script '" + path + "'");
  g << "set datafile separator ','\n"
    << "set key outside\n"
    << "set multiplot layout 2,1\n"
    << "set xlabel 's'\n"
    << "set ylabel 'indicator'\n"
    << "plot '" << csv << "' using 1:2 skip 1 with lines title 'a_F', \\\n"
    << "     '' using 1:3 skip 1 with lines title 'a_Ext', 0 notitle\n"
    << "set ylabel 'index'\n"
    << "plot '" << csv << "' using 1:4 skip 1 with steps title 'ind F', \\\n"
    << "     '' using 1:6 skip 1 with steps title 'ind Ext'\n"
    << "unset multiplot\n";
  if (!g) throw ConfigError("write failed for '" + path + "'");
}

int cmd_profile(const RunConfig& c, std::ostream& out, std::ostream&) {
  ManifoldFrame f = resolve_frame(c.frame);
  std::vector<double> s_values;
  const long rows = std::max(1L, static_cast<long>(std::ceil(c.s_max / c.step - 1e-9)));
  for (long k = 1; k <= rows; ++k) s_values.push_back(static_cast<double>(k) * c.step);
  Output o(c.out, out);
  auto prof = index_profile(f, s_values, c.analysis, c.threads);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::ostream& os = o.stream();
  os.precision(12);
  os << "s,aF,aExt,indF,nullF,indExt,nullExt,minAbsEig\n";
  for (const auto& r : prof) {
    double af = nan, ae = nan;
    try {
      af = shooting_determinant(f, r.s, ShootingCase::Endpoint, c.analysis).determinant;
      ae = shooting_determinant(f, r.s, ShootingCase::Extended, c.analysis).determinant;
    } catch (const Error&) {
    }
    os << r.s << ',' << af << ',' << ae << ',' << r.ind_f << ',' << r.null_f << ',' << r.ind_ext << ','
       << r.null_ext << ',' << r.min_abs_eig << '\n';
  }
  o.finish();
  if (!c.emit_gnuplot.empty()) write_gnuplot(c.emit_gnuplot, c.out.empty() ? "profile.csv" : c.out);
  return kOk;
}

std::vector<int> parse_criteria(const std::string& text) {
  if (text.empty()) return verify::all_criteria();
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      int id = std::stoi(tok, &used);
      if (used != tok.size() || id < 1 || id > 9) throw std::invalid_argument(tok);
      ids.push_back(id);
    } catch (const std::logic_error&) {
      throw ConfigError("invalid criterion '" + tok + "' (expected integers 1..9)");
    }
  }
  return ids;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  verify::VerifyOptions opts;
  opts.threads = c.threads;
  opts.seed = c.seed;
  opts.rho_samples = c.samples;
  opts.zero_tol = c.verify_tol;
  json results = json::array(), failed = json::array();
  for (int id : parse_criteria(c.criteria)) {
    auto r = verify::run_criterion(id, opts);
    err << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.title << " (" << r.seconds << " s): " << r.detail << "\n";
    results.push_back(verify::to_json(r));
    if (!r.passed) failed.push_back(id);
  }
  json j{{"criteria", results}, {"failed", failed}, {"passed", failed.empty()}};
  Output o(c.out, out);
  o.stream() << j.dump(2) << "\n";
  o.finish();
  if (!failed.empty()) {
    err << "failed criteria:";
    for (const auto& id : failed) err << " " << id.get<int>();
    err << "\n";
    return kVerification;
  }
  return kOk;
}

int cmd_rho(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ManifoldFrame f = resolve_frame(c.frame);
  auto rep = verify::rho_battery(f, c.samples, c.seed, c.analysis);
  json j = verify::to_json(rep);
  j["frame"] = f.label;
  Output o(c.out, out);
  o.stream() << j.dump(2) << "\n";
  o.finish();
  if (!rep.passed) {
    err << "reparametrization check failed\n";
    return kVerification;
  }
  return kOk;
}

}  // namespace

void apply_config(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{
      "frame",     "s",          "s_min",   "s_max",    "step",        "hessian_step", "grid",
      "quad",      "jacobi_steps", "method", "integrator", "diff",      "fd_step",      "rk4_steps",
      "threads",   "seed",       "samples", "criteria", "out",         "emit_gnuplot", "alpha",
      "tol_zero",  "tol_hessian", "tol_verify", "tol_rank", "tol_eig", "tol_goh",     "tol_strictness", "tol_j",
      "tol_abs",   "tol_rel"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config key '" + it.key() + "'");
  try {
    auto& a = c.analysis;
    auto& n = a.numerics;
    take(j, "frame", c.frame);
    take(j, "s", c.s);
    take(j, "s_min", c.s_min);
    take(j, "s_max", c.s_max);
    take(j, "step", c.step);
    take(j, "hessian_step", c.hessian_step);
    take(j, "method", c.method);
    take(j, "integrator", c.integrator);
    take(j, "diff", c.diff);
    take(j, "threads", c.threads);
    take(j, "seed", c.seed);
    take(j, "samples", c.samples);
    take(j, "criteria", c.criteria);
    take(j, "out", c.out);
    take(j, "emit_gnuplot", c.emit_gnuplot);
    take(j, "tol_zero", c.zero_tol);
    take(j, "tol_hessian", c.hessian_tol);
    take(j, "tol_verify", c.verify_tol);
    take(j, "grid", a.grid);
    take(j, "quad", a.quad_points);
    take(j, "jacobi_steps", a.jacobi_steps);
    take(j, "alpha", a.alpha);
    take(j, "tol_rank", a.rank_tol);
    take(j, "tol_eig", a.eig_tol);
    take(j, "tol_goh", a.goh_tol);
    take(j, "tol_strictness", a.strictness_tol);
    take(j, "tol_j", a.j_projection_min);
    take(j, "fd_step", n.diff.fd_step);
    take(j, "rk4_steps", n.integrator.default_steps);
    take(j, "tol_abs", n.integrator.abs_tol);
    take(j, "tol_rel", n.integrator.rel_tol);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

void validate(const RunConfig& c) {
  const auto& a = c.analysis;
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(c.s, "--s");
  positive(c.step, "--step");
  positive(c.hessian_step, "--hessian-step");
  positive(c.zero_tol, "--tol-zero");
  positive(c.hessian_tol, "--tol-hessian");
  positive(c.verify_tol, "--tol-verify");
  positive(a.grid, "--grid");
  positive(a.quad_points, "--quad");
  positive(a.jacobi_steps, "--jacobi-steps");
  positive(a.rank_tol, "--tol-rank");
  positive(a.eig_tol, "--tol-eig");
  positive(a.goh_tol, "--tol-goh");
  positive(a.strictness_tol, "--tol-strictness");
  positive(a.j_projection_min, "--tol-j");
  positive(a.alpha, "--alpha");
  positive(a.numerics.diff.fd_step, "--fd-step");
  positive(a.numerics.integrator.default_steps, "--rk4-steps");
  positive(tol_abs(c), "--tol-abs");
  positive(a.numerics.integrator.rel_tol, "--tol-rel");
  positive(c.samples, "--samples");
  if (c.s_min < 0.0) throw ConfigError("--s-min must be non-negative");
  if (c.frame.empty()) throw ConfigError("--frame must name a builtin frame or a file");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string config_path;
  try {
    config_path = find_config(argc, argv);
    if (!config_path.empty()) {
      json j;
      try {
        j = json::parse(load_text(config_path));
      } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + config_path + "' is not valid JSON: " + e.what());
      }
      apply_config(j, c);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kOperational;
  }

  auto& a = c.analysis;
  CLI::App app{"Conjugate times of strictly singular curves"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config();  // disable CLI11's own config handling
  app.add_option("--config", config_path, "JSON file whose keys mirror the flags");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--frame", c.frame, "builtin frame name or frame JSON file")->capture_default_str();
    sub->add_option("--grid", a.grid, "Hessian grid cells N")->capture_default_str();
    sub->add_option("--quad", a.quad_points, "Gauss points per cell")->capture_default_str();
    sub->add_option("--jacobi-steps", a.jacobi_steps, "RK4 steps of the Jacobi shooting")->capture_default_str();
    sub->add_option("--integrator", c.integrator, "rk4 | rk45")->capture_default_str();
    sub->add_option("--rk4-steps", a.numerics.integrator.default_steps, "RK4 steps per horizon")->capture_default_str();
    sub->add_option("--diff", c.diff, "dual | fd")->capture_default_str();
    sub->add_option("--fd-step", a.numerics.diff.fd_step, "finite-difference step")->capture_default_str();
    sub->add_option("--alpha", a.alpha, "admissibility margin of the reparametrization")->capture_default_str();
    sub->add_option("--tol-rank", a.rank_tol, "relative singular-value rank threshold")->capture_default_str();
    sub->add_option("--tol-eig", a.eig_tol, "relative eigenvalue zero threshold")->capture_default_str();
    sub->add_option("--tol-goh", a.goh_tol, "Goh residual bound")->capture_default_str();
    sub->add_option("--tol-strictness", a.strictness_tol, "strictness residual bound")->capture_default_str();
    sub->add_option("--tol-j", a.j_projection_min, "minimum cost-gradient projection")->capture_default_str();
    sub->add_option("--tol-abs", a.numerics.integrator.abs_tol, "RK45 absolute tolerance")->capture_default_str();
    sub->add_option("--tol-rel", a.numerics.integrator.rel_tol, "RK45 relative tolerance")->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads, 0 = hardware")->capture_default_str();
    sub->add_option("--out", c.out, "output file, default stdout");
  };

  auto* analyze = app.add_subcommand("analyze", "hypothesis battery and index pair at one horizon");
  common(analyze);
  analyze->add_option("--s", c.s, "horizon")->capture_default_str();

  auto* conjugate = app.add_subcommand("conjugate", "conjugate times on (s-min, s-max]");
  common(conjugate);
  conjugate->add_option("--s-min", c.s_min)->capture_default_str();
  conjugate->add_option("--s-max", c.s_max)->capture_default_str();
  conjugate->add_option("--step", c.step, "indicator scan step")->capture_default_str();
  conjugate->add_option("--hessian-step", c.hessian_step, "index scan step")->capture_default_str();
  conjugate->add_option("--tol-zero", c.zero_tol, "bisection width of the indicator zeros")->capture_default_str();
  conjugate->add_option("--tol-hessian", c.hessian_tol, "bisection width of the index jumps")->capture_default_str();
  conjugate->add_option("--method", c.method, "hessian | jacobi | engel | all")->capture_default_str();

  auto* profile = app.add_subcommand("profile", "CSV of indicators and index pairs at multiples of step");
  common(profile);
  profile->add_option("--s-max", c.s_max)->capture_default_str();
  profile->add_option("--step", c.step)->capture_default_str();
  profile->add_option("--emit-gnuplot", c.emit_gnuplot, "write a gnuplot script for the profile");

  auto* verify = app.add_subcommand("verify-example", "acceptance checks on the builtin Engel example");
  verify->add_option("--criteria", c.criteria, "comma-separated subset of 1..9");
  verify->add_option("--tol-verify", c.verify_tol, "zero-location tolerance")->capture_default_str();
  verify->add_option("--seed", c.seed)->capture_default_str();
  verify->add_option("--samples", c.samples, "controls in the reparametrization check")->capture_default_str();
  verify->add_option("--threads", c.threads)->capture_default_str();
  verify->add_option("--out", c.out);

  auto* rhochk = app.add_subcommand("rho-check", "reparametrization invariance on random controls");
  common(rhochk);
  rhochk->add_option("--samples", c.samples)->capture_default_str();
  rhochk->add_option("--seed", c.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kOperational;
  }

  try {
    sync(c);
    validate(c);
    if (analyze->parsed()) return cmd_analyze(c, out, err);
    if (conjugate->parsed()) return cmd_conjugate(c, out, err);
    if (profile->parsed()) return cmd_profile(c, out, err);
    if (verify->parsed()) return cmd_verify(c, out, err);
    return cmd_rho(c, out, err);
  } catch (const HypothesisError& e) {
    err << "hypothesis failed: " << e.what() << "\n";
    return kHypothesis;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kOperational;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOperational;
  }
}

}  // namespace sgc::cli
