#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "sgc/abnormal/config.hpp"

namespace sgc::cli {

enum ExitCode { kOk = 0, kOperational = 1, kHypothesis = 2, kVerification = 3 };

struct RunConfig {
  std::string frame = "engel-so3r";  // builtin name or frame file
  double s = 4.0;
  double s_min = 0.0;
  double s_max = 10.0;
  double step = 0.02;                // profile spacing and indicator scan step
  double hessian_step = 0.25;        // scan step of the index-jump search
  double zero_tol = 1e-9;            // bisection width of indicator zeros
  double hessian_tol = 1e-6;         // bisection width of index jumps
  double verify_tol = 1e-4;          // zero-location tolerance of verify-example
  std::string method = "all";        // hessian | jacobi | engel | all
  std::string integrator = "rk4";    // rk4 | rk45
  std::string diff = "dual";         // dual | fd
  unsigned threads = 0;
  unsigned seed = 20240917u;
  int samples = 100;
  std::string criteria;              // comma-separated subset, empty = all
  std::string out;                   // empty = stdout
  std::string emit_gnuplot;
  AnalysisConfig analysis;
};

// Applies keys of a JSON config object onto `cfg`. Keys mirror the long flag
// names with dashes replaced by underscores.
void apply_config(const nlohmann::json& j, RunConfig& cfg);

// Validates settings, throws ConfigError.
void validate(const RunConfig& cfg);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgc::cli
