#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "sgc/abnormal/config.hpp"
#include "sgc/flow/control.hpp"
#include "sgc/vfcore/frame.hpp"

namespace sgc::verify {

// Closed-form conjugacy indicators of the Engel example.
double endpoint_indicator(double s);   // sin s
double extended_indicator(double s);   // s sin s + 2 (cos s - 1)

// Roots of the closed forms in (0, hi], from their factorizations.
std::vector<double> endpoint_roots(double hi);
std::vector<double> extended_roots(double hi);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  unsigned threads = 0;
  unsigned seed = 20240917u;
  int rho_samples = 100;
  double zero_tol = 1e-4;           // criteria 1 and 2; criterion 9 uses twice this
};

std::vector<int> all_criteria();
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

// Reparametrization battery on random admissible controls.
struct RhoReport {
  int samples = 0;
  double max_endpoint_gap = 0.0;
  double max_round_trip = 0.0;
  double round_trip_bound = 0.0;
  bool passed = false;
};

Control random_admissible_control(unsigned seed, double alpha = 0.5);
RhoReport rho_battery(const ManifoldFrame& frame, int samples, unsigned seed, const AnalysisConfig& cfg = {});

nlohmann::json to_json(const CriterionResult& r);
nlohmann::json to_json(const RhoReport& r);

}  // namespace sgc::verify
