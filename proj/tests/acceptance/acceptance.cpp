// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "../oracle/engel_oracle.hpp"
#include "sgc/cli/verify.hpp"

namespace {

// The verify runner's root helpers must match the test-side scan.
bool roots_match(double hi, std::string& note) {
  auto a = sgc::verify::extended_roots(hi), b = oracle::extended_roots(hi);
  if (a.size() != b.size()) {
    note = "root oracle count mismatch";
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-10) {
      note = "root oracle mismatch at " + std::to_string(b[i]);
      return false;
    }
  auto e = sgc::verify::endpoint_roots(hi);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (std::abs(std::sin(e[i])) > 1e-12 || std::abs(e[i] - (i + 1) * std::numbers::pi) > 1e-12) {
      note = "endpoint oracle mismatch";
      return false;
    }
  return true;
}

}  // namespace

int main() {
  sgc::verify::VerifyOptions opts;
  int failed = 0;
  for (int id : sgc::verify::all_criteria()) {
    auto r = sgc::verify::run_criterion(id, opts);
    bool ok = r.passed;
    std::string note;
    if (id == 2 || id == 3 || id == 9) ok = roots_match(6 * std::numbers::pi, note) && ok;
    if (id == 3 && r.seconds >= 300.0) {
      ok = false;
      note = "runtime above 300 s";
    }
    if (!ok) ++failed;
    std::printf("criterion %d: %s %s (%.1f s) %s%s%s\n", id, ok ? "PASS" : "FAIL", r.title.c_str(), r.seconds,
                r.detail.c_str(), note.empty() ? "" : "; ", note.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(sgc::verify::all_criteria().size()) - failed,
              sgc::verify::all_criteria().size());
  return failed == 0 ? 0 : 1;
}
