#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "../oracle/engel_oracle.hpp"
#include "sgc/hessian/hessian.hpp"

using namespace sgc;

namespace {

constexpr double kPi = std::numbers::pi;

// zeros of both indicators on (0, 20)
std::vector<double> indicator_zeros() {
  std::vector<double> z;
  for (int k = 1; k * kPi < 20.0; ++k) z.push_back(k * kPi);
  for (double r : oracle::extended_roots(20.0)) z.push_back(r);
  return z;
}

double distance_to_zeros(double s) {
  double d = 1e300;
  for (double z : indicator_zeros()) d = std::min(d, std::abs(s - z));
  return d;
}

}  // namespace

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
  for (int q = 1; q <= 5; ++q) {
    std::vector<double> x, w;
    gauss_legendre(q, x, w);
    REQUIRE(x.size() == static_cast<std::size_t>(q));
    for (int deg = 0; deg < 2 * q; ++deg) {
      double sum = 0.0;
      for (int i = 0; i < q; ++i) sum += w[static_cast<std::size_t>(i)] * std::pow(x[static_cast<std::size_t>(i)], deg);
      double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("index pairs of the engel example") {
  auto f = builtin_frame("engel-so3r");
  struct Case {
    double s;
    int f, e;
  };
  for (auto c : {Case{2.0, 0, 0}, Case{4.0, 1, 0}, Case{7.0, 2, 1}}) {
    CAPTURE(c.s);
    auto ip = hessian_indices(f, c.s);
    CHECK(ip.endpoint.negative == c.f);
    CHECK(ip.extended.negative == c.e);
    CHECK(ip.endpoint.null == 0);
    CHECK(ip.extended.null == 0);
  }
}

TEST_CASE("null direction appears at a conjugate time") {
  auto f = builtin_frame("engel-so3r");
  auto ip = hessian_indices(f, kPi);
  CHECK(ip.endpoint.null == 1);
  CHECK(ip.endpoint.negative == 0);
  CHECK(ip.extended.null == 0);
}

TEST_CASE("negative index is non-decreasing in s") {
  auto f = builtin_frame("engel-so3r");
  std::vector<double> s;
  for (double x = 0.4; x < 19.0; x += 0.37) s.push_back(x);
  auto rows = index_profile(f, s);
  REQUIRE(rows.size() == s.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].s == s[i]);
    CHECK(rows[i].error.empty());
    if (i > 0) {
      CHECK(rows[i].ind_f >= rows[i - 1].ind_f);
      CHECK(rows[i].ind_ext >= rows[i - 1].ind_ext);
    }
  }
}

TEST_CASE("counts are stable under grid refinement away from zeros") {
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig n1, n2;
  n1.grid = 100;
  n2.grid = 200;
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.3, 19.0);
  int tested = 0;
  while (tested < 8) {
    double s = u(rng);
    if (distance_to_zeros(s) <= 5.0 * s / n1.grid) continue;
    ++tested;
    CAPTURE(s);
    auto a = hessian_indices(f, s, n1), b = hessian_indices(f, s, n2);
    CHECK(a.endpoint.negative == b.endpoint.negative);
    CHECK(a.extended.negative == b.extended.negative);
    CHECK(a.endpoint.null == b.endpoint.null);
    CHECK(a.extended.null == b.extended.null);
  }
}

TEST_CASE("spectral gap between conjugate times") {
  auto f = builtin_frame("engel-so3r");
  for (double s : {1.5, 4.7, 7.6, 9.2, 11.0, 14.0}) {
    CAPTURE(s);
    auto ip = hessian_indices(f, s);
    CHECK(ip.endpoint.min_abs / ip.endpoint.max_abs > 1e-4);
    CHECK(ip.extended.min_abs / ip.extended.max_abs > 1e-4);
  }
}

TEST_CASE("inertia is invariant under covector scaling and constraint basis change") {
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig cfg;
  cfg.grid = 80;
  const double s = 7.0;
  auto ab = abnormal_covector(f, s, cfg);
  auto k = bracket_kernels(f, ab, cfg);
  auto base = inertia(assemble_form(k, Variant::Extended));

  auto scaled = ab;
  scaled.lambda *= 3.5;
  scaled.eta0 *= 3.5;
  for (auto& e : scaled.eta) e *= 3.5;
  auto ks = bracket_kernels(f, scaled, cfg);
  auto si = inertia(assemble_form(ks, Variant::Extended));
  CHECK(si.negative == base.negative);
  CHECK(si.null == base.null);

  auto q = assemble_form(k, Variant::Extended);
  std::mt19937 rng(3);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd r(q.constraints.rows(), q.constraints.rows());
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = n01(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(r);
  Eigen::MatrixXd orth = qr.householderQ();
  q.constraints = orth * q.constraints;
  auto ri = inertia(q);
  CHECK(ri.negative == base.negative);
  CHECK(ri.null == base.null);
  CHECK(ri.positive == base.positive);
}

TEST_CASE("form is symmetric with the expected shape") {
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig cfg;
  cfg.grid = 40;
  auto k = bracket_kernels(f, abnormal_covector(f, 3.0, cfg), cfg);
  for (auto v : {Variant::Endpoint, Variant::Extended}) {
    auto q = assemble_form(k, v);
    CHECK(q.form.rows() == 41);
    CHECK((q.form - q.form.transpose()).norm() < 1e-12 * q.form.norm());
    CHECK(q.constraints.cols() == 41);
  }
  CHECK(assemble_form(k, Variant::Endpoint).constraints.rows() == 2);
  CHECK(assemble_form(k, Variant::Extended).constraints.rows() == 3);
  CHECK(k.l.minCoeff() > 0.0);
}

TEST_CASE("index jumps located by bisection") {
  auto f = builtin_frame("engel-so3r");
  auto z = hessian_zeros(f, 0.0, 7.0, 0.25, 1e-6);
  REQUIRE(z.endpoint.size() == 2);
  CHECK(z.endpoint[0].s == doctest::Approx(kPi).epsilon(1e-5));
  CHECK(z.endpoint[1].s == doctest::Approx(2 * kPi).epsilon(1e-5));
  REQUIRE(z.extended.size() == 1);
  CHECK(z.extended[0].s == doctest::Approx(2 * kPi).epsilon(1e-5));
  CHECK(z.extended[0].multiplicity == 1);
}

TEST_CASE("profile records per-horizon failures and continues") {
  auto f = builtin_frame("heisenberg");
  auto rows = index_profile(f, {1.0, 2.0});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].error.empty());
  CHECK(rows[0].ind_f == -1);
}
