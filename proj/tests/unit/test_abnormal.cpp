#include "doctest.h"

#include <cmath>

#include "../oracle/engel_oracle.hpp"
#include "sgc/abnormal/abnormal.hpp"
#include "sgc/vfcore/bracket.hpp"

using namespace sgc;

TEST_CASE("engel curve is corank one with the closed-form covector") {
  auto f = builtin_frame("engel-so3r");
  for (double s : {1.0, 3.0, 4.0, 7.0}) {
    CAPTURE(s);
    auto a = abnormal_covector(f, s);
    CHECK(a.corank == 1);
    CHECK(a.lambda.norm() == doctest::Approx(1.0));
    Eigen::Vector4d ref = oracle::annihilator(s);
    CHECK(std::abs(a.lambda.dot(ref)) > 1.0 - 1e-8);
    CHECK(a.goh_residual < 1e-8);
    CHECK(a.annihilation_residual < 1e-8);
    CHECK(a.legendre_min > 0.0);
  }
}

TEST_CASE("legendre value at the start matches the adjoint computation") {
  auto f = builtin_frame("engel-so3r");
  const double s = 3.0;
  auto a = abnormal_covector(f, s);
  // eta_0 = Ad_{exp(-s A1)}^T lambda in left-invariant coordinates
  auto w = oracle::commutator(oracle::commutator(oracle::x1(), oracle::x2()), oracle::x2());
  Eigen::Vector4d lam = oracle::annihilator(s);
  Eigen::Matrix3d g = oracle::expm(-s * oracle::x1().a);
  Eigen::Vector4d moved = oracle::coords({g * w.a * g.transpose(), 0.0});
  double expected = std::abs(lam.dot(moved));
  auto chart = chart_at(f, f.base_point);
  auto ww = bracket(bracket(f.x1, f.x2), f.x2);
  double got = a.eta0.dot(chart.coords((*ww)(f.base_point)));
  CHECK(got == doctest::Approx(expected).epsilon(1e-8));
  CHECK(got > 0.0);
  CHECK(a.legendre_min <= got + 1e-12);
}

TEST_CASE("differential matrix has rank three") {
  auto f = builtin_frame("engel-so3r");
  auto d = differential_matrix(f, 2.0);
  CHECK(d.rank == 3);
  CHECK_FALSE(d.underresolved);
  CHECK(d.matrix.rows() == 4);
}

TEST_CASE("cost-gradient projection matches the dense oracle") {
  auto f = builtin_frame("engel-so3r");
  for (double s : {1.0, 2.0, 4.0}) {
    CAPTURE(s);
    double ref = oracle::j_projection(s, 2000);
    CHECK(j_projection(f, s) == doctest::Approx(ref).epsilon(2e-3));
  }
}

TEST_CASE("hypothesis battery") {
  auto f = builtin_frame("engel-so3r");
  auto rep = check_hypotheses(f, 4.0);
  CHECK(rep.failed_check.empty());
  CHECK(rep.strictness_residual < 1e-8);
  CHECK(rep.j_projection_norm > 0.1);
  auto js = to_json(rep);
  CHECK(js["hypotheses_hold"].get<bool>());
}

TEST_CASE("martinet curve is not strictly abnormal") {
  auto f = builtin_frame("martinet");
  CHECK(strictness_check(f, 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  auto rep = check_hypotheses(f, 1.0);
  CHECK(rep.failed_check == "strictness");
}

TEST_CASE("heisenberg has no abnormal covector") {
  auto f = builtin_frame("heisenberg");
  try {
    abnormal_covector(f, 1.0);
    FAIL("expected a hypothesis failure");
  } catch (const HypothesisError& e) {
    CHECK(e.check() == "corank");
  }
  CHECK(check_hypotheses(f, 1.0).failed_check == "corank");
}

TEST_CASE("covector sign and scale do not depend on the grid") {
  auto f = builtin_frame("engel-so3r");
  AnalysisConfig coarse, fine;
  coarse.grid = 50;
  fine.grid = 400;
  auto a = abnormal_covector(f, 2.5, coarse), b = abnormal_covector(f, 2.5, fine);
  CHECK((a.lambda - b.lambda).norm() < 1e-8);
}
