#include "doctest.h"

#include <cmath>
#include <numbers>

#include "../oracle/engel_oracle.hpp"
#include "sgc/cli/verify.hpp"
#include "sgc/jacobi/jacobi.hpp"

using namespace sgc;

namespace {

constexpr double kPi = std::numbers::pi;

ZeroScan scan(double step) {
  ZeroScan z;
  z.scan_step = step;
  z.tol = 1e-10;
  return z;
}

}  // namespace

TEST_CASE("structural functions of the engel example") {
  auto f = builtin_frame("engel-so3r");
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(0.5 * i);
  auto sf = structural_functions(f, t);
  CHECK(sf.order == 2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    CHECK(sf.alpha(0, c) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::abs(sf.alpha(1, c)) < 1e-10);
    CHECK(sf.beta[i] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(sf.residual[i] < 1e-10);
    CHECK(sf.independence[i] > 1e-3);
    CHECK(sf.transversality[i] > 1e-3);
  }
}

TEST_CASE("structural functions need intrinsic dimension four or more") {
  try {
    structural_functions(builtin_frame("martinet"), {0.0});
    FAIL("expected a hypothesis failure");
  } catch (const HypothesisError& e) {
    CHECK(e.check() == "dimension");
  }
}

TEST_CASE("zero location on synthetic functions") {
  auto z = locate_zeros([](double s) { return std::sin(s); }, 0.0, 10.0, scan(0.02));
  REQUIRE(z.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(z[static_cast<std::size_t>(k)].s == doctest::Approx((k + 1) * kPi).epsilon(1e-10));

  // zero at the right end of the range
  z = locate_zeros([](double s) { return std::sin(s); }, 0.0, 2 * kPi, scan(0.02));
  REQUIRE(z.size() == 2);
  CHECK(z[1].s == doctest::Approx(2 * kPi).epsilon(1e-10));

  // tangential zero without a sign change
  z = locate_zeros([](double s) { return (s - 1.337) * (s - 1.337); }, 0.0, 3.0, scan(0.05));
  REQUIRE(z.size() == 1);
  CHECK(z[0].tangential);
  CHECK(z[0].s == doctest::Approx(1.337).epsilon(1e-5));

  // multiplicity callback
  ZeroScan withm = scan(0.02);
  withm.multiplicity = [](double) { return 2; };
  z = locate_zeros([](double s) { return std::cos(s); }, 0.0, 3.0, withm);
  REQUIRE(z.size() == 1);
  CHECK(z[0].multiplicity == 2);

  // a zero at the open left end is excluded
  CHECK(locate_zeros([](double s) { return std::sin(s); }, 0.0, 1.0, scan(0.02)).empty());
  CHECK(locate_zeros([](double s) { return s + 1.0; }, 0.0, 5.0, scan(0.02)).empty());
}

TEST_CASE("shooting determinants are proportional to the closed forms") {
  auto f = builtin_frame("engel-so3r");
  double ra = 0.0, rb = 0.0;
  for (double s : {0.7, 2.0, 4.4, 8.0, 11.3}) {
    CAPTURE(s);
    auto a = shooting_determinant(f, s, ShootingCase::Endpoint);
    auto b = shooting_determinant(f, s, ShootingCase::Extended);
    double qa = a.determinant / std::sin(s), qb = b.determinant / oracle::extended_indicator(s);
    if (ra == 0.0) {
      ra = qa;
      rb = qb;
    }
    CHECK(qa == doctest::Approx(ra).epsilon(1e-6));
    CHECK(qb == doctest::Approx(rb).epsilon(1e-6));
    CHECK(a.zeta_residual < 1e-10);
    CHECK(a.rank_deficiency == 0);
  }
}

TEST_CASE("engel indicators are proportional to the closed forms") {
  auto f = builtin_frame("engel-so3r");
  double ra = engel_indicator(f, 1.0, ShootingCase::Endpoint) / std::sin(1.0);
  double rb = engel_indicator(f, 1.0, ShootingCase::Extended) / oracle::extended_indicator(1.0);
  for (double s : {2.2, 5.0, 9.7}) {
    CHECK(engel_indicator(f, s, ShootingCase::Endpoint) / std::sin(s) == doctest::Approx(ra).epsilon(1e-6));
    CHECK(engel_indicator(f, s, ShootingCase::Extended) / oracle::extended_indicator(s) ==
          doctest::Approx(rb).epsilon(1e-6));
  }
}

TEST_CASE("rank deficiency at a conjugate time") {
  auto f = builtin_frame("engel-so3r");
  auto a = shooting_determinant(f, kPi, ShootingCase::Endpoint);
  CHECK(a.rank_deficiency == 1);
}

TEST_CASE("engel indicators refuse other dimensions") {
  auto g = load_frame(SGC_TEST_DATA "/goursat5.json");
  CHECK(g.intrinsic_dim == 5);
  try {
    engel_indicator(g, 1.0, ShootingCase::Endpoint);
    FAIL("expected a hypothesis failure");
  } catch (const HypothesisError& e) {
    CHECK(e.check() == "dimension");
  }
}

TEST_CASE("endpoint conjugate times depend only on the distribution") {
  // X2 rescaled and mixed with X1 spans the same distribution along the same curve
  auto p = load_frame(SGC_TEST_DATA "/engel_perturbed.json");
  AnalysisConfig cfg;
  cfg.grid = 100;
  auto z = locate_zeros([&](double s) { return shooting_determinant(p, s, ShootingCase::Endpoint, cfg).determinant; },
                        0.0, 7.0, scan(0.1));
  REQUIRE(z.size() == 2);
  CHECK(z[0].s == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(z[1].s == doctest::Approx(2 * kPi).epsilon(1e-6));
  auto e = locate_zeros([&](double s) { return engel_indicator(p, s, ShootingCase::Endpoint, cfg); }, 0.0, 7.0,
                        scan(0.1));
  REQUIRE(e.size() == 2);
  CHECK(e[0].s == doctest::Approx(kPi).epsilon(1e-6));
}

TEST_CASE("closed-form root helpers agree with a direct scan") {
  auto a = verify::extended_roots(6 * kPi);
  auto b = oracle::extended_roots(6 * kPi);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
  CHECK(a.size() == 5);
  CHECK(a[1] == doctest::Approx(8.98681891).epsilon(1e-8));
  auto e = verify::endpoint_roots(3 * kPi);
  REQUIRE(e.size() == 3);
  CHECK(e[2] == doctest::Approx(3 * kPi));
}
