#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "../oracle/engel_oracle.hpp"
#include "sgc/vfcore/bracket.hpp"
#include "sgc/vfcore/dual.hpp"
#include "sgc/vfcore/expr.hpp"
#include "sgc/vfcore/frame.hpp"

using namespace sgc;

namespace {

double eval1(const std::string& text, std::vector<double> x) {
  auto e = parse_expression(text, static_cast<int>(x.size()));
  return e.eval<double>(std::span<const double>(x));
}

std::string random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 1);
  std::uniform_real_distribution<double> num(-3.0, 3.0);
  switch (pick(rng)) {
    case 0: return "x" + std::to_string(std::uniform_int_distribution<int>(1, 3)(rng));
    case 1: {
      std::ostringstream os;
      os.precision(17);
      os << num(rng);
      return "(" + os.str() + ")";
    }
    case 2: return random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
    case 5: return "(" + random_expr(rng, depth - 1) + ") / (2.5 + cos(" + random_expr(rng, depth - 1) + "))";
    case 6: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 7: return "-(" + random_expr(rng, depth - 1) + ")";
    case 8: return "exp(0.1 * cos(" + random_expr(rng, depth - 1) + "))";
    default: return "sqrt(1 + " + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
  }
}

FieldPtr poly_field(std::mt19937& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::vector<std::string> comps;
  for (int i = 0; i < 3; ++i) {
    std::ostringstream os;
    os << c(rng) << "*x1*x2 + " << c(rng) << "*x3*x3 + " << c(rng) << "*sin(x" << (i + 1) << ") + " << c(rng);
    comps.push_back(os.str());
  }
  return ExpressionField::parse(comps);
}

}  // namespace

TEST_CASE("dual numbers differentiate elementary functions") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    double x = u(rng);
    D1 d(x, 1.0);
    CHECK(sin(d).d == doctest::Approx(std::cos(x)).epsilon(1e-14));
    CHECK(exp(d * d).d == doctest::Approx(2 * x * std::exp(x * x)).epsilon(1e-13));
    CHECK(sqrt(d * d + 1.0).d == doctest::Approx(x / std::sqrt(x * x + 1)).epsilon(1e-13));
    CHECK((1.0 / (d + 3.0)).d == doctest::Approx(-1.0 / ((x + 3) * (x + 3))).epsilon(1e-13));
    // nested duals give the second derivative
    D2 dd(D1(x, 1.0), D1(1.0, 0.0));
    CHECK(sin(dd).d.d == doctest::Approx(-std::sin(x)).epsilon(1e-13));
  }
}

TEST_CASE("parser precedence and associativity") {
  CHECK(eval1("1 - 2 - 3", {0}) == -4.0);
  CHECK(eval1("8 / 4 / 2", {0}) == 1.0);
  CHECK(eval1("-x1*x2", {2, 3}) == -6.0);
  CHECK(eval1("2 + 3*x1", {2}) == 8.0);
  CHECK(eval1("-(x1 - 1)*2", {4}) == -6.0);
  CHECK(eval1("2*pi", {0}) == doctest::Approx(2 * std::numbers::pi));
  CHECK(eval1("1.5e1 + x1", {1}) == 16.0);
}

TEST_CASE("parse errors carry the offending position") {
  auto position = [](const std::string& text, int n) -> long {
    try {
      parse_expression(text, n);
    } catch (const ParseError& e) {
      return static_cast<long>(e.position());
    }
    return -1;
  };
  CHECK(position("x1 + * x2", 2) == 5);
  CHECK(position("foo(x1)", 1) == 0);
  CHECK(position("x1 + x4", 3) == 5);
  CHECK(position("sin(x1", 1) == 6);
  CHECK(position("x1 x2", 2) == 3);
  CHECK(position("", 1) == 0);
}

TEST_CASE("printing round-trips through the parser") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    std::string text = random_expr(rng, 4);
    Expression e = parse_expression(text, 3);
    std::string printed = to_string(e);
    Expression back = parse_expression(printed, 3);
    CHECK(to_string(back) == printed);
    std::vector<double> x{u(rng), u(rng), u(rng)};
    double a = e.eval<double>(std::span<const double>(x)), b = back.eval<double>(std::span<const double>(x));
    if (std::isfinite(a)) CHECK(b == doctest::Approx(a).epsilon(1e-14));
  }
}

TEST_CASE("finite differences agree with dual numbers") {
  std::mt19937 rng(3);
  auto f = poly_field(rng);
  auto opaque = std::make_shared<FunctionField>(
      3, [f](std::span<const double> x, std::span<double> out) { f->eval(x, out); });
  DiffConfig fd;
  fd.mode = DiffMode::FiniteDifference;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Random(3);
    Eigen::MatrixXd jd = jacobian(*f, x), jf = jacobian(*f, x, fd), jo = jacobian(*opaque, x);
    CHECK((jd - jf).norm() < 1e-8);
    CHECK((jd - jo).norm() < 1e-8);
  }
}

TEST_CASE("opaque fields cannot be differentiated twice by duals") {
  auto opaque = std::make_shared<FunctionField>(2, [](std::span<const double> x, std::span<double> out) {
    out[0] = x[1];
    out[1] = -x[0];
  });
  std::vector<D1> x{D1(1.0, 0.0), D1(0.0, 1.0)}, dir{D1(1.0, 0.0), D1(0.0, 0.0)}, out(2);
  CHECK_THROWS_AS(directional_derivative<D1>(*opaque, x, dir, out, DiffConfig{}), NotDifferentiable);
  bool used_fd = false;
  std::vector<double> xd{1.0, 0.0}, dd{0.0, 1.0}, od(2);
  directional_derivative<double>(*opaque, xd, dd, od, DiffConfig{}, &used_fd);
  CHECK(used_fd);
  CHECK(od[0] == doctest::Approx(1.0));
}

TEST_CASE("brackets are antisymmetric and satisfy the Jacobi identity") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = poly_field(rng), b = poly_field(rng), c = poly_field(rng);
    Eigen::VectorXd x = Eigen::VectorXd::Random(3);
    CHECK((lie_bracket(a, b, x) + lie_bracket(b, a, x)).norm() < 1e-13);
    Eigen::VectorXd jac = lie_bracket(a, bracket(b, c), x) + lie_bracket(b, bracket(c, a), x) +
                          lie_bracket(c, bracket(a, b), x);
    CHECK(jac.norm() < 1e-12);
  }
}

TEST_CASE("bracket convention on a coordinate example") {
  // A = d/dx1, B = x1 d/dx2: [A,B] = DB A - DA B = d/dx2
  auto a = ExpressionField::parse({"1", "0"});
  auto b = ExpressionField::parse({"0", "x1"});
  Eigen::VectorXd v = lie_bracket(a, b, Eigen::Vector2d(0.3, -1.0));
  CHECK(v(0) == doctest::Approx(0.0));
  CHECK(v(1) == doctest::Approx(1.0));
}

TEST_CASE("engel brackets match matrix commutators") {
  auto f = builtin_frame("engel-so3r");
  std::mt19937 rng(5);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 25; ++i) {
    Eigen::Quaterniond q(n01(rng), n01(rng), n01(rng), n01(rng));
    q.normalize();
    Eigen::Matrix3d r = q.toRotationMatrix();
    Eigen::VectorXd x = oracle::point(r, n01(rng));
    auto c1 = oracle::commutator(oracle::x1(), oracle::x2());
    auto c2 = oracle::commutator(oracle::x1(), c1);
    CHECK((lie_bracket(f.x1, f.x2, x) - oracle::ambient(r, c1)).norm() < 1e-12);
    auto it = iterated_ad(f.x1, f.x2, 2, x);
    CHECK((it.value - oracle::ambient(r, c2)).norm() < 1e-12);
    CHECK(it.fd_levels == 0);
    // (ad X1)^2 X2 = X1/2 - X2
    CHECK((it.value - 0.5 * (*f.x1)(x) + (*f.x2)(x)).norm() < 1e-12);
  }
}

TEST_CASE("finite-difference nesting is reported") {
  auto f = builtin_frame("engel-so3r");
  DiffConfig fd;
  fd.mode = DiffMode::FiniteDifference;
  auto it = iterated_ad(f.x1, f.x2, 3, f.base_point, fd);
  CHECK(it.fd_levels == 3);
  CHECK(it.accuracy_warning);
}

TEST_CASE("expression JSON reproduces the builtin engel frame") {
  auto builtin = builtin_frame("engel-so3r");
  auto expr = frame_from_json(builtin_frame_json("engel-so3r"));
  CHECK(expr.intrinsic_dim == 4);
  std::mt19937 rng(9);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 10; ++i) {
    Eigen::Quaterniond q(n01(rng), n01(rng), n01(rng), n01(rng));
    q.normalize();
    Eigen::VectorXd x = oracle::point(q.toRotationMatrix(), n01(rng));
    CHECK(((*builtin.x1)(x) - (*expr.x1)(x)).norm() < 1e-14);
    CHECK(((*builtin.x2)(x) - (*expr.x2)(x)).norm() < 1e-14);
    CHECK((lie_bracket(builtin.x1, builtin.x2, x) - lie_bracket(expr.x1, expr.x2, x)).norm() < 1e-13);
  }
}

TEST_CASE("frame checks") {
  auto engel = builtin_frame("engel-so3r");
  auto chk = check_frame(engel, engel.base_point);
  CHECK(chk.ok);
  CHECK(chk.tangency_residual < 1e-12);
  auto chart = chart_at(engel, engel.base_point);
  CHECK(chart.dim() == 4);
  Eigen::Vector4d c = chart.coords((*engel.x1)(engel.base_point));
  CHECK((c - oracle::coords(oracle::x1())).norm() < 1e-14);
  CHECK_THROWS_AS(builtin_frame("nope"), ConfigError);
  CHECK_THROWS_AS(resolve_frame("/definitely/missing.json"), ConfigError);
}

TEST_CASE("malformed frame definitions are rejected") {
  nlohmann::json j = builtin_frame_json("martinet");
  j["fields"]["X1"] = std::vector<std::string>{"0", "1"};
  CHECK_THROWS_AS(frame_from_json(j), ConfigError);
  j = builtin_frame_json("martinet");
  j["fields"]["X1"][0] = "x1 +";
  CHECK_THROWS_AS(frame_from_json(j), ParseError);
  j = builtin_frame_json("martinet");
  j["tangent_frame"] = "spherical";
  CHECK_THROWS_AS(frame_from_json(j), ConfigError);
}
