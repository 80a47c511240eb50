#include "sgc/vfcore/field.hpp"

#include <algorithm>
#include <cmath>

namespace sgc {

namespace {
[[noreturn]] void no_dual(const VectorField& f, int depth) {
  throw NotDifferentiable("field '" + f.describe() + "' has no dual evaluation at depth " +
                          std::to_string(depth));
}
}  // namespace

void VectorField::eval(std::span<const D1>, std::span<D1>) const { no_dual(*this, 1); }
void VectorField::eval(std::span<const D2>, std::span<D2>) const { no_dual(*this, 2); }
void VectorField::eval(std::span<const D3>, std::span<D3>) const { no_dual(*this, 3); }
void VectorField::eval(std::span<const D4>, std::span<D4>) const { no_dual(*this, 4); }

Eigen::VectorXd VectorField::operator()(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dim())
    throw DomainError("point dimension " + std::to_string(x.size()) + " does not match field dimension " +
                      std::to_string(dim()));
  Eigen::VectorXd out(x.size());
  eval(std::span<const double>(x.data(), x.size()), std::span<double>(out.data(), out.size()));
  return out;
}

FunctionField::FunctionField(std::size_t n, Fn fn, std::string name)
    : n_(n), fn_(std::move(fn)), name_(std::move(name)) {}

void FunctionField::eval(std::span<const double> x, std::span<double> out) const { fn_(x, out); }

double fd_displacement(std::span<const double> x, const DiffConfig& cfg) {
  double nrm = 0.0;
  for (double v : x) nrm += v * v;
  return cfg.fd_step * std::max(1.0, std::sqrt(nrm));
}

Eigen::MatrixXd jacobian(const VectorField& f, const Eigen::VectorXd& x, const DiffConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  Eigen::MatrixXd J(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n), col(n);
  std::span<const double> xs(x.data(), x.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    e.setZero();
    e(j) = 1.0;
    directional_derivative<double>(f, xs, std::span<const double>(e.data(), n), std::span<double>(col.data(), n),
                                   cfg);
    J.col(j) = col;
  }
  return J;
}

}  // namespace sgc
