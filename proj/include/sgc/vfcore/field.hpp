#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgc/vfcore/dual.hpp"
#include "sgc/vfcore/error.hpp"

namespace sgc {

enum class DiffMode { Dual, FiniteDifference };

struct DiffConfig {
  DiffMode mode = DiffMode::Dual;
  double fd_step = 1e-5;        // scaled by max(1, |x|)
  int fd_warning_levels = 2;    // nested finite-difference levels before flagging accuracy loss
};

// Smooth vector field on an ambient R^n. Evaluation is overloaded on the
// scalar type so dual numbers can flow through it; fields that cannot be
// differentiated report dual_capacity() == 0 and throw on dual input.
class VectorField {
 public:
  virtual ~VectorField() = default;

  virtual std::size_t dim() const = 0;
  // Maximum nesting depth of Dual supported by eval.
  virtual int dual_capacity() const { return 0; }
  virtual std::string describe() const { return "field"; }

  virtual void eval(std::span<const double> x, std::span<double> out) const = 0;
  virtual void eval(std::span<const D1> x, std::span<D1> out) const;
  virtual void eval(std::span<const D2> x, std::span<D2> out) const;
  virtual void eval(std::span<const D3> x, std::span<D3> out) const;
  virtual void eval(std::span<const D4> x, std::span<D4> out) const;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
};

using FieldPtr = std::shared_ptr<const VectorField>;

// Implements every eval overload through Derived::apply<T>.
template <class Derived>
class TemplatedField : public VectorField {
 public:
  void eval(std::span<const double> x, std::span<double> out) const override { self().apply(x, out); }
  void eval(std::span<const D1> x, std::span<D1> out) const override { self().apply(x, out); }
  void eval(std::span<const D2> x, std::span<D2> out) const override { self().apply(x, out); }
  void eval(std::span<const D3> x, std::span<D3> out) const override { self().apply(x, out); }
  void eval(std::span<const D4> x, std::span<D4> out) const override { self().apply(x, out); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Field given by a plain callback. Differentiated by finite differences only.
class FunctionField final : public VectorField {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;
  FunctionField(std::size_t n, Fn fn, std::string name = "function");
  std::size_t dim() const override { return n_; }
  std::string describe() const override { return name_; }
  void eval(std::span<const double> x, std::span<double> out) const override;
  using VectorField::eval;

 private:
  std::size_t n_;
  Fn fn_;
  std::string name_;
};

// Finite-difference displacement used for a point x.
double fd_displacement(std::span<const double> x, const DiffConfig& cfg);

// Derivative of f at x along dir, i.e. Df(x) dir. Uses a dual evaluation when
// the field supports depth(T)+1, otherwise central differences (T = double only).
template <class T>
void directional_derivative(const VectorField& f, std::span<const T> x, std::span<const T> dir,
                            std::span<T> out, const DiffConfig& cfg, bool* used_fd = nullptr) {
  const std::size_t n = x.size();
  constexpr int depth = dual_depth_v<T>;
  bool can_dual = cfg.mode == DiffMode::Dual && f.dual_capacity() >= depth + 1;
  if constexpr (depth < kMaxDualDepth) {
    if (can_dual) {
      std::vector<Dual<T>> xs(n), ys(n);
      for (std::size_t i = 0; i < n; ++i) xs[i] = Dual<T>(x[i], dir[i]);
      f.eval(std::span<const Dual<T>>(xs), std::span<Dual<T>>(ys));
      for (std::size_t i = 0; i < n; ++i) out[i] = ys[i].d;
      if (used_fd) *used_fd = false;
      return;
    }
  }
  if constexpr (depth == 0) {
    double dn = 0.0;
    for (std::size_t i = 0; i < n; ++i) dn += dir[i] * dir[i];
    dn = std::sqrt(dn);
    if (dn == 0.0) {
      for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
      if (used_fd) *used_fd = true;
      return;
    }
    double eps = fd_displacement(x, cfg) / dn;
    std::vector<double> xp(n), xm(n), yp(n), ym(n);
    for (std::size_t i = 0; i < n; ++i) {
      xp[i] = x[i] + eps * dir[i];
      xm[i] = x[i] - eps * dir[i];
    }
    f.eval(std::span<const double>(xp), std::span<double>(yp));
    f.eval(std::span<const double>(xm), std::span<double>(ym));
    for (std::size_t i = 0; i < n; ++i) out[i] = (yp[i] - ym[i]) / (2.0 * eps);
    if (used_fd) *used_fd = true;
  } else {
    throw NotDifferentiable("field '" + f.describe() + "' does not support dual depth " +
                            std::to_string(depth + 1));
  }
}

// Ambient Jacobian Df(x), n x n.
Eigen::MatrixXd jacobian(const VectorField& f, const Eigen::VectorXd& x, const DiffConfig& cfg = {});

}  // namespace sgc
