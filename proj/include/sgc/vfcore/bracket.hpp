#pragma once

#include <algorithm>
#include <vector>

#include "sgc/vfcore/field.hpp"

namespace sgc {

// [A,B](x) = DB(x) A(x) - DA(x) B(x).
class BracketField final : public TemplatedField<BracketField> {
 public:
  BracketField(FieldPtr a, FieldPtr b, DiffConfig cfg = {});

  std::size_t dim() const override { return a_->dim(); }
  int dual_capacity() const override;
  std::string describe() const override;

  // True when evaluation at double precision falls back to finite differences.
  bool uses_fd() const;

  template <class T>
  void apply(std::span<const T> x, std::span<T> out) const {
    const std::size_t n = x.size();
    std::vector<T> av(n), bv(n), dba(n), dab(n);
    a_->eval(x, std::span<T>(av));
    b_->eval(x, std::span<T>(bv));
    directional_derivative<T>(*b_, x, std::span<const T>(av), std::span<T>(dba), cfg_);
    directional_derivative<T>(*a_, x, std::span<const T>(bv), std::span<T>(dab), cfg_);
    for (std::size_t i = 0; i < n; ++i) out[i] = dba[i] - dab[i];
  }

 private:
  FieldPtr a_, b_;
  DiffConfig cfg_;
};

FieldPtr bracket(FieldPtr a, FieldPtr b, const DiffConfig& cfg = {});

// Value of [A,B] at x.
Eigen::VectorXd lie_bracket(const FieldPtr& a, const FieldPtr& b, const Eigen::VectorXd& x,
                            const DiffConfig& cfg = {});

// Fields Y, (ad X)Y, ..., (ad X)^k Y.
std::vector<FieldPtr> ad_chain(const FieldPtr& x, const FieldPtr& y, int k, const DiffConfig& cfg = {});

struct IteratedBracket {
  Eigen::VectorXd value;
  int fd_levels = 0;             // nesting levels differentiated by finite differences
  bool accuracy_warning = false;
};

// (ad X)^k Y at x.
IteratedBracket iterated_ad(const FieldPtr& x, const FieldPtr& y, int k, const Eigen::VectorXd& point,
                            const DiffConfig& cfg = {});

}  // namespace sgc
