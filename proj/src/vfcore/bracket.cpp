#include "sgc/vfcore/bracket.hpp"

namespace sgc {

BracketField::BracketField(FieldPtr a, FieldPtr b, DiffConfig cfg)
    : a_(std::move(a)), b_(std::move(b)), cfg_(cfg) {
  if (!a_ || !b_) throw ConfigError("bracket of a null field");
  if (a_->dim() != b_->dim()) throw ConfigError("bracket of fields with different dimensions");
}

int BracketField::dual_capacity() const {
  if (cfg_.mode != DiffMode::Dual) return 0;
  return std::max(0, std::min(a_->dual_capacity(), b_->dual_capacity()) - 1);
}

bool BracketField::uses_fd() const {
  return cfg_.mode != DiffMode::Dual || std::min(a_->dual_capacity(), b_->dual_capacity()) < 1;
}

std::string BracketField::describe() const { return "[" + a_->describe() + "," + b_->describe() + "]"; }

FieldPtr bracket(FieldPtr a, FieldPtr b, const DiffConfig& cfg) {
  return std::make_shared<BracketField>(std::move(a), std::move(b), cfg);
}

Eigen::VectorXd lie_bracket(const FieldPtr& a, const FieldPtr& b, const Eigen::VectorXd& x, const DiffConfig& cfg) {
  return BracketField(a, b, cfg)(x);
}

std::vector<FieldPtr> ad_chain(const FieldPtr& x, const FieldPtr& y, int k, const DiffConfig& cfg) {
  if (k < 0) throw ConfigError("negative bracket order");
  std::vector<FieldPtr> chain{y};
  for (int i = 1; i <= k; ++i) chain.push_back(bracket(x, chain.back(), cfg));
  return chain;
}

IteratedBracket iterated_ad(const FieldPtr& x, const FieldPtr& y, int k, const Eigen::VectorXd& point,
                            const DiffConfig& cfg) {
  auto chain = ad_chain(x, y, k, cfg);
  IteratedBracket r;
  r.value = (*chain.back())(point);
  for (int i = 1; i <= k; ++i)
    if (static_cast<const BracketField&>(*chain[static_cast<std::size_t>(i)]).uses_fd()) ++r.fd_levels;
  r.accuracy_warning = r.fd_levels >= cfg.fd_warning_levels;
  return r;
}

}  // namespace sgc
