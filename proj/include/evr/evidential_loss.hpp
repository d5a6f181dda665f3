#pragma once

#include <span>

#include "evr/dirichlet.hpp"

namespace evr {

/// One-hot target paired with a predicted Dirichlet.
class LabeledExample {
 public:
  LabeledExample(Eigen::Index label, DirichletParams alpha);

  Eigen::Index label() const { return label_; }
  const DirichletParams& alpha() const { return alpha_; }
  Vector one_hot() const;

 private:
  Eigen::Index label_;
  DirichletParams alpha_;
};

/// Annealed KL-to-uniform regulariser. Disabled by default so the loss is
/// the plain expected squared error.
struct LossConfig {
  double kl_weight_max = 1.0;
  int anneal_epochs = 10;
  bool enabled = false;

  void validate() const;
  /// lambda_t = kl_weight_max * min(1, epoch / anneal_epochs), or 0.
  double kl_weight(int epoch) const;
};

/// Expected squared error under Dir(alpha):
///   sum_j (y_j - E[p_j])^2 + Var[p_j]
double bayes_risk_loss(const LabeledExample& ex);

/// d(bayes_risk_loss) / d(alpha).
Vector bayes_risk_grad(const LabeledExample& ex);

/// KL(Dir(alpha) || Dir(1, ..., 1)).
double kl_to_uniform(const DirichletParams& alpha);

/// d(kl_to_uniform) / d(alpha).
Vector kl_to_uniform_grad(const DirichletParams& alpha);

/// alpha with the true-class component reset to 1, so that only misleading
/// evidence is penalised by the KL term.
DirichletParams misleading_alpha(const LabeledExample& ex);

/// Mean over the batch of bayes_risk_loss + lambda_t * KL(misleading alpha).
double batch_loss(std::span<const LabeledExample> examples, int epoch,
                  const LossConfig& cfg);

/// Per-example total loss and its gradient w.r.t. alpha (not divided by the
/// batch size).
struct ExampleLoss {
  double value;
  Vector grad_alpha;
};
ExampleLoss example_loss_and_grad(const LabeledExample& ex, double kl_weight);

}  // namespace evr
