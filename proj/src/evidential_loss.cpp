#include "evr/evidential_loss.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "evr/error.hpp"
#include "evr/special_functions.hpp"

namespace evr {

LabeledExample::LabeledExample(Eigen::Index label, DirichletParams alpha)
    : label_(label), alpha_(std::move(alpha)) {
  if (label_ < 0 || label_ >= alpha_.size()) {
    throw DimensionError("label " + std::to_string(label_) + " outside [0, " +
                         std::to_string(alpha_.size()) + ")");
  }
}

Vector LabeledExample::one_hot() const {
  Vector y = Vector::Zero(alpha_.size());
  y[label_] = 1.0;
  return y;
}

void LossConfig::validate() const {
  if (!std::isfinite(kl_weight_max) || kl_weight_max < 0.0) {
    throw InvalidInput("kl_weight_max must be finite and non-negative");
  }
  if (enabled && anneal_epochs < 1) {
    throw InvalidInput("anneal_epochs must be at least 1 when the KL term is enabled");
  }
}

double LossConfig::kl_weight(int epoch) const {
  if (!enabled) {
    return 0.0;
  }
  const double ramp = static_cast<double>(epoch) / static_cast<double>(anneal_epochs);
  return kl_weight_max * std::min(1.0, ramp);
}

double bayes_risk_loss(const LabeledExample& ex) {
  const auto& alpha = ex.alpha().values().array();
  const double s = ex.alpha().strength();
  const Eigen::ArrayXd mean = alpha / s;
  const Eigen::ArrayXd var = mean * (1.0 - mean) / (s + 1.0);
  Eigen::ArrayXd err = -mean;
  err[ex.label()] += 1.0;
  return (err.square() + var).sum();
}

Vector bayes_risk_grad(const LabeledExample& ex) {
  // L = sum_j (y_j - m_j)^2 + m_j (1 - m_j) / (S + 1),  m_j = alpha_j / S
  // dm_j/dalpha_k = (delta_jk - m_j) / S
  const auto& alpha = ex.alpha().values().array();
  const double s = ex.alpha().strength();
  const Eigen::ArrayXd mean = alpha / s;
  Eigen::ArrayXd err = -mean;
  err[ex.label()] += 1.0;

  const Eigen::ArrayXd dl_dm = -2.0 * err + (1.0 - 2.0 * mean) / (s + 1.0);
  const double projected = (dl_dm * mean).sum();
  const double ds_term = (1.0 - mean.square().sum()) / ((s + 1.0) * (s + 1.0));
  return ((dl_dm - projected) / s - ds_term).matrix();
}

double kl_to_uniform(const DirichletParams& alpha) {
  const double s = alpha.strength();
  const double psi_s = special::digamma(s);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    acc += (alpha[k] - 1.0) * (special::digamma(alpha[k]) - psi_s);
  }
  // ln B(1) = -ln Gamma(K)
  const double log_beta_uniform = -special::lgamma(static_cast<double>(alpha.size()));
  const double kl = log_beta_uniform - log_beta(alpha) + acc;
  return kl > 0.0 ? kl : 0.0;
}

Vector kl_to_uniform_grad(const DirichletParams& alpha) {
  const double s = alpha.strength();
  const double excess = s - static_cast<double>(alpha.size());
  const double tri_s = special::trigamma(s);
  Vector grad(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    grad[k] = (alpha[k] - 1.0) * special::trigamma(alpha[k]) - excess * tri_s;
  }
  return grad;
}

DirichletParams misleading_alpha(const LabeledExample& ex) {
  Vector tilde = ex.alpha().values();
  tilde[ex.label()] = 1.0;
  return DirichletParams(tilde);
}

ExampleLoss example_loss_and_grad(const LabeledExample& ex, double kl_weight) {
  ExampleLoss out{bayes_risk_loss(ex), bayes_risk_grad(ex)};
  if (kl_weight > 0.0) {
    const DirichletParams tilde = misleading_alpha(ex);
    out.value += kl_weight * kl_to_uniform(tilde);
    Vector g = kl_to_uniform_grad(tilde);
    g[ex.label()] = 0.0;
    out.grad_alpha += kl_weight * g;
  }
  return out;
}

namespace {
// Pairwise summation keeps the reduction independent of how a caller might
// chunk the batch.
double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}
}  // namespace

double batch_loss(std::span<const LabeledExample> examples, int epoch,
                  const LossConfig& cfg) {
  if (examples.empty()) {
    throw InvalidInput("batch_loss: empty batch");
  }
  cfg.validate();
  const double lambda = cfg.kl_weight(epoch);
  std::vector<double> terms;
  terms.reserve(examples.size());
  for (const auto& ex : examples) {
    double v = bayes_risk_loss(ex);
    if (lambda > 0.0) {
      v += lambda * kl_to_uniform(misleading_alpha(ex));
    }
    terms.push_back(v);
  }
  return pairwise_sum(terms) / static_cast<double>(examples.size());
}

}  // namespace evr
