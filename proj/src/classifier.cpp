#include "evr/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "evr/error.hpp"

namespace evr {

std::string to_string(OutputActivation a) {
  switch (a) {
    case OutputActivation::Relu: return "relu";
    case OutputActivation::Softplus: return "softplus";
    case OutputActivation::Exp: return "exp";
    case OutputActivation::Softmax: return "softmax";
  }
  return "unknown";
}

OutputActivation parse_activation(const std::string& name) {
  if (name == "relu") return OutputActivation::Relu;
  if (name == "softplus") return OutputActivation::Softplus;
  if (name == "exp") return OutputActivation::Exp;
  if (name == "softmax") return OutputActivation::Softmax;
  throw InvalidInput("unknown activation '" + name + "'");
}

void ClassifierParams::validate() const {
  if (w1.rows() < 1 || w1.cols() < 1) {
    throw DimensionError("classifier: empty first layer");
  }
  if (b1.size() != w1.rows() || w2.cols() != w1.rows() || b2.size() != w2.rows()) {
    throw DimensionError("classifier: inconsistent layer shapes");
  }
  if (w2.rows() < 2) {
    throw DimensionError("classifier: need at least 2 output classes");
  }
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite()) {
    throw NumericalError("classifier: non-finite parameter");
  }
}

ClassifierParams ClassifierParams::zeros(Eigen::Index d, Eigen::Index h, Eigen::Index k,
                                         OutputActivation act) {
  return ClassifierParams{Matrix::Zero(h, d), Vector::Zero(h), Matrix::Zero(k, h),
                          Vector::Zero(k), act};
}

ClassifierParams ClassifierParams::glorot(Eigen::Index d, Eigen::Index h, Eigen::Index k,
                                          OutputActivation act, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill = [&rng](Matrix& m) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    // Row-major fill order, matching the checkpoint layout.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = dist(rng);
      }
    }
  };
  ClassifierParams p = zeros(d, h, k, act);
  fill(p.w1);
  fill(p.w2);
  return p;
}

void FeatureDataset::validate() const {
  if (records.empty()) {
    throw InvalidInput("dataset: no records");
  }
  if (num_classes < 2) {
    throw InvalidInput("dataset: need at least 2 classes");
  }
  const Eigen::Index d = dim();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.x.size() != d) {
      throw DimensionError("dataset: record " + std::to_string(i) + " has dimension " +
                           std::to_string(r.x.size()) + ", expected " + std::to_string(d));
    }
    if (!r.x.allFinite()) {
      throw InvalidInput("dataset: record " + std::to_string(i) + " is not finite");
    }
    if (r.label < 0 || r.label >= num_classes) {
      throw InvalidInput("dataset: record " + std::to_string(i) + " label out of range");
    }
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("learning rate must be positive");
  }
  if (epochs < 0 || batch_size < 1 || hidden < 1) {
    throw InvalidInput("epochs must be >= 0, batch size and hidden width >= 1");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw InvalidInput("momentum must lie in [0, 1)");
  }
  if (objective == Objective::SoftmaxMse && activation != OutputActivation::Softmax) {
    throw InvalidInput("softmax-mse objective requires the softmax output");
  }
  if (objective == Objective::Evidential && activation == OutputActivation::Softmax) {
    throw InvalidInput("evidential objective requires an evidence activation");
  }
  loss.validate();
}

TrainConfig demo_evidential_config(std::uint64_t seed) {
  TrainConfig c;
  c.learning_rate = 0.01;
  c.epochs = 30;
  c.seed = seed;
  c.optimizer = Optimizer::Adam;
  c.activation = OutputActivation::Exp;
  c.loss.enabled = true;
  c.loss.kl_weight_max = 1.0;
  c.loss.anneal_epochs = 10;
  return c;
}

TrainConfig control_config(std::uint64_t seed) {
  TrainConfig c = demo_evidential_config(seed);
  c.objective = Objective::SoftmaxMse;
  c.activation = OutputActivation::Softmax;
  c.loss.enabled = false;
  return c;
}

namespace {

void check_input(const ClassifierParams& params, const Vector& x) {
  if (x.size() != params.input_dim()) {
    throw DimensionError("feature has dimension " + std::to_string(x.size()) +
                         ", model expects " + std::to_string(params.input_dim()));
  }
  if (!x.allFinite()) {
    throw InvalidInput("feature vector is not finite");
  }
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double ez = std::exp(z);
  return ez / (1.0 + ez);
}

Vector softmax(const Vector& z) {
  const Vector shifted = (z.array() - z.maxCoeff()).exp().matrix();
  return shifted / shifted.sum();
}

Vector activation_values(OutputActivation act, const Vector& z) {
  switch (act) {
    case OutputActivation::Relu: return z.cwiseMax(0.0);
    case OutputActivation::Softplus: return z.unaryExpr(&softplus);
    case OutputActivation::Exp: return z.array().exp().matrix();
    case OutputActivation::Softmax: return softmax(z);
  }
  return z;
}

// Overflowing logits are a numerical failure, not bad input.
Vector apply_activation(OutputActivation act, const Vector& z) {
  Vector out = activation_values(act, z);
  if (!out.allFinite()) {
    throw NumericalError("classifier: output activation overflowed");
  }
  return out;
}

// Elementwise derivative for the evidence activations.
Vector activation_slope(OutputActivation act, const Vector& z) {
  switch (act) {
    case OutputActivation::Relu: return (z.array() > 0.0).cast<double>().matrix();
    case OutputActivation::Softplus: return z.unaryExpr(&sigmoid);
    case OutputActivation::Exp: return z.array().exp().matrix();
    case OutputActivation::Softmax: break;
  }
  throw InvalidInput("activation_slope: softmax has no elementwise slope");
}

struct ForwardCache {
  Vector hidden;
  Vector logits;
};

ForwardCache forward_cache(const ClassifierParams& p, const Vector& x) {
  ForwardCache c;
  c.hidden = (p.w1 * x + p.b1).array().tanh().matrix();
  c.logits = p.w2 * c.hidden + p.b2;
  return c;
}

// Flat parameter layout: w1 row-major, b1, w2 row-major, b2.
Eigen::Index flat_size(const ClassifierParams& p) {
  return p.w1.size() + p.b1.size() + p.w2.size() + p.b2.size();
}

template <typename M>
void pack_matrix(const M& m, Vector& out, Eigen::Index& at) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out[at++] = m(r, c);
    }
  }
}

template <typename M>
void unpack_matrix(M& m, const Vector& in, Eigen::Index& at) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = in[at++];
    }
  }
}

Vector flatten(const ParamGradient& g) {
  Vector out(g.w1.size() + g.b1.size() + g.w2.size() + g.b2.size());
  Eigen::Index at = 0;
  pack_matrix(g.w1, out, at);
  pack_matrix(g.b1, out, at);
  pack_matrix(g.w2, out, at);
  pack_matrix(g.b2, out, at);
  return out;
}

Vector flatten(const ClassifierParams& p) {
  return flatten(ParamGradient{p.w1, p.b1, p.w2, p.b2});
}

void assign(ClassifierParams& p, const Vector& flat) {
  Eigen::Index at = 0;
  unpack_matrix(p.w1, flat, at);
  unpack_matrix(p.b1, flat, at);
  unpack_matrix(p.w2, flat, at);
  unpack_matrix(p.b2, flat, at);
}

}  // namespace

Vector hidden_features(const ClassifierParams& params, const Vector& x) {
  check_input(params, x);
  return (params.w1 * x + params.b1).array().tanh().matrix();
}

Vector forward_output(const ClassifierParams& params, const Vector& x) {
  check_input(params, x);
  return apply_activation(params.activation, forward_cache(params, x).logits);
}

EvidenceVector forward_evidence(const ClassifierParams& params, const Vector& x) {
  if (!params.is_evidential()) {
    throw InvalidInput("forward_evidence: softmax control head produces no evidence");
  }
  return EvidenceVector(forward_output(params, x));
}

Eigen::Index argmax_lowest(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) {
      best = k;
    }
  }
  return best;
}

Prediction predict(const ClassifierParams& params, const Vector& x) {
  const EvidenceVector e = forward_evidence(params, x);
  DirichletParams alpha = evidence_to_alpha(e);
  const Eigen::Index cls = argmax_lowest(alpha.values());
  return Prediction{std::move(alpha), belief_and_uncertainty(e), cls};
}

LossAndGradient loss_and_gradient(const ClassifierParams& params,
                                  std::span<const FeatureRecord> batch, int epoch,
                                  const TrainConfig& cfg) {
  if (batch.empty()) {
    throw InvalidInput("loss_and_gradient: empty batch");
  }
  const double kl_weight = cfg.loss.kl_weight(epoch);
  LossAndGradient out;
  out.grad = ParamGradient{Matrix::Zero(params.w1.rows(), params.w1.cols()),
                           Vector::Zero(params.b1.size()),
                           Matrix::Zero(params.w2.rows(), params.w2.cols()),
                           Vector::Zero(params.b2.size())};
  double total = 0.0;
  for (const auto& rec : batch) {
    check_input(params, rec.x);
    const ForwardCache c = forward_cache(params, rec.x);
    Vector d_logits;
    if (params.is_evidential()) {
      const Vector evidence = apply_activation(params.activation, c.logits);
      const LabeledExample ex(rec.label, DirichletParams(evidence.array() + 1.0));
      const ExampleLoss l = example_loss_and_grad(ex, kl_weight);
      total += l.value;
      d_logits = l.grad_alpha.cwiseProduct(activation_slope(params.activation, c.logits));
    } else {
      const Vector p = softmax(c.logits);
      Vector err = -p;
      err[rec.label] += 1.0;
      total += err.squaredNorm();
      const Vector d_p = -2.0 * err;
      d_logits = p.cwiseProduct((d_p.array() - p.dot(d_p)).matrix());
    }
    out.grad.w2.noalias() += d_logits * c.hidden.transpose();
    out.grad.b2 += d_logits;
    const Vector d_pre =
        (params.w2.transpose() * d_logits).cwiseProduct((1.0 - c.hidden.array().square()).matrix());
    out.grad.w1.noalias() += d_pre * rec.x.transpose();
    out.grad.b1 += d_pre;
  }
  const double n = static_cast<double>(batch.size());
  out.loss = total / n;
  out.grad.w1 /= n;
  out.grad.b1 /= n;
  out.grad.w2 /= n;
  out.grad.b2 /= n;
  return out;
}

double dataset_loss(const ClassifierParams& params, std::span<const FeatureRecord> data,
                    int epoch, const TrainConfig& cfg) {
  if (params.is_evidential()) {
    std::vector<LabeledExample> examples;
    examples.reserve(data.size());
    for (const auto& rec : data) {
      const Vector evidence = forward_output(params, rec.x);
      examples.emplace_back(rec.label, DirichletParams(evidence.array() + 1.0));
    }
    return batch_loss(examples, epoch, cfg.loss);
  }
  return loss_and_gradient(params, data, epoch, cfg).loss;
}

TrainResult train(const FeatureDataset& dataset, const TrainConfig& cfg) {
  dataset.validate();
  cfg.validate();

  TrainResult result{ClassifierParams::glorot(dataset.dim(), cfg.hidden,
                                              dataset.num_classes, cfg.activation, cfg.seed),
                     {}};
  ClassifierParams& params = result.params;
  const std::span<const FeatureRecord> all(dataset.records);
  result.loss_trace.push_back(dataset_loss(params, all, 0, cfg));

  const Eigen::Index n_params = flat_size(params);
  Vector theta = flatten(params);
  Vector velocity = Vector::Zero(n_params);
  Vector second = Vector::Zero(n_params);
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kAdamEps = 1e-8;
  long step = 0;

  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(dataset.records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<FeatureRecord> batch;
  batch.reserve(static_cast<std::size_t>(cfg.batch_size));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const int schedule_epoch = epoch - 1;
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(dataset.records[order[i]]);
      }
      const std::string where =
          " at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index);
      LossAndGradient lg;
      try {
        lg = loss_and_gradient(params, batch, schedule_epoch, cfg);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + where);
      }
      const Vector g = flatten(lg.grad);
      if (!std::isfinite(lg.loss) || !g.allFinite()) {
        throw NumericalError("non-finite loss" + where);
      }
      ++step;
      if (cfg.optimizer == Optimizer::Sgd) {
        velocity = cfg.momentum * velocity - cfg.learning_rate * g;
        theta += velocity;
      } else {
        velocity = kBeta1 * velocity + (1.0 - kBeta1) * g;
        second = kBeta2 * second + (1.0 - kBeta2) * g.cwiseAbs2();
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        theta.array() -= cfg.learning_rate * (velocity.array() / c1) /
                         ((second.array() / c2).sqrt() + kAdamEps);
      }
      assign(params, theta);
    }
    double loss = 0.0;
    try {
      loss = dataset_loss(params, all, schedule_epoch, cfg);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " after epoch " + std::to_string(epoch));
    }
    if (!std::isfinite(loss)) {
      throw NumericalError("non-finite loss after epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

FeatureDataset make_blobs(int classes, int dim, int per_class, double sigma,
                          std::uint64_t seed, Split split) {
  if (classes < 2 || dim < 1 || per_class < 1 || !(sigma > 0.0)) {
    throw InvalidInput("make_blobs: need classes >= 2, dim >= 1, per_class >= 1, sigma > 0");
  }
  std::mt19937_64 mean_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> means;
  means.reserve(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    Vector m(dim);
    do {
      for (int j = 0; j < dim; ++j) m[j] = normal(mean_rng);
    } while (m.norm() == 0.0);
    means.push_back(m.normalized());
  }

  std::seed_seq sample_seed{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32),
                            split == Split::Train ? 1u : 2u};
  std::mt19937_64 sample_rng(sample_seed);
  std::normal_distribution<double> noise(0.0, sigma);
  FeatureDataset ds;
  ds.num_classes = classes;
  ds.split = split;
  ds.records.reserve(static_cast<std::size_t>(classes) * static_cast<std::size_t>(per_class));
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      Vector x = means[static_cast<std::size_t>(c)];
      for (int j = 0; j < dim; ++j) x[j] += noise(sample_rng);
      ds.records.push_back(FeatureRecord{std::move(x), c});
    }
  }
  return ds;
}

std::vector<Vector> make_sphere_probes(int count, int dim, double radius,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector v(dim);
    do {
      for (int j = 0; j < dim; ++j) v[j] = normal(rng);
    } while (v.norm() == 0.0);
    out.push_back(radius * v.normalized());
  }
  return out;
}

}  // namespace evr
