#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evr/dirichlet.hpp"
#include "evr/evidential_loss.hpp"

namespace evr {

using Matrix = Eigen::MatrixXd;

/// Output nonlinearity of the head. The first three map logits to
/// evidence; Softmax marks a plain classification control head.
enum class OutputActivation : std::uint8_t {
  Relu = 0,
  Softplus = 1,
  Exp = 2,
  Softmax = 3,
};

std::string to_string(OutputActivation a);
OutputActivation parse_activation(const std::string& name);

/// affine -> tanh -> affine -> activation.
struct ClassifierParams {
  Matrix w1;  // H x D
  Vector b1;  // H
  Matrix w2;  // K x H
  Vector b2;  // K
  OutputActivation activation = OutputActivation::Softplus;

  Eigen::Index input_dim() const { return w1.cols(); }
  Eigen::Index hidden_dim() const { return w1.rows(); }
  Eigen::Index num_classes() const { return w2.rows(); }
  bool is_evidential() const { return activation != OutputActivation::Softmax; }

  /// Throws on inconsistent shapes or non-finite entries.
  void validate() const;

  static ClassifierParams zeros(Eigen::Index d, Eigen::Index h, Eigen::Index k,
                                OutputActivation act = OutputActivation::Softplus);
  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static ClassifierParams glorot(Eigen::Index d, Eigen::Index h, Eigen::Index k,
                                 OutputActivation act, std::uint64_t seed);

  friend bool operator==(const ClassifierParams&, const ClassifierParams&) = default;
};

struct FeatureRecord {
  Vector x;
  Eigen::Index label = 0;
};

enum class Split { Train, Test };

struct FeatureDataset {
  std::vector<FeatureRecord> records;
  Eigen::Index num_classes = 0;
  Split split = Split::Train;

  Eigen::Index dim() const { return records.empty() ? 0 : records.front().x.size(); }
  void validate() const;
};

enum class Optimizer { Sgd, Adam };

/// Plain classification control trained with softmax + squared error.
enum class Objective { Evidential, SoftmaxMse };

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 30;
  int batch_size = 32;
  int hidden = 32;
  double momentum = 0.9;
  std::uint64_t seed = 1;
  LossConfig loss;
  Optimizer optimizer = Optimizer::Sgd;
  Objective objective = Objective::Evidential;
  OutputActivation activation = OutputActivation::Softplus;

  void validate() const;
};

/// Exp evidence, annealed KL (weight 1 over 10 epochs), Adam lr 0.01, 30
/// epochs. Unlike the softplus default, this keeps far-away inputs less
/// certain than in-distribution ones.
TrainConfig demo_evidential_config(std::uint64_t seed);

/// Same optimiser settings with a softmax output and squared-error loss.
TrainConfig control_config(std::uint64_t seed);

struct TrainResult {
  ClassifierParams params;
  /// Full-dataset loss; entry 0 is the initialisation, entry t follows epoch t.
  std::vector<double> loss_trace;
};

/// tanh(W1 x + b1), the penultimate representation.
Vector hidden_features(const ClassifierParams& params, const Vector& x);

/// Raw output: evidence for evidential heads, class probabilities for the
/// softmax control.
Vector forward_output(const ClassifierParams& params, const Vector& x);

EvidenceVector forward_evidence(const ClassifierParams& params, const Vector& x);

struct Prediction {
  DirichletParams alpha;
  BeliefState belief;
  Eigen::Index predicted = 0;
};

/// argmax ties resolve to the lowest class index.
Prediction predict(const ClassifierParams& params, const Vector& x);

Eigen::Index argmax_lowest(const Vector& v);

/// Gradient of the batch objective with respect to every parameter.
struct ParamGradient {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
};

struct LossAndGradient {
  double loss = 0.0;
  ParamGradient grad;
};

/// Mean batch objective and its analytic gradient. For evidential heads the
/// objective is batch_loss; for the softmax control it is mean ||y - p||^2.
LossAndGradient loss_and_gradient(const ClassifierParams& params,
                                  std::span<const FeatureRecord> batch, int epoch,
                                  const TrainConfig& cfg);

double dataset_loss(const ClassifierParams& params, std::span<const FeatureRecord> data,
                    int epoch, const TrainConfig& cfg);

/// Minibatch training. Throws NumericalError (naming epoch and batch) if the
/// loss becomes non-finite.
TrainResult train(const FeatureDataset& dataset, const TrainConfig& cfg);

/// Class means uniform on the unit sphere (from `seed`), samples are
/// mean + N(0, sigma^2 I). Train and test splits share the means but draw
/// independent samples.
FeatureDataset make_blobs(int classes, int dim, int per_class, double sigma,
                          std::uint64_t seed, Split split = Split::Train);

/// Points at the given radius in uniformly random directions.
std::vector<Vector> make_sphere_probes(int count, int dim, double radius,
                                       std::uint64_t seed);

}  // namespace evr
