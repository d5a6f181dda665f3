#pragma once

#include "evr/classifier.hpp"
#include "evr/retrieval.hpp"

namespace evr {

// Embedding stores derived from a trained head. Record i of the result
// carries id i and the label of dataset record i.

/// Dirichlet alpha = evidence + 1 per record (alpha-kind store).
EmbeddingStore alpha_store(const ClassifierParams& params, const FeatureDataset& data);

/// Penultimate tanh activations, the stand-in for a backbone CLS embedding.
EmbeddingStore hidden_store(const ClassifierParams& params, const FeatureDataset& data);

/// Raw head output (class probabilities for a softmax control head).
EmbeddingStore output_store(const ClassifierParams& params, const FeatureDataset& data);

/// Uncertainty u = K / S of every record under an evidential head.
UncertaintyMap uncertainty_map(const ClassifierParams& params, const EmbeddingStore& features);

FeatureMap feature_map(const EmbeddingStore& features);

}  // namespace evr
