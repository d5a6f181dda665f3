#include "evr/pipeline.hpp"

#include "evr/error.hpp"

namespace evr {
namespace {

template <typename Fn>
EmbeddingStore map_dataset(const FeatureDataset& data, VectorKind kind, Fn&& fn) {
  std::vector<EmbeddingRecord> records;
  records.reserve(data.records.size());
  Eigen::Index dim = 0;
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& r = data.records[i];
    Eigen::VectorXf v = fn(r.x).template cast<float>();
    dim = v.size();
    records.push_back(EmbeddingRecord{i, static_cast<Label>(r.label), std::move(v)});
  }
  if (records.empty()) {
    throw InvalidInput("cannot embed an empty dataset");
  }
  return EmbeddingStore(kind, dim, std::move(records));
}

}  // namespace

EmbeddingStore alpha_store(const ClassifierParams& params, const FeatureDataset& data) {
  return map_dataset(data, VectorKind::Alpha, [&](const Vector& x) -> Vector {
    return evidence_to_alpha(forward_evidence(params, x)).values();
  });
}

EmbeddingStore hidden_store(const ClassifierParams& params, const FeatureDataset& data) {
  return map_dataset(data, VectorKind::Embedding,
                     [&](const Vector& x) { return hidden_features(params, x); });
}

EmbeddingStore output_store(const ClassifierParams& params, const FeatureDataset& data) {
  return map_dataset(data, VectorKind::Embedding,
                     [&](const Vector& x) { return forward_output(params, x); });
}

UncertaintyMap uncertainty_map(const ClassifierParams& params, const EmbeddingStore& features) {
  UncertaintyMap out;
  for (const auto& r : features.records()) {
    out.emplace(r.id,
                belief_and_uncertainty(forward_evidence(params, r.vector.cast<double>()))
                    .uncertainty);
  }
  return out;
}

FeatureMap feature_map(const EmbeddingStore& features) {
  FeatureMap out;
  for (const auto& r : features.records()) out.emplace(r.id, r.vector.cast<double>());
  return out;
}

}  // namespace evr
