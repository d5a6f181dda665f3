#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "evr/classifier.hpp"
#include "evr/dirichlet.hpp"

namespace evr {

using RecordId = std::uint64_t;
using Label = std::uint32_t;

enum class Metric { Cosine, NegL2, NegBhattacharyya };

/// What a stored vector means: a generic embedding or Dirichlet alpha.
enum class VectorKind : std::uint8_t { Embedding = 0, Alpha = 1 };

std::string to_string(Metric m);
Metric parse_metric(const std::string& name);
std::string to_string(VectorKind k);

struct EmbeddingRecord {
  RecordId id = 0;
  std::optional<Label> label;
  Eigen::VectorXf vector;

  friend bool operator==(const EmbeddingRecord& a, const EmbeddingRecord& b) {
    // Bitwise comparison so NaN payloads and signed zeros count.
    return a.id == b.id && a.label == b.label && a.vector.size() == b.vector.size() &&
           std::equal(a.vector.data(), a.vector.data() + a.vector.size(), b.vector.data(),
                      [](float x, float y) { return std::bit_cast<std::uint32_t>(x) ==
                                                    std::bit_cast<std::uint32_t>(y); });
  }
};

/// Immutable collection of records sharing one dimension, kept in id order.
/// Labels are all-or-nothing. Alpha-kind stores hold valid Dirichlet
/// parameters (every component > 0).
class EmbeddingStore {
 public:
  EmbeddingStore(VectorKind kind, Eigen::Index dim, std::vector<EmbeddingRecord> records);

  VectorKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  bool has_labels() const { return has_labels_; }
  const std::vector<EmbeddingRecord>& records() const { return records_; }
  const EmbeddingRecord& at(std::size_t i) const { return records_[i]; }
  /// nullptr when absent.
  const EmbeddingRecord* find(RecordId id) const;
  std::unordered_map<RecordId, Label> labels() const;

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

 private:
  VectorKind kind_;
  Eigen::Index dim_;
  bool has_labels_ = false;
  std::vector<EmbeddingRecord> records_;
};

/// Throws if `metric` cannot be used on a store of the given kind.
void check_metric_kind(Metric metric, VectorKind kind);

/// Similarity; larger is more similar. Cosine is accumulated in double.
double score(Metric metric, const Eigen::Ref<const Eigen::VectorXd>& a,
             const Eigen::Ref<const Eigen::VectorXd>& b);

template <typename DerivedA, typename DerivedB>
double score(Metric metric, const Eigen::MatrixBase<DerivedA>& a,
             const Eigen::MatrixBase<DerivedB>& b) {
  const Eigen::VectorXd ad = a.template cast<double>();
  const Eigen::VectorXd bd = b.template cast<double>();
  return score(metric, Eigen::Ref<const Eigen::VectorXd>(ad),
               Eigen::Ref<const Eigen::VectorXd>(bd));
}

struct RankedEntry {
  RecordId id = 0;
  double score = 0.0;
  std::size_t rank = 0;
  std::optional<double> uncertainty;
  /// Rank before reranking, when reranked.
  std::optional<std::size_t> original_rank;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

struct RankedList {
  std::optional<RecordId> query_id;
  std::optional<Label> query_label;
  std::vector<RankedEntry> entries;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Exact top-k by full scan with partial selection. Ties go to the smaller
/// record id. `exclude` (leave-one-out) removes that id from the candidates.
/// If fewer than k candidates exist all of them are returned.
RankedList search(const EmbeddingStore& store, Metric metric,
                  const Eigen::Ref<const Eigen::VectorXd>& query,
                  std::optional<RecordId> exclude, std::size_t k);

/// Leave-one-out retrieval: every record queries the rest. Queries are
/// spread over `workers` threads; output order follows the store.
std::vector<RankedList> search_leave_one_out(const EmbeddingStore& store, Metric metric,
                                             std::size_t k, unsigned workers = 1);

/// Every record of `queries` searches `database` (no exclusion).
std::vector<RankedList> search_queries(const EmbeddingStore& database,
                                       const EmbeddingStore& queries, Metric metric,
                                       std::size_t k, unsigned workers = 1);

using UncertaintyMap = std::unordered_map<RecordId, double>;

/// Stable ascending-uncertainty sort of the first min(n, size) entries.
/// Later entries are returned untouched.
RankedList uncertainty_rerank(const RankedList& list, const UncertaintyMap& uncertainties,
                              std::size_t n);

using FeatureMap = std::unordered_map<RecordId, Eigen::VectorXd>;

/// u = K / S from the evidential head, for every listed entry.
RankedList attach_uncertainties(const RankedList& list, const ClassifierParams& params,
                                const FeatureMap& features);

}  // namespace evr
