#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evr/retrieval.hpp"

namespace evr {

using LabelMap = std::unordered_map<RecordId, Label>;

/// (K, percentage) pairs in ascending K.
using RecallTable = std::vector<std::pair<std::size_t, double>>;

/// Label of the query behind `list`: its own query_label, else the label
/// map entry for its query_id. Throws when neither exists.
Label query_label_of(const RankedList& list, const LabelMap& labels);

/// Percentage of queries with at least one same-class entry in the top K.
RecallTable recall_at_k(std::span<const RankedList> results, const LabelMap& labels,
                        std::span<const std::size_t> ks);

/// (1/R) * sum of precision@r over ranks r holding a relevant entry. R is
/// `relevant_total` when given (the size of the relevant universe), else the
/// number of relevant entries in the list. Returns nullopt when R == 0: such
/// queries are excluded, never scored as 0.
std::optional<double> average_precision(const RankedList& result, const LabelMap& labels,
                                        Label query_label,
                                        std::optional<std::size_t> relevant_total = {});

/// (threshold, |{AP >= threshold}|) for each threshold.
std::vector<std::pair<double, std::size_t>> ap_exceedance_curve(
    std::span<const double> aps, std::span<const double> thresholds);

struct PairHistogram {
  std::vector<double> edges;  // bins + 1, strictly increasing
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
  std::size_t clamped = 0;  // scores outside [lo, hi] folded into end bins

  std::size_t total() const;
};

/// Cosine similarity of every unordered record pair, split by whether the
/// two labels agree.
PairHistogram pair_similarity_histogram(const EmbeddingStore& store, std::size_t bins,
                                        double lo = -1.0, double hi = 1.0);

struct QueryAp {
  RecordId query = 0;
  double ap = 0.0;
};

struct EvalReport {
  RecallTable recall;
  std::vector<QueryAp> aps;
  std::size_t excluded_queries = 0;
  std::vector<std::pair<double, std::size_t>> ap_curve;
  std::optional<PairHistogram> histogram;
  std::map<std::string, std::string> metadata;

  /// Checks recall in [0, 100] non-decreasing in K, AP in [0, 1], curve
  /// non-increasing, histogram edges increasing.
  void validate() const;
};

/// Evenly spaced thresholds 0, 1/(n-1), ..., 1.
std::vector<double> default_thresholds(std::size_t n = 101);

struct EvaluateOptions {
  std::vector<std::size_t> ks{1, 2, 4, 8};
  std::vector<double> thresholds = default_thresholds();
  /// Candidate universe for AP; when set, R counts same-label records in it
  /// (minus the query itself).
  const LabelMap* universe = nullptr;
  /// Queries are members of the universe and never their own candidates.
  bool leave_one_out = true;
};

/// Recall table, per-query AP and the exceedance curve in one pass.
EvalReport evaluate(std::span<const RankedList> results, const LabelMap& labels,
                    const EvaluateOptions& options);

}  // namespace evr
