#include "evr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evr/error.hpp"

namespace evr {

Label query_label_of(const RankedList& list, const LabelMap& labels) {
  if (list.query_label) {
    return *list.query_label;
  }
  if (list.query_id) {
    auto it = labels.find(*list.query_id);
    if (it != labels.end()) return it->second;
    throw InvalidInput("no label for query id " + std::to_string(*list.query_id));
  }
  throw InvalidInput("ranked list has neither a query label nor a query id");
}

namespace {
Label label_of(RecordId id, const LabelMap& labels) {
  auto it = labels.find(id);
  if (it == labels.end()) {
    throw InvalidInput("no label for record id " + std::to_string(id));
  }
  return it->second;
}
}  // namespace

RecallTable recall_at_k(std::span<const RankedList> results, const LabelMap& labels,
                        std::span<const std::size_t> ks) {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == 0) {
      throw InvalidInput("recall_at_k: K must be positive");
    }
    if (i > 0 && ks[i] <= ks[i - 1]) {
      throw InvalidInput("recall_at_k: K list must be strictly ascending");
    }
  }
  // First rank holding a same-class entry, per query; a hit at K iff <= K.
  std::vector<std::size_t> hits(ks.size(), 0);
  for (const auto& list : results) {
    const Label q = query_label_of(list, labels);
    std::size_t first = 0;
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
      if (label_of(list.entries[r].id, labels) == q) {
        first = r + 1;
        break;
      }
    }
    if (first == 0) continue;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (first <= ks[i]) ++hits[i];
    }
  }
  RecallTable table;
  table.reserve(ks.size());
  const double n = static_cast<double>(results.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    table.emplace_back(ks[i], results.empty() ? 0.0 : 100.0 * static_cast<double>(hits[i]) / n);
  }
  return table;
}

std::optional<double> average_precision(const RankedList& result, const LabelMap& labels,
                                        Label query_label,
                                        std::optional<std::size_t> relevant_total) {
  std::size_t found = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < result.entries.size(); ++r) {
    if (label_of(result.entries[r].id, labels) == query_label) {
      ++found;
      sum += static_cast<double>(found) / static_cast<double>(r + 1);
    }
  }
  const std::size_t total = relevant_total.value_or(found);
  if (total == 0) {
    return std::nullopt;
  }
  if (found > total) {
    throw InvalidInput("average_precision: more relevant hits than the relevant total");
  }
  return sum / static_cast<double>(total);
}

std::vector<std::pair<double, std::size_t>> ap_exceedance_curve(
    std::span<const double> aps, std::span<const double> thresholds) {
  std::vector<double> sorted(aps.begin(), aps.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, std::size_t>> curve;
  curve.reserve(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const double t = thresholds[i];
    if (i > 0 && t < thresholds[i - 1]) {
      throw InvalidInput("ap_exceedance_curve: thresholds must be ascending");
    }
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    curve.emplace_back(t, static_cast<std::size_t>(sorted.end() - it));
  }
  return curve;
}

std::size_t PairHistogram::total() const {
  std::size_t acc = 0;
  for (auto c : positive) acc += c;
  for (auto c : negative) acc += c;
  return acc;
}

PairHistogram pair_similarity_histogram(const EmbeddingStore& store, std::size_t bins,
                                        double lo, double hi) {
  if (bins < 1) {
    throw InvalidInput("histogram: need at least one bin");
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidInput("histogram: need finite lo < hi");
  }
  if (!store.has_labels()) {
    throw InvalidInput("histogram: store has no labels");
  }
  PairHistogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  h.edges.back() = hi;
  h.positive.assign(bins, 0);
  h.negative.assign(bins, 0);

  const auto n = store.size();
  std::vector<Eigen::VectorXd> unit(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd v = store.at(i).vector.cast<double>();
    const double norm = v.norm();
    if (!(norm > 0.0)) {
      throw InvalidInput("histogram: record id " + std::to_string(store.at(i).id) +
                         " has zero norm");
    }
    unit[i] = v / norm;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = std::clamp(unit[i].dot(unit[j]), -1.0, 1.0);
      std::size_t bin;
      if (s < lo) {
        bin = 0;
        ++h.clamped;
      } else if (s > hi) {
        bin = bins - 1;
        ++h.clamped;
      } else {
        bin = std::min(bins - 1, static_cast<std::size_t>((s - lo) / width));
      }
      auto& counts = (*store.at(i).label == *store.at(j).label) ? h.positive : h.negative;
      ++counts[bin];
    }
  }
  return h;
}

void EvalReport::validate() const {
  for (std::size_t i = 0; i < recall.size(); ++i) {
    const auto [k, pct] = recall[i];
    if (!(pct >= 0.0 && pct <= 100.0)) {
      throw InvalidInput("report: Recall@" + std::to_string(k) + " outside [0, 100]");
    }
    if (i > 0 && (k <= recall[i - 1].first || pct < recall[i - 1].second)) {
      throw InvalidInput("report: recall table not ascending in K / non-decreasing");
    }
  }
  for (const auto& q : aps) {
    if (!(q.ap >= 0.0 && q.ap <= 1.0)) {
      throw InvalidInput("report: AP outside [0, 1] for query " + std::to_string(q.query));
    }
  }
  for (std::size_t i = 1; i < ap_curve.size(); ++i) {
    if (ap_curve[i].second > ap_curve[i - 1].second) {
      throw InvalidInput("report: AP curve not non-increasing");
    }
  }
  if (histogram) {
    const auto& h = *histogram;
    if (h.edges.size() != h.positive.size() + 1 || h.positive.size() != h.negative.size()) {
      throw InvalidInput("report: histogram shape mismatch");
    }
    for (std::size_t i = 1; i < h.edges.size(); ++i) {
      if (!(h.edges[i] > h.edges[i - 1])) {
        throw InvalidInput("report: histogram edges not strictly increasing");
      }
    }
  }
}

std::vector<double> default_thresholds(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return t;
}

EvalReport evaluate(std::span<const RankedList> results, const LabelMap& labels,
                    const EvaluateOptions& options) {
  EvalReport report;
  report.recall = recall_at_k(results, labels, options.ks);

  std::unordered_map<Label, std::size_t> class_sizes;
  if (options.universe) {
    for (const auto& [id, label] : *options.universe) ++class_sizes[label];
  }
  std::vector<double> values;
  for (const auto& list : results) {
    const Label q = query_label_of(list, labels);
    std::optional<std::size_t> total;
    if (options.universe) {
      std::size_t r = class_sizes[q];
      if (options.leave_one_out && list.query_id) {
        auto it = options.universe->find(*list.query_id);
        if (it != options.universe->end() && it->second == q && r > 0) --r;
      }
      total = r;
    }
    const auto ap = average_precision(list, labels, q, total);
    if (!ap) {
      ++report.excluded_queries;
      continue;
    }
    report.aps.push_back(QueryAp{list.query_id.value_or(0), *ap});
    values.push_back(*ap);
  }
  report.ap_curve = ap_exceedance_curve(values, options.thresholds);
  report.metadata["excluded_queries"] = std::to_string(report.excluded_queries);
  return report;
}

}  // namespace evr
