#include "evr/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "evr/error.hpp"

namespace evr {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::Cosine: return "cosine";
    case Metric::NegL2: return "neg-l2";
    case Metric::NegBhattacharyya: return "neg-bhattacharyya";
  }
  return "unknown";
}

Metric parse_metric(const std::string& name) {
  if (name == "cosine") return Metric::Cosine;
  if (name == "neg-l2" || name == "neg_l2") return Metric::NegL2;
  if (name == "neg-bhattacharyya" || name == "neg_bhattacharyya") {
    return Metric::NegBhattacharyya;
  }
  throw InvalidInput("unknown metric '" + name + "'");
}

std::string to_string(VectorKind k) {
  return k == VectorKind::Alpha ? "alpha" : "embedding";
}

EmbeddingStore::EmbeddingStore(VectorKind kind, Eigen::Index dim,
                               std::vector<EmbeddingRecord> records)
    : kind_(kind), dim_(dim), records_(std::move(records)) {
  if (dim_ < 1) {
    throw InvalidInput("store dimension must be at least 1");
  }
  std::sort(records_.begin(), records_.end(),
            [](const EmbeddingRecord& a, const EmbeddingRecord& b) { return a.id < b.id; });
  has_labels_ = !records_.empty() && records_.front().label.has_value();
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    const std::string where = "record id " + std::to_string(r.id);
    if (i > 0 && records_[i - 1].id == r.id) {
      throw InvalidInput("duplicate " + where);
    }
    if (r.vector.size() != dim_) {
      throw DimensionError(where + " has dimension " + std::to_string(r.vector.size()) +
                           ", store has " + std::to_string(dim_));
    }
    if (!r.vector.allFinite()) {
      throw InvalidInput(where + " is not finite");
    }
    if (r.label.has_value() != has_labels_) {
      throw InvalidInput(where + ": labels must be present on all records or none");
    }
    if (kind_ == VectorKind::Alpha) {
      if (dim_ < 2 || (r.vector.array() <= 0.0f).any()) {
        throw InvalidInput(where + " is not a valid Dirichlet parameter vector");
      }
    }
  }
}

const EmbeddingRecord* EmbeddingStore::find(RecordId id) const {
  auto it = std::lower_bound(records_.begin(), records_.end(), id,
                             [](const EmbeddingRecord& r, RecordId v) { return r.id < v; });
  return it != records_.end() && it->id == id ? &*it : nullptr;
}

std::unordered_map<RecordId, Label> EmbeddingStore::labels() const {
  std::unordered_map<RecordId, Label> out;
  for (const auto& r : records_) {
    if (r.label) out.emplace(r.id, *r.label);
  }
  return out;
}

void check_metric_kind(Metric metric, VectorKind kind) {
  if (metric == Metric::NegBhattacharyya && kind != VectorKind::Alpha) {
    throw InvalidInput("neg-bhattacharyya needs an alpha-kind store, got " +
                       to_string(kind));
  }
}

double score(Metric metric, const Eigen::Ref<const Eigen::VectorXd>& a,
             const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("score: dimension " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  switch (metric) {
    case Metric::Cosine: {
      const double na = a.norm();
      const double nb = b.norm();
      if (!(na > 0.0) || !(nb > 0.0)) {
        throw InvalidInput("cosine: zero-norm vector");
      }
      return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
    }
    case Metric::NegL2:
      return -(a - b).norm();
    case Metric::NegBhattacharyya:
      return -bhattacharyya_distance(DirichletParams(a), DirichletParams(b));
  }
  throw InvalidInput("score: unknown metric");
}

namespace {

struct Candidate {
  double score;
  RecordId id;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

// Per-store quantities reused across queries.
struct ScanContext {
  const EmbeddingStore& store;
  Metric metric;
  std::vector<double> norms;      // cosine
  std::vector<double> log_betas;  // bhattacharyya
  Eigen::MatrixXd vectors;        // records as columns, in double

  ScanContext(const EmbeddingStore& s, Metric m) : store(s), metric(m) {
    check_metric_kind(m, s.kind());
    vectors.resize(s.dim(), static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      vectors.col(static_cast<Eigen::Index>(i)) = s.at(i).vector.cast<double>();
    }
    if (m == Metric::Cosine) {
      norms.resize(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        norms[i] = vectors.col(static_cast<Eigen::Index>(i)).norm();
        if (!(norms[i] > 0.0)) {
          throw InvalidInput("cosine: record id " + std::to_string(s.at(i).id) +
                             " has zero norm");
        }
      }
    } else if (m == Metric::NegBhattacharyya) {
      log_betas.resize(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        log_betas[i] = log_beta(DirichletParams(vectors.col(static_cast<Eigen::Index>(i))));
      }
    }
  }

  RankedList run(const Eigen::Ref<const Eigen::VectorXd>& query,
                 std::optional<RecordId> exclude, std::size_t k) const {
    if (query.size() != store.dim()) {
      throw DimensionError("query has dimension " + std::to_string(query.size()) +
                           ", store has " + std::to_string(store.dim()));
    }
    if (k < 1) {
      throw InvalidInput("search: k must be at least 1");
    }
    std::vector<Candidate> cands;
    cands.reserve(store.size());

    switch (metric) {
      case Metric::Cosine: {
        const double qn = query.norm();
        if (!(qn > 0.0)) throw InvalidInput("cosine: zero-norm query");
        for (std::size_t i = 0; i < store.size(); ++i) {
          const auto col = vectors.col(static_cast<Eigen::Index>(i));
          const double s = std::clamp(query.dot(col) / (qn * norms[i]), -1.0, 1.0);
          cands.push_back({s, store.at(i).id});
        }
        break;
      }
      case Metric::NegL2:
        for (std::size_t i = 0; i < store.size(); ++i) {
          const auto col = vectors.col(static_cast<Eigen::Index>(i));
          cands.push_back({-(query - col).norm(), store.at(i).id});
        }
        break;
      case Metric::NegBhattacharyya: {
        const DirichletParams q(query);
        const double q_lb = log_beta(q);
        for (std::size_t i = 0; i < store.size(); ++i) {
          const auto col = vectors.col(static_cast<Eigen::Index>(i));
          const double d =
              0.5 * (q_lb + log_betas[i]) - log_beta(DirichletParams(0.5 * (query + col)));
          cands.push_back({-(d > 0.0 ? d : 0.0), store.at(i).id});
        }
        break;
      }
    }

    if (exclude) {
      std::erase_if(cands, [&](const Candidate& c) { return c.id == *exclude; });
    }
    const std::size_t take = std::min(k, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take),
                      cands.end(), better);

    RankedList out;
    out.query_id = exclude;
    out.entries.reserve(take);
    for (std::size_t r = 0; r < take; ++r) {
      out.entries.push_back(RankedEntry{cands[r].id, cands[r].score, r + 1, {}, {}});
    }
    return out;
  }
};

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

RankedList search(const EmbeddingStore& store, Metric metric,
                  const Eigen::Ref<const Eigen::VectorXd>& query,
                  std::optional<RecordId> exclude, std::size_t k) {
  return ScanContext(store, metric).run(query, exclude, k);
}

std::vector<RankedList> search_leave_one_out(const EmbeddingStore& store, Metric metric,
                                             std::size_t k, unsigned workers) {
  const ScanContext ctx(store, metric);
  std::vector<RankedList> out(store.size());
  parallel_for(store.size(), workers, [&](std::size_t i) {
    const auto& rec = store.at(i);
    out[i] = ctx.run(ctx.vectors.col(static_cast<Eigen::Index>(i)), rec.id, k);
    out[i].query_label = rec.label;
  });
  return out;
}

std::vector<RankedList> search_queries(const EmbeddingStore& database,
                                       const EmbeddingStore& queries, Metric metric,
                                       std::size_t k, unsigned workers) {
  if (queries.dim() != database.dim()) {
    throw DimensionError("query store dimension " + std::to_string(queries.dim()) +
                         " differs from database dimension " +
                         std::to_string(database.dim()));
  }
  const ScanContext ctx(database, metric);
  std::vector<RankedList> out(queries.size());
  parallel_for(queries.size(), workers, [&](std::size_t i) {
    const auto& rec = queries.at(i);
    const Eigen::VectorXd q = rec.vector.cast<double>();
    out[i] = ctx.run(q, std::nullopt, k);
    out[i].query_id = rec.id;
    out[i].query_label = rec.label;
  });
  return out;
}

RankedList uncertainty_rerank(const RankedList& list, const UncertaintyMap& uncertainties,
                              std::size_t n) {
  RankedList out = list;
  const std::size_t head = std::min(n, out.entries.size());
  for (std::size_t i = 0; i < head; ++i) {
    auto& e = out.entries[i];
    auto it = uncertainties.find(e.id);
    if (it == uncertainties.end()) {
      throw InvalidInput("no uncertainty for record id " + std::to_string(e.id));
    }
    if (!(it->second >= 0.0 && it->second <= 1.0)) {
      throw InvalidInput("uncertainty for record id " + std::to_string(e.id) +
                         " outside [0, 1]");
    }
    e.uncertainty = it->second;
    if (!e.original_rank) e.original_rank = e.rank;
  }
  auto first = out.entries.begin();
  auto last = first + static_cast<std::ptrdiff_t>(head);
  std::stable_sort(first, last, [](const RankedEntry& a, const RankedEntry& b) {
    return *a.uncertainty < *b.uncertainty;
  });
  for (std::size_t i = 0; i < head; ++i) {
    out.entries[i].rank = i + 1;
  }
  return out;
}

RankedList attach_uncertainties(const RankedList& list, const ClassifierParams& params,
                                const FeatureMap& features) {
  RankedList out = list;
  for (auto& e : out.entries) {
    auto it = features.find(e.id);
    if (it == features.end()) {
      throw InvalidInput("no feature vector for record id " + std::to_string(e.id));
    }
    e.uncertainty = belief_and_uncertainty(forward_evidence(params, it->second)).uncertainty;
  }
  return out;
}

}  // namespace evr
