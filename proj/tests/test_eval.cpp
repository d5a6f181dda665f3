#include <map>
#include <random>

#include "doctest.h"
#include "evr/error.hpp"
#include "evr/eval.hpp"
#include "evr/pipeline.hpp"
#include "oracles.hpp"

using namespace evr;
using doctest::Approx;

namespace {

RankedList list_of(RecordId query, std::initializer_list<RecordId> ids) {
  RankedList l;
  l.query_id = query;
  std::size_t rank = 1;
  for (RecordId id : ids) {
    l.entries.push_back({id, -static_cast<double>(rank), rank});
    ++rank;
  }
  return l;
}

EmbeddingRecord rec(RecordId id, float x, float y, Label label) {
  return {id, label, Eigen::Vector2f(x, y)};
}

}  // namespace

TEST_CASE("recall on a hand example") {
  const LabelMap labels{{0, 0}, {1, 0}, {2, 1}, {3, 1}, {4, 2}};
  const std::vector<RankedList> results{
      list_of(0, {1, 2}),  // hit at 1
      list_of(2, {0, 3}),  // hit at 2
      list_of(4, {0, 2}),  // never
  };
  const std::vector<std::size_t> ks{1, 2};
  const RecallTable r = recall_at_k(results, labels, ks);
  REQUIRE(r.size() == 2);
  CHECK(r[0].first == 1);
  CHECK(r[0].second == Approx(100.0 / 3.0));
  CHECK(r[1].second == Approx(200.0 / 3.0));

  const std::vector<std::size_t> bad{2, 1};
  CHECK_THROWS_AS(recall_at_k(results, labels, bad), InvalidInput);
  const std::vector<std::size_t> zero{0};
  CHECK_THROWS_AS(recall_at_k(results, labels, zero), InvalidInput);
}

TEST_CASE("query label resolution") {
  const LabelMap labels{{0, 3}};
  RankedList l = list_of(0, {});
  CHECK(query_label_of(l, labels) == 3);
  l.query_label = 7;
  CHECK(query_label_of(l, labels) == 7);
  CHECK_THROWS(query_label_of(list_of(9, {}), labels));
}

TEST_CASE("average precision") {
  const LabelMap labels{{1, 0}, {2, 1}, {3, 0}, {4, 1}};
  const RankedList l = list_of(0, {1, 2, 3, 4});
  CHECK(*average_precision(l, labels, 0) == Approx(5.0 / 6.0));
  CHECK(*average_precision(l, labels, 0, 4) == Approx(5.0 / 12.0));
  CHECK(*average_precision(list_of(0, {1, 3}), labels, 0) == 1.0);
  CHECK_FALSE(average_precision(l, labels, 5).has_value());
  CHECK_FALSE(average_precision(l, labels, 0, 0).has_value());
}

TEST_CASE("AP exceedance curve") {
  const std::vector<double> aps{0.25, 0.75};
  const std::vector<double> t{0.0, 0.5, 1.0};
  const auto c = ap_exceedance_curve(aps, t);
  CHECK(c == std::vector<std::pair<double, std::size_t>>{{0.0, 2}, {0.5, 1}, {1.0, 0}});
  const std::vector<double> exact{0.5};
  CHECK(ap_exceedance_curve(exact, t)[1].second == 1);
  CHECK(default_thresholds(3) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(default_thresholds().size() == 101);
}

TEST_CASE("pair similarity histogram") {
  const EmbeddingStore s(VectorKind::Embedding, 2,
                         {rec(0, 1, 0, 0), rec(1, 0, 1, 0), rec(2, 1, 0, 1)});
  const PairHistogram h = pair_similarity_histogram(s, 4);
  CHECK(h.edges == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(h.positive == std::vector<std::size_t>{0, 0, 1, 0});
  CHECK(h.negative == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK(h.total() == 3);
  CHECK(h.clamped == 0);

  const PairHistogram narrow = pair_similarity_histogram(s, 2, 0.25, 0.75);
  CHECK(narrow.clamped == 3);
  CHECK(narrow.total() == 3);
  CHECK_THROWS_AS(pair_similarity_histogram(s, 0), InvalidInput);
  CHECK_THROWS_AS(pair_similarity_histogram(s, 4, 1.0, -1.0), InvalidInput);
}

TEST_CASE("histogram conserves pairs on random stores") {
  std::mt19937_64 rng(21);
  std::normal_distribution<float> n(0.0f, 1.0f);
  for (int t = 0; t < 20; ++t) {
    std::vector<EmbeddingRecord> records;
    const std::size_t count = 5 + static_cast<std::size_t>(t);
    std::size_t same = 0;
    for (std::size_t i = 0; i < count; ++i) {
      records.push_back(rec(i, n(rng), n(rng), static_cast<Label>(i % 3)));
    }
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) same += (i % 3 == j % 3);
    }
    const EmbeddingStore s(VectorKind::Embedding, 2, std::move(records));
    const PairHistogram h = pair_similarity_histogram(s, 1 + static_cast<std::size_t>(t));
    CHECK(h.total() == count * (count - 1) / 2);
    std::size_t pos = 0;
    for (auto c : h.positive) pos += c;
    CHECK(pos == same);
  }
}

TEST_CASE("evaluate agrees with naive definitions") {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> n(0.0f, 1.0f);
  for (int t = 0; t < 50; ++t) {
    const std::size_t count = 6 + static_cast<std::size_t>(t % 20);
    const Label classes = 2 + static_cast<Label>(t % 4);
    std::vector<EmbeddingRecord> records;
    std::map<RecordId, Label> labels;
    for (std::size_t i = 0; i < count; ++i) {
      const Label c = static_cast<Label>(rng() % classes);
      records.push_back({i, c, Eigen::Vector3f(n(rng), n(rng), n(rng))});
      labels[i] = c;
    }
    const EmbeddingStore store(VectorKind::Embedding, 3, std::move(records));
    const auto results = search_leave_one_out(store, Metric::NegL2, count);
    const LabelMap lm = store.labels();

    std::vector<std::vector<std::pair<RecordId, double>>> ranked;
    std::vector<Label> qlabels;
    for (std::size_t q = 0; q < count; ++q) {
      ranked.push_back(oracle::brute_force_topk(store, Metric::NegL2,
                                                store.at(q).vector.cast<double>(), q, count));
      qlabels.push_back(labels[q]);
    }
    EvaluateOptions opt;
    opt.universe = &lm;
    const EvalReport rep = evaluate(results, lm, opt);
    const auto naive = oracle::naive_recall(ranked, qlabels, labels, opt.ks);
    for (std::size_t i = 0; i < naive.size(); ++i) {
      CHECK(rep.recall[i].second == Approx(naive[i]).epsilon(1e-12));
    }
    std::size_t excluded = 0, j = 0;
    for (std::size_t q = 0; q < count; ++q) {
      const auto ap = oracle::naive_ap(ranked[q], qlabels[q], labels);
      if (!ap) {
        ++excluded;
        continue;
      }
      REQUIRE(j < rep.aps.size());
      CHECK(rep.aps[j].query == q);
      CHECK(rep.aps[j].ap == Approx(*ap).epsilon(1e-12));
      ++j;
    }
    CHECK(rep.excluded_queries == excluded);
    CHECK_NOTHROW(rep.validate());

    // A truncated list can only lose precision mass against the full universe.
    const auto top3 = search_leave_one_out(store, Metric::NegL2, 3);
    const EvalReport cut = evaluate(top3, lm, opt);
    REQUIRE(cut.aps.size() == rep.aps.size());
    for (std::size_t i = 0; i < cut.aps.size(); ++i) {
      CHECK(cut.aps[i].ap <= rep.aps[i].ap + 1e-12);
    }
  }
}

TEST_CASE("singleton classes are excluded, not scored") {
  const LabelMap labels{{0, 0}, {1, 1}, {2, 1}};
  const std::vector<RankedList> results{list_of(0, {1, 2}), list_of(1, {2, 0})};
  EvaluateOptions opt;
  opt.universe = &labels;
  const EvalReport r = evaluate(results, labels, opt);
  CHECK(r.excluded_queries == 1);
  REQUIRE(r.aps.size() == 1);
  CHECK(r.aps[0].query == 1);
  CHECK(r.aps[0].ap == 1.0);
  CHECK(r.metadata.at("excluded_queries") == "1");
}

TEST_CASE("report validation") {
  EvalReport r;
  r.recall = {{1, 50.0}, {2, 40.0}};
  CHECK_THROWS(r.validate());
  r.recall = {{1, 50.0}, {2, 60.0}};
  r.aps = {{0, 1.5}};
  CHECK_THROWS(r.validate());
  r.aps = {{0, 0.5}};
  r.ap_curve = {{0.0, 1}, {0.5, 2}};
  CHECK_THROWS(r.validate());
  r.ap_curve = {{0.0, 2}, {0.5, 1}};
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("positive pairs are more similar than negative pairs after training") {
  const auto train_set = make_blobs(10, 64, 50, 0.2, 1);
  const auto test_set = make_blobs(10, 64, 50, 0.2, 1, Split::Test);
  const TrainResult r = train(train_set, control_config(1));
  const PairHistogram h = pair_similarity_histogram(hidden_store(r.params, test_set), 100);
  auto mean = [&](const std::vector<std::size_t>& counts) {
    double acc = 0.0, n = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double mid = 0.5 * (h.edges[i] + h.edges[i + 1]);
      acc += mid * static_cast<double>(counts[i]);
      n += static_cast<double>(counts[i]);
    }
    return acc / n;
  };
  CHECK(mean(h.positive) > mean(h.negative));
  CHECK(h.total() == 500u * 499u / 2u);
}
