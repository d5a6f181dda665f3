#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "evr/classifier.hpp"
#include "evr/error.hpp"
#include "evr/eval.hpp"
#include "evr/io.hpp"
#include "evr/pipeline.hpp"
#include "evr/retrieval.hpp"

namespace evr::cli {
namespace fs = std::filesystem;

namespace {

unsigned worker_count() {
  if (const char* env = std::getenv("EVR_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return 1;
}

struct BlobSpec {
  int classes = 10;
  int dim = 64;
  int per_class = 50;
};

BlobSpec parse_blob_spec(const std::string& text) {
  BlobSpec spec;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  if (!(in >> spec.classes >> x1 >> spec.dim >> x2 >> spec.per_class) || x1 != 'x' ||
      x2 != 'x' || !in.eof()) {
    throw InvalidInput("--blobs expects CLASSESxDIMxPER_CLASS, got '" + text + "'");
  }
  return spec;
}

Objective parse_objective(const std::string& s) {
  if (s == "evidential") return Objective::Evidential;
  if (s == "softmax-mse") return Objective::SoftmaxMse;
  throw InvalidInput("unknown objective '" + s + "'");
}

Optimizer parse_optimizer(const std::string& s) {
  if (s == "sgd") return Optimizer::Sgd;
  if (s == "adam") return Optimizer::Adam;
  throw InvalidInput("unknown optimizer '" + s + "'");
}

std::vector<std::size_t> parse_ks(const std::string& s) {
  std::vector<std::size_t> ks;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(item, &pos);
    } catch (const std::exception&) {
      throw InvalidInput("bad K value '" + item + "'");
    }
    if (pos != item.size() || v <= 0) throw InvalidInput("bad K value '" + item + "'");
    ks.push_back(static_cast<std::size_t>(v));
  }
  if (ks.empty()) throw InvalidInput("empty K list");
  return ks;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

// Options shared by every training entry point.
struct TrainOptions {
  std::string data;
  std::string blobs;
  double sigma = 0.05;
  std::uint64_t seed = 1;
  std::string activation = "softplus";
  std::string optimizer = "sgd";
  std::string objective = "evidential";
  bool kl = false;
  double kl_weight = 1.0;
  int kl_anneal = 10;
  TrainConfig cfg;

  void add_to(CLI::App& app) {
    app.add_option("--lr", cfg.learning_rate, "learning rate");
    app.add_option("--epochs", cfg.epochs, "training epochs");
    app.add_option("--batch", cfg.batch_size, "minibatch size");
    app.add_option("--hidden", cfg.hidden, "hidden width");
    app.add_option("--momentum", cfg.momentum, "SGD momentum");
    app.add_option("--activation", activation, "evidence activation: relu|softplus|exp");
    app.add_option("--optimizer", optimizer, "sgd|adam");
    app.add_option("--objective", objective, "evidential|softmax-mse");
    app.add_flag("--kl", kl, "enable the annealed KL-to-uniform term");
    app.add_option("--kl-weight", kl_weight, "maximum KL weight");
    app.add_option("--kl-anneal", kl_anneal, "epochs until the KL weight is reached");
  }

  TrainConfig resolve() const {
    TrainConfig c = cfg;
    c.seed = seed;
    c.objective = parse_objective(objective);
    c.activation = c.objective == Objective::SoftmaxMse ? OutputActivation::Softmax
                                                         : parse_activation(activation);
    c.optimizer = parse_optimizer(optimizer);
    c.loss.enabled = kl;
    c.loss.kl_weight_max = kl_weight;
    c.loss.anneal_epochs = kl_anneal;
    c.validate();
    return c;
  }
};

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  return out.replace_extension(suffix);
}

// -- subcommand bodies ------------------------------------------------------

struct Ctx {
  std::ostream& out;
  std::ostream& err;
};

int do_blobs(Ctx& ctx, const std::string& spec_text, double sigma, std::uint64_t seed,
             const std::string& split, const std::string& out_path) {
  const BlobSpec spec = parse_blob_spec(spec_text);
  Split s;
  if (split == "train") {
    s = Split::Train;
  } else if (split == "test") {
    s = Split::Test;
  } else {
    throw InvalidInput("--split must be train or test");
  }
  const auto ds = make_blobs(spec.classes, spec.dim, spec.per_class, sigma, seed, s);
  io::write_embeddings(io::store_from_dataset(ds), out_path, io::format_for_path(out_path));
  ctx.out << "wrote " << ds.records.size() << " records to " << out_path << "\n";
  return kExitOk;
}

int do_train(Ctx& ctx, const TrainOptions& opt, const std::string& out_path,
             const std::string& trace_path) {
  const TrainConfig cfg = opt.resolve();
  FeatureDataset ds;
  if (!opt.blobs.empty()) {
    const BlobSpec spec = parse_blob_spec(opt.blobs);
    ds = make_blobs(spec.classes, spec.dim, spec.per_class, opt.sigma, opt.seed);
  } else if (!opt.data.empty()) {
    ds = io::dataset_from_store(io::read_embeddings(opt.data));
  } else {
    throw InvalidInput("train needs --data or --blobs");
  }
  const TrainResult result = train(ds, cfg);
  io::write_checkpoint(result.params, out_path);
  const fs::path trace =
      trace_path.empty() ? with_suffix(out_path, ".loss.csv") : fs::path(trace_path);
  io::write_loss_trace(result.loss_trace, trace);
  ctx.out << "trained " << ds.records.size() << " examples, " << cfg.epochs
          << " epochs: loss " << result.loss_trace.front() << " -> "
          << result.loss_trace.back() << "\n";
  return kExitOk;
}

int do_embed(Ctx& ctx, const std::string& model_path, const std::string& data_path,
             const std::string& alpha_path, const std::string& hidden_path,
             const std::string& output_path) {
  const ClassifierParams params = io::read_checkpoint(model_path);
  const EmbeddingStore features = io::read_embeddings(data_path);
  FeatureDataset ds;
  ds.num_classes = params.num_classes();
  for (const auto& r : features.records()) {
    ds.records.push_back(FeatureRecord{r.vector.cast<double>(), 0});
  }
  auto relabel = [&features](const EmbeddingStore& s) {
    // Keep the feature file's ids and labels.
    std::vector<EmbeddingRecord> recs;
    for (std::size_t i = 0; i < s.size(); ++i) {
      recs.push_back(EmbeddingRecord{features.at(i).id, features.at(i).label, s.at(i).vector});
    }
    return EmbeddingStore(s.kind(), s.dim(), std::move(recs));
  };
  if (alpha_path.empty() && hidden_path.empty() && output_path.empty()) {
    throw InvalidInput("embed needs at least one of --alpha, --hidden, --output");
  }
  if (!alpha_path.empty()) {
    io::write_embeddings(relabel(alpha_store(params, ds)), alpha_path,
                         io::format_for_path(alpha_path));
    ctx.out << "wrote alpha embeddings to " << alpha_path << "\n";
  }
  if (!hidden_path.empty()) {
    io::write_embeddings(relabel(hidden_store(params, ds)), hidden_path,
                         io::format_for_path(hidden_path));
    ctx.out << "wrote hidden features to " << hidden_path << "\n";
  }
  if (!output_path.empty()) {
    io::write_embeddings(relabel(output_store(params, ds)), output_path,
                         io::format_for_path(output_path));
    ctx.out << "wrote head outputs to " << output_path << "\n";
  }
  return kExitOk;
}

int do_ingest(Ctx& ctx, const std::string& in_path, const std::string& out_path) {
  const EmbeddingStore store = io::read_embeddings(in_path);
  ctx.out << in_path << ": " << store.size() << " records, dim " << store.dim() << ", kind "
          << to_string(store.kind()) << (store.has_labels() ? ", labelled" : ", unlabelled")
          << "\n";
  if (!out_path.empty()) {
    io::write_embeddings(store, out_path, io::format_for_path(out_path));
    ctx.out << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

int do_search(Ctx& ctx, const std::string& db_path, const std::string& query_path, bool loo,
              const std::string& metric_name, std::size_t k, bool full,
              const std::string& out_path) {
  const Metric metric = parse_metric(metric_name);
  const EmbeddingStore db = io::read_embeddings(db_path);
  check_metric_kind(metric, db.kind());
  if (loo == !query_path.empty()) {
    throw InvalidInput("search needs exactly one of --queries or --loo");
  }
  const std::size_t candidates = loo ? (db.size() > 0 ? db.size() - 1 : 0) : db.size();
  if (full) k = std::max<std::size_t>(1, candidates);
  if (k > candidates) {
    ctx.err << "warning: k=" << k << " exceeds the " << candidates
            << " available candidates; returning all\n";
  }
  std::vector<RankedList> results;
  if (loo) {
    results = search_leave_one_out(db, metric, k, worker_count());
  } else {
    const EmbeddingStore queries = io::read_embeddings(query_path);
    check_metric_kind(metric, queries.kind());
    results = search_queries(db, queries, metric, k, worker_count());
  }
  io::write_results(results, out_path);
  ctx.out << "wrote " << results.size() << " ranked lists to " << out_path << "\n";
  return kExitOk;
}

int do_rerank(Ctx& ctx, const std::string& results_path, const std::string& model_path,
              const std::string& features_path, std::size_t n, const std::string& out_path) {
  if (n < 1) throw InvalidInput("--n must be at least 1");
  const auto results = io::read_results(results_path);
  const ClassifierParams params = io::read_checkpoint(model_path);
  if (!params.is_evidential()) {
    throw InvalidInput("rerank needs an evidential checkpoint");
  }
  const FeatureMap features = feature_map(io::read_embeddings(features_path));
  std::vector<RankedList> reranked;
  reranked.reserve(results.size());
  for (const auto& list : results) {
    RankedList head;
    head.entries.assign(list.entries.begin(),
                        list.entries.begin() +
                            static_cast<std::ptrdiff_t>(std::min(n, list.entries.size())));
    UncertaintyMap u;
    for (const auto& e : attach_uncertainties(head, params, features).entries) {
      u.emplace(e.id, *e.uncertainty);
    }
    reranked.push_back(uncertainty_rerank(list, u, n));
  }
  io::write_results(reranked, out_path);
  ctx.out << "reranked top " << n << " of " << reranked.size() << " lists into " << out_path
          << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string results;
  std::string labels;
  std::string queries;
  std::string ks = "1,2,4,8";
  bool sop = false;
  std::string histogram_store;
  std::size_t bins = 100;
  std::vector<double> range{-1.0, 1.0};
  std::size_t thresholds = 101;
  std::string tag;
  std::string out;
};

EvalReport build_report(const std::vector<RankedList>& results, const LabelMap& labels,
                        const std::vector<std::size_t>& ks, std::size_t thresholds,
                        bool leave_one_out) {
  EvaluateOptions opts;
  opts.ks = ks;
  opts.thresholds = default_thresholds(thresholds);
  opts.universe = &labels;
  opts.leave_one_out = leave_one_out;
  EvalReport report = evaluate(results, labels, opts);
  report.metadata["queries"] = std::to_string(results.size());
  report.metadata["ks"] = join(ks);
  report.metadata["leave_one_out"] = leave_one_out ? "true" : "false";
  std::size_t rerank_n = 0;
  for (const auto& list : results) {
    std::size_t n = 0;
    for (const auto& e : list.entries) n += e.original_rank.has_value();
    rerank_n = std::max(rerank_n, n);
  }
  report.metadata["rerank_n"] = std::to_string(rerank_n);
  return report;
}

void print_recall(std::ostream& out, const std::string& name, const EvalReport& report) {
  out << std::left << std::setw(28) << name << std::right;
  for (const auto& [k, pct] : report.recall) {
    out << "  R@" << k << " " << std::fixed << std::setprecision(2) << std::setw(6) << pct;
  }
  out << "\n";
  out.unsetf(std::ios::floatfield);
}

int do_evaluate(Ctx& ctx, const EvaluateArgs& a) {
  auto results = io::read_results(a.results);
  const EmbeddingStore db = io::read_embeddings(a.labels);
  if (!db.has_labels()) throw InvalidInput(a.labels + " has no labels");
  const LabelMap labels = db.labels();
  bool loo = true;
  if (!a.queries.empty()) {
    loo = false;
    const EmbeddingStore q = io::read_embeddings(a.queries);
    if (!q.has_labels()) throw InvalidInput(a.queries + " has no labels");
    for (auto& list : results) {
      if (!list.query_label && list.query_id) {
        const auto* rec = q.find(*list.query_id);
        if (!rec) throw InvalidInput("no label for query id " + std::to_string(*list.query_id));
        list.query_label = rec->label;
      }
    }
  } else {
    for (const auto& list : results) {
      if (list.query_id && !labels.count(*list.query_id) && !list.query_label) {
        throw InvalidInput("no label for query id " + std::to_string(*list.query_id));
      }
    }
  }
  const std::vector<std::size_t> ks = a.sop ? std::vector<std::size_t>{1, 10, 100, 1000}
                                            : parse_ks(a.ks);
  EvalReport report = build_report(results, labels, ks, a.thresholds, loo);
  if (!a.tag.empty()) report.metadata["tag"] = a.tag;
  if (!a.histogram_store.empty()) {
    if (a.range.size() != 2) throw InvalidInput("--range takes LO HI");
    report.histogram =
        pair_similarity_histogram(io::read_embeddings(a.histogram_store), a.bins, a.range[0],
                                  a.range[1]);
    report.metadata["histogram_clamped"] = std::to_string(report.histogram->clamped);
  }
  report.validate();
  io::write_report(report, a.out);
  print_recall(ctx.out, a.tag.empty() ? "recall" : a.tag, report);
  return kExitOk;
}

struct DemoArgs {
  std::string out_dir = "demo_out";
  std::string blobs = "10x64x50";
  double sigma = 0.2;
  std::uint64_t seed = 1;
  std::size_t rerank_n = 8;
  int epochs = 30;
};

int do_demo(Ctx& ctx, const DemoArgs& a) {
  const BlobSpec spec = parse_blob_spec(a.blobs);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const auto train_set = make_blobs(spec.classes, spec.dim, spec.per_class, a.sigma, a.seed);
  const auto test_set =
      make_blobs(spec.classes, spec.dim, spec.per_class, a.sigma, a.seed, Split::Test);
  io::write_embeddings(io::store_from_dataset(train_set), dir / "train.evb",
                       io::FileFormat::Binary);
  const EmbeddingStore test_features = io::store_from_dataset(test_set);
  io::write_embeddings(test_features, dir / "test.evb", io::FileFormat::Binary);

  TrainConfig evid_cfg = demo_evidential_config(a.seed);
  TrainConfig ctrl_cfg = control_config(a.seed);
  evid_cfg.epochs = ctrl_cfg.epochs = a.epochs;

  const TrainResult evid = train(train_set, evid_cfg);
  const TrainResult ctrl = train(train_set, ctrl_cfg);
  io::write_checkpoint(evid.params, dir / "evidential.evm");
  io::write_loss_trace(evid.loss_trace, dir / "evidential.loss.csv");
  io::write_checkpoint(ctrl.params, dir / "control.evm");
  io::write_loss_trace(ctrl.loss_trace, dir / "control.loss.csv");

  const EmbeddingStore ctrl_hidden = hidden_store(ctrl.params, test_set);
  const EmbeddingStore evid_hidden = hidden_store(evid.params, test_set);
  const EmbeddingStore evid_alpha = alpha_store(evid.params, test_set);
  io::write_embeddings(ctrl_hidden, dir / "control_hidden.evb", io::FileFormat::Binary);
  io::write_embeddings(evid_hidden, dir / "evidential_hidden.evb", io::FileFormat::Binary);
  io::write_embeddings(evid_alpha, dir / "evidential_alpha.evb", io::FileFormat::Binary);

  const LabelMap labels = test_features.labels();
  const std::size_t full = test_features.size() - 1;
  const std::vector<std::size_t> ks{1, 2, 4, 8};
  const unsigned workers = worker_count();

  struct Mode {
    std::string name;
    std::vector<RankedList> results;
    const EmbeddingStore* hist_store;
    std::string metric;
  };
  std::vector<Mode> modes;
  modes.push_back({"classification_cosine",
                   search_leave_one_out(ctrl_hidden, Metric::Cosine, full, workers),
                   &ctrl_hidden, "cosine"});
  modes.push_back({"evidential_cosine",
                   search_leave_one_out(evid_hidden, Metric::Cosine, full, workers),
                   &evid_hidden, "cosine"});
  {
    const UncertaintyMap u = uncertainty_map(evid.params, test_features);
    auto base = search_leave_one_out(ctrl_hidden, Metric::Cosine, full, workers);
    for (auto& list : base) list = uncertainty_rerank(list, u, a.rerank_n);
    modes.push_back({"uncertainty_rerank", std::move(base), &ctrl_hidden, "cosine"});
  }
  modes.push_back({"alpha_l2", search_leave_one_out(evid_alpha, Metric::NegL2, full, workers),
                   &evid_alpha, "neg-l2"});
  modes.push_back({"distribution_bhattacharyya",
                   search_leave_one_out(evid_alpha, Metric::NegBhattacharyya, full, workers),
                   &evid_alpha, "neg-bhattacharyya"});

  ctx.out << "demo: " << a.blobs << " blobs, sigma " << a.sigma << ", seed " << a.seed
          << ", rerank N=" << a.rerank_n << "\n";
  for (auto& m : modes) {
    io::write_results(m.results, dir / (m.name + ".results.jsonl"));
    EvalReport report = build_report(m.results, labels, ks, 101, true);
    report.histogram = pair_similarity_histogram(*m.hist_store, 100, -1.0, 1.0);
    report.metadata["histogram_clamped"] = std::to_string(report.histogram->clamped);
    report.metadata["metric"] = m.metric;
    report.metadata["mode"] = m.name;
    report.metadata["seed"] = std::to_string(a.seed);
    io::write_report(report, dir / (m.name + ".report.json"));
    print_recall(ctx.out, m.name, report);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Ctx ctx{out, err};
  CLI::App app{"Evidential retrieval: training, search, reranking and evaluation"};
  app.require_subcommand(1);

  // blobs
  auto* blobs = app.add_subcommand("blobs", "write a synthetic Gaussian-blob dataset");
  std::string blob_spec = "10x64x50";
  double blob_sigma = 0.05;
  std::uint64_t blob_seed = 1;
  std::string blob_split = "train";
  std::string blob_out;
  blobs->add_option("--spec", blob_spec, "CLASSESxDIMxPER_CLASS");
  blobs->add_option("--sigma", blob_sigma, "noise standard deviation");
  blobs->add_option("--seed", blob_seed, "seed");
  blobs->add_option("--split", blob_split, "train|test");
  blobs->add_option("--out", blob_out, "output file (.evb or .jsonl)")->required();

  // train
  auto* trn = app.add_subcommand("train", "train an evidential (or control) head");
  TrainOptions topt;
  std::string train_out, train_trace;
  trn->add_option("--data", topt.data, "labelled feature file");
  trn->add_option("--blobs", topt.blobs, "generate CLASSESxDIMxPER_CLASS blobs instead");
  trn->add_option("--sigma", topt.sigma, "blob noise standard deviation");
  trn->add_option("--seed", topt.seed, "seed for data, initialisation and shuffling");
  topt.add_to(*trn);
  trn->add_option("--out", train_out, "checkpoint path (EVM1)")->required();
  trn->add_option("--trace", train_trace, "loss trace CSV (default: checkpoint path with .loss.csv)");

  // embed
  auto* emb = app.add_subcommand("embed", "map features through a trained head");
  std::string emb_model, emb_data, emb_alpha, emb_hidden, emb_output;
  emb->add_option("--model", emb_model, "checkpoint")->required();
  emb->add_option("--data", emb_data, "feature file")->required();
  emb->add_option("--alpha", emb_alpha, "write alpha embeddings here");
  emb->add_option("--hidden", emb_hidden, "write hidden (CLS-analog) features here");
  emb->add_option("--output", emb_output, "write raw head outputs here");

  // ingest
  auto* ing = app.add_subcommand("ingest", "validate and convert an embedding file");
  std::string ing_in, ing_out;
  ing->add_option("--in", ing_in, "input file")->required();
  ing->add_option("--out", ing_out, "converted output file");

  // search
  auto* srch = app.add_subcommand("search", "exact top-k retrieval");
  std::string s_db, s_queries, s_metric = "cosine", s_out;
  bool s_loo = false, s_full = false;
  std::size_t s_k = 8;
  srch->add_option("--db", s_db, "database file")->required();
  srch->add_option("--queries", s_queries, "query file");
  srch->add_flag("--loo", s_loo, "leave-one-out: every record queries the rest");
  srch->add_option("--metric", s_metric, "cosine|neg-l2|neg-bhattacharyya");
  srch->add_option("--k", s_k, "results per query");
  srch->add_flag("--full", s_full, "rank every candidate");
  srch->add_option("--out", s_out, "results file (JSON lines)")->required();

  // rerank
  auto* rr = app.add_subcommand("rerank", "uncertainty reranking of the top N");
  std::string r_results, r_model, r_features, r_out;
  std::size_t r_n = 8;
  rr->add_option("--results", r_results, "results file")->required();
  rr->add_option("--model", r_model, "evidential checkpoint")->required();
  rr->add_option("--features", r_features, "feature file keyed by record id")->required();
  rr->add_option("--n", r_n, "number of leading results to rerank");
  rr->add_option("--out", r_out, "output results file")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Recall@K, AP curve and pair histogram");
  EvaluateArgs ea;
  ev->add_option("--results", ea.results, "results file")->required();
  ev->add_option("--labels", ea.labels, "labelled database file")->required();
  ev->add_option("--queries", ea.queries, "labelled query file (omit for leave-one-out)");
  ev->add_option("--ks", ea.ks, "comma-separated K list");
  ev->add_flag("--sop", ea.sop, "use K = 1,10,100,1000");
  ev->add_option("--hist-store", ea.histogram_store, "store for the pair histogram");
  ev->add_option("--bins", ea.bins, "histogram bins");
  ev->add_option("--range", ea.range, "histogram range LO HI")->expected(2);
  ev->add_option("--thresholds", ea.thresholds, "number of AP thresholds in [0, 1]");
  ev->add_option("--tag", ea.tag, "name recorded in the report metadata");
  ev->add_option("--out", ea.out, "report path (JSON)")->required();

  // demo
  auto* demo = app.add_subcommand("demo", "end-to-end run of all retrieval modes on blobs");
  DemoArgs da;
  demo->add_option("--out-dir", da.out_dir, "output directory");
  demo->add_option("--blobs", da.blobs, "CLASSESxDIMxPER_CLASS");
  demo->add_option("--sigma", da.sigma, "blob noise");
  demo->add_option("--seed", da.seed, "seed");
  demo->add_option("--n", da.rerank_n, "rerank depth");
  demo->add_option("--epochs", da.epochs, "training epochs per head");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*blobs) return do_blobs(ctx, blob_spec, blob_sigma, blob_seed, blob_split, blob_out);
    if (*trn) return do_train(ctx, topt, train_out, train_trace);
    if (*emb) return do_embed(ctx, emb_model, emb_data, emb_alpha, emb_hidden, emb_output);
    if (*ing) return do_ingest(ctx, ing_in, ing_out);
    if (*srch) return do_search(ctx, s_db, s_queries, s_loo, s_metric, s_k, s_full, s_out);
    if (*rr) return do_rerank(ctx, r_results, r_model, r_features, r_n, r_out);
    if (*ev) return do_evaluate(ctx, ea);
    if (*demo) return do_demo(ctx, da);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace evr::cli
