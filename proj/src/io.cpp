#include "evr/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "evr/error.hpp"
#include "json.hpp"

namespace evr::io {

using nlohmann::json;

namespace {

class ByteWriter {
 public:
  void bytes(const char* data, std::size_t n) {
    out_.insert(out_.end(), reinterpret_cast<const std::uint8_t*>(data),
                reinterpret_cast<const std::uint8_t*>(data) + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { little_endian(v, 2); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void f32(float v) { little_endian(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { little_endian(std::bit_cast<std::uint64_t>(v), 8); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void little_endian(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(little_endian(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(little_endian(8)); }

  void need(std::size_t n) const {
    if (remaining() < n) {
      throw FormatError(std::string(what_) + ": truncated at byte offset " +
                        std::to_string(bytes_.size()) + " (needed " + std::to_string(n) +
                        " bytes at offset " + std::to_string(pos_) + ")");
    }
  }

 private:
  std::uint64_t little_endian(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

void check_magic(std::span<const std::uint8_t> bytes, const char (&magic)[4],
                 const char* what) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0) {
    throw FormatError(std::string(what) + ": bad magic, expected '" +
                      std::string(magic, 4) + "'");
  }
}

void check_alpha_boundary(const EmbeddingRecord& r, std::size_t index) {
  for (Eigen::Index j = 0; j < r.vector.size(); ++j) {
    if (!(r.vector[j] >= 1.0f)) {
      throw InvalidInput("alpha-kind record " + std::to_string(index) + " component " +
                         std::to_string(j) + " is below 1");
    }
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

VectorKind parse_kind(const std::string& s) {
  if (s == "embedding") return VectorKind::Embedding;
  if (s == "alpha") return VectorKind::Alpha;
  throw FormatError("unknown vector kind '" + s + "'");
}

}  // namespace

FileFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".jsonl" ? FileFormat::Text : FileFormat::Binary;
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingStore& store) {
  const auto& records = store.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].id != i) {
      throw InvalidInput("EVB1 stores implicit ids: record ids must be 0.." +
                         std::to_string(records.size() - 1) + " (found id " +
                         std::to_string(records[i].id) + " at position " +
                         std::to_string(i) + ")");
    }
    if (store.kind() == VectorKind::Alpha) check_alpha_boundary(records[i], i);
  }
  if (records.size() > std::numeric_limits<std::uint32_t>::max() ||
      store.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidInput("EVB1: count or dimension exceeds 32 bits");
  }
  ByteWriter w;
  w.bytes(kEmbeddingMagic, 4);
  w.u16(kEmbeddingVersion);
  w.u8(static_cast<std::uint8_t>(store.kind()));
  w.u8(store.has_labels() ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(records.size()));
  w.u32(static_cast<std::uint32_t>(store.dim()));
  for (const auto& r : records) {
    if (store.has_labels()) w.u32(*r.label);
    for (Eigen::Index j = 0; j < r.vector.size(); ++j) w.f32(r.vector[j]);
  }
  return w.take();
}

EmbeddingStore decode_embeddings(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kEmbeddingMagic, "EVB1");
  ByteReader in(bytes.subspan(0), "EVB1");
  in.need(kEmbeddingHeaderSize);
  in.u32();  // magic
  const std::uint16_t version = in.u16();
  if (version != kEmbeddingVersion) {
    throw FormatError("EVB1: unsupported version " + std::to_string(version));
  }
  const std::uint8_t kind_tag = in.u8();
  if (kind_tag > 1) {
    throw FormatError("EVB1: unknown vector kind tag " + std::to_string(kind_tag));
  }
  const std::uint8_t label_flag = in.u8();
  if (label_flag > 1) {
    throw FormatError("EVB1: label flag must be 0 or 1, got " + std::to_string(label_flag));
  }
  const std::uint32_t count = in.u32();
  const std::uint32_t dim = in.u32();
  if (dim == 0) {
    throw FormatError("EVB1: dimension must be at least 1");
  }
  const auto kind = static_cast<VectorKind>(kind_tag);
  const std::uint64_t record_size = (label_flag ? 4u : 0u) + 4ull * dim;
  const std::uint64_t expected = kEmbeddingHeaderSize + record_size * count;
  if (bytes.size() < expected) {
    const std::uint64_t complete = (bytes.size() - kEmbeddingHeaderSize) / record_size;
    throw FormatError("EVB1: truncated at byte offset " + std::to_string(bytes.size()) +
                      " inside record " + std::to_string(complete) + " (expected " +
                      std::to_string(expected) + " bytes)");
  }
  if (bytes.size() > expected) {
    throw FormatError("EVB1: " + std::to_string(bytes.size() - expected) +
                      " trailing bytes after byte offset " + std::to_string(expected));
  }

  std::vector<EmbeddingRecord> records;
  records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    EmbeddingRecord r;
    r.id = i;
    if (label_flag) r.label = in.u32();
    r.vector.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j) r.vector[j] = in.f32();
    if (!r.vector.allFinite()) {
      throw InvalidInput("EVB1: record " + std::to_string(i) + " has a non-finite component");
    }
    if (kind == VectorKind::Alpha) check_alpha_boundary(r, i);
    records.push_back(std::move(r));
  }
  return EmbeddingStore(kind, dim, std::move(records));
}

std::string encode_embeddings_text(const EmbeddingStore& store) {
  std::string out =
      json{{"dim", store.dim()}, {"kind", to_string(store.kind())}}.dump() + "\n";
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& r = store.at(i);
    if (store.kind() == VectorKind::Alpha) check_alpha_boundary(r, i);
    json vec = json::array();
    for (Eigen::Index j = 0; j < r.vector.size(); ++j) {
      vec.push_back(static_cast<double>(r.vector[j]));
    }
    json line{{"id", r.id}, {"vector", std::move(vec)}};
    if (r.label) line["label"] = *r.label;
    out += line.dump() + "\n";
  }
  return out;
}

EmbeddingStore decode_embeddings_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::optional<VectorKind> kind;
  std::optional<Eigen::Index> dim;
  std::vector<EmbeddingRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw FormatError("line " + std::to_string(line_no) + ": expected a JSON object");
    }
    try {
      if (!obj.contains("vector")) {
        if (!records.empty() || kind) {
          throw FormatError("line " + std::to_string(line_no) + ": record without vector");
        }
        kind = parse_kind(obj.at("kind").get<std::string>());
        if (obj.contains("dim")) dim = obj.at("dim").get<Eigen::Index>();
        continue;
      }
      EmbeddingRecord r;
      r.id = obj.at("id").get<RecordId>();
      if (obj.contains("label") && !obj.at("label").is_null()) {
        r.label = obj.at("label").get<Label>();
      }
      const auto& vec = obj.at("vector");
      if (!vec.is_array()) throw FormatError("vector is not an array");
      r.vector.resize(static_cast<Eigen::Index>(vec.size()));
      for (std::size_t j = 0; j < vec.size(); ++j) {
        if (!vec[j].is_number()) {
          throw InvalidInput("record " + std::to_string(records.size()) +
                             " has a non-finite component");
        }
        r.vector[static_cast<Eigen::Index>(j)] = static_cast<float>(vec[j].get<double>());
      }
      if (!r.vector.allFinite()) {
        throw InvalidInput("record " + std::to_string(records.size()) +
                           " has a non-finite component");
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  const VectorKind k = kind.value_or(VectorKind::Embedding);
  if (!dim) {
    if (records.empty()) throw FormatError("text embeddings: no header and no records");
    dim = records.front().vector.size();
  }
  if (k == VectorKind::Alpha) {
    for (std::size_t i = 0; i < records.size(); ++i) check_alpha_boundary(records[i], i);
  }
  return EmbeddingStore(k, *dim, std::move(records));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

EmbeddingStore read_embeddings(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (format_for_path(path) == FileFormat::Text) {
    return decode_embeddings_text(std::string(bytes.begin(), bytes.end()));
  }
  return decode_embeddings(bytes);
}

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path,
                      FileFormat format) {
  if (format == FileFormat::Text) {
    write_file(path, encode_embeddings_text(store));
  } else {
    write_file(path, encode_embeddings(store));
  }
}

std::vector<std::uint8_t> encode_checkpoint(const ClassifierParams& params) {
  params.validate();
  ByteWriter w;
  w.bytes(kCheckpointMagic, 4);
  w.u32(static_cast<std::uint32_t>(params.input_dim()));
  w.u32(static_cast<std::uint32_t>(params.hidden_dim()));
  w.u32(static_cast<std::uint32_t>(params.num_classes()));
  w.u8(static_cast<std::uint8_t>(params.activation));
  auto put = [&w](const auto& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
  };
  put(params.w1);
  put(params.b1);
  put(params.w2);
  put(params.b2);
  return w.take();
}

ClassifierParams decode_checkpoint(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kCheckpointMagic, "EVM1");
  ByteReader in(bytes, "EVM1");
  in.u32();
  const std::uint32_t d = in.u32();
  const std::uint32_t h = in.u32();
  const std::uint32_t k = in.u32();
  const std::uint8_t tag = in.u8();
  if (tag > static_cast<std::uint8_t>(OutputActivation::Softmax)) {
    throw FormatError("EVM1: unknown activation tag " + std::to_string(tag));
  }
  if (d == 0 || h == 0 || k < 2) {
    throw FormatError("EVM1: invalid shape D=" + std::to_string(d) + " H=" +
                      std::to_string(h) + " K=" + std::to_string(k));
  }
  const std::uint64_t n_values = std::uint64_t{h} * d + h + std::uint64_t{k} * h + k;
  const std::uint64_t expected = 17 + 8 * n_values;
  if (bytes.size() != expected) {
    throw FormatError("EVM1: expected " + std::to_string(expected) + " bytes, file has " +
                      std::to_string(bytes.size()));
  }
  ClassifierParams p = ClassifierParams::zeros(d, h, k, static_cast<OutputActivation>(tag));
  auto get = [&in](auto& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = in.f64();
  };
  get(p.w1);
  get(p.b1);
  get(p.w2);
  get(p.b2);
  p.validate();
  return p;
}

ClassifierParams read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

void write_checkpoint(const ClassifierParams& params, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(params));
}

void write_results(std::span<const RankedList> results, const std::filesystem::path& path) {
  std::string out;
  for (const auto& list : results) {
    json entries = json::array();
    for (const auto& e : list.entries) {
      json je{{"id", e.id}, {"rank", e.rank}, {"score", e.score}};
      if (e.uncertainty) je["u"] = *e.uncertainty;
      if (e.original_rank) je["original_rank"] = *e.original_rank;
      entries.push_back(std::move(je));
    }
    json line{{"entries", std::move(entries)}};
    if (list.query_id) line["query_id"] = *list.query_id;
    if (list.query_label) line["query_label"] = *list.query_label;
    out += line.dump() + "\n";
  }
  write_file(path, out);
}

std::vector<RankedList> read_results(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::string line;
  std::size_t line_no = 0;
  std::vector<RankedList> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json obj = json::parse(line);
      RankedList list;
      if (obj.contains("query_id")) list.query_id = obj.at("query_id").get<RecordId>();
      if (obj.contains("query_label")) list.query_label = obj.at("query_label").get<Label>();
      for (const auto& je : obj.at("entries")) {
        RankedEntry e;
        e.id = je.at("id").get<RecordId>();
        e.rank = je.at("rank").get<std::size_t>();
        e.score = je.at("score").get<double>();
        if (je.contains("u")) e.uncertainty = je.at("u").get<double>();
        if (je.contains("original_rank")) {
          e.original_rank = je.at("original_rank").get<std::size_t>();
        }
        list.entries.push_back(e);
      }
      out.push_back(std::move(list));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  report.validate();
  json recall = json::array();
  for (const auto& [k, pct] : report.recall) recall.push_back({{"k", k}, {"percent", pct}});
  json aps = json::array();
  for (const auto& q : report.aps) aps.push_back({{"ap", q.ap}, {"query", q.query}});
  json curve = json::array();
  for (const auto& [t, c] : report.ap_curve) curve.push_back({{"count", c}, {"threshold", t}});
  json doc{{"average_precision", std::move(aps)},
           {"ap_exceedance", std::move(curve)},
           {"excluded_queries", report.excluded_queries},
           {"metadata", report.metadata},
           {"recall_at_k", std::move(recall)}};
  if (report.histogram) {
    const auto& h = *report.histogram;
    doc["histogram"] = {{"clamped", h.clamped},
                        {"edges", h.edges},
                        {"negative", h.negative},
                        {"positive", h.positive}};
  }
  return doc.dump(2) + "\n";
}

std::string curve_csv(const EvalReport& report) {
  std::string out = "threshold,count\n";
  for (const auto& [t, c] : report.ap_curve) {
    out += format_number(t) + "," + std::to_string(c) + "\n";
  }
  return out;
}

std::string histogram_csv(const PairHistogram& h) {
  std::string out = "lo,hi,positive,negative\n";
  for (std::size_t i = 0; i < h.positive.size(); ++i) {
    out += format_number(h.edges[i]) + "," + format_number(h.edges[i + 1]) + "," +
           std::to_string(h.positive[i]) + "," + std::to_string(h.negative[i]) + "\n";
  }
  return out;
}

std::filesystem::path curve_csv_path(const std::filesystem::path& report_path) {
  auto p = report_path;
  return p.replace_extension(".curve.csv");
}

std::filesystem::path histogram_csv_path(const std::filesystem::path& report_path) {
  auto p = report_path;
  return p.replace_extension(".hist.csv");
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  write_file(path, report_json(report));
  write_file(curve_csv_path(path), curve_csv(report));
  if (report.histogram) {
    write_file(histogram_csv_path(path), histogram_csv(*report.histogram));
  }
}

void write_loss_trace(std::span<const double> trace, const std::filesystem::path& path) {
  std::string out = "epoch,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i) + "," + format_number(trace[i]) + "\n";
  }
  write_file(path, out);
}

EmbeddingStore store_from_dataset(const FeatureDataset& dataset) {
  std::vector<EmbeddingRecord> records;
  records.reserve(dataset.records.size());
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    records.push_back(EmbeddingRecord{i, static_cast<Label>(r.label), r.x.cast<float>()});
  }
  return EmbeddingStore(VectorKind::Embedding, std::max<Eigen::Index>(1, dataset.dim()),
                        std::move(records));
}

FeatureDataset dataset_from_store(const EmbeddingStore& store) {
  if (!store.has_labels()) {
    throw InvalidInput("dataset needs labelled records");
  }
  FeatureDataset ds;
  Label max_label = 0;
  for (const auto& r : store.records()) {
    ds.records.push_back(FeatureRecord{r.vector.cast<double>(), static_cast<Eigen::Index>(*r.label)});
    max_label = std::max(max_label, *r.label);
  }
  ds.num_classes = static_cast<Eigen::Index>(max_label) + 1;
  return ds;
}

}  // namespace evr::io
