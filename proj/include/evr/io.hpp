#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "evr/classifier.hpp"
#include "evr/eval.hpp"
#include "evr/retrieval.hpp"

namespace evr::io {

// EVB1 embedding file, little-endian:
//   "EVB1" | version u16 | kind u8 | label flag u8 | count u32 | dim u32
//   then per record: [label u32] dim x f32
// Record ids are implicit (0 .. count-1).
inline constexpr char kEmbeddingMagic[4] = {'E', 'V', 'B', '1'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderSize = 16;

// EVM1 checkpoint: "EVM1" | D u32 | H u32 | K u32 | activation u8 |
//   W1 (H x D), b1 (H), W2 (K x H), b2 (K) as row-major f64.
inline constexpr char kCheckpointMagic[4] = {'E', 'V', 'M', '1'};

enum class FileFormat { Binary, Text };

/// ".jsonl" selects the text format; anything else is EVB1.
FileFormat format_for_path(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_embeddings(const EmbeddingStore& store);
EmbeddingStore decode_embeddings(std::span<const std::uint8_t> bytes);

/// JSON Lines: optional header {"dim", "kind"} then {"id", "label", "vector"}.
std::string encode_embeddings_text(const EmbeddingStore& store);
EmbeddingStore decode_embeddings_text(const std::string& text);

EmbeddingStore read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path,
                      FileFormat format);

std::vector<std::uint8_t> encode_checkpoint(const ClassifierParams& params);
ClassifierParams decode_checkpoint(std::span<const std::uint8_t> bytes);
ClassifierParams read_checkpoint(const std::filesystem::path& path);
void write_checkpoint(const ClassifierParams& params, const std::filesystem::path& path);

/// One JSON object per query.
void write_results(std::span<const RankedList> results, const std::filesystem::path& path);
std::vector<RankedList> read_results(const std::filesystem::path& path);

/// JSON report plus CSV siblings `<stem>.curve.csv` and, when a histogram
/// is present, `<stem>.hist.csv`.
void write_report(const EvalReport& report, const std::filesystem::path& path);
std::string report_json(const EvalReport& report);
std::string curve_csv(const EvalReport& report);
std::string histogram_csv(const PairHistogram& histogram);

std::filesystem::path curve_csv_path(const std::filesystem::path& report_path);
std::filesystem::path histogram_csv_path(const std::filesystem::path& report_path);

void write_loss_trace(std::span<const double> trace, const std::filesystem::path& path);

/// Labelled embedding store with ids 0..n-1 from a dataset.
EmbeddingStore store_from_dataset(const FeatureDataset& dataset);
/// Requires labels; number of classes is max label + 1.
FeatureDataset dataset_from_store(const EmbeddingStore& store);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace evr::io
