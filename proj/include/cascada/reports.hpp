#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascada/harness.hpp"
#include "cascada/mos.hpp"

namespace cascada::reports {

using nlohmann::json;

// JSON carries full precision; Markdown renders two decimals and bolds the
// larger score in a row.

json to_json(const metrics::BleuScore& b);
json to_json(const metrics::WerScore& w);
json to_json(const metrics::LatencyStats& s);
json to_json(const harness::SamplingSummary& s);
json to_json(const TranslationResult& r);

// Back-transcription BLEU over sampled iterations. Contains no timings, so
// reruns with identical inputs serialize byte-identically.
json s2st_json(const harness::S2stBleuReport& report);
std::string s2st_markdown(const harness::S2stBleuReport& report);

enum class Spread { kStd, kCi95 };

json mos_json(const mos::MosReport& report);
/// Task | MOS-h (GT) | MOS-v (vanilla TTS) | MOS-c (prosody transfer).
std::string mos_markdown(const mos::MosReport& report, Spread spread);

struct BleuComparisonRow {
  std::string task;
  double bleu_r = 0.0;  // reported elsewhere, never computed here
  std::string source;
  std::optional<double> bleu_c;
};

/// JSON array of {"task", "bleu_r", "source"}.
std::vector<BleuComparisonRow> load_bleu_reference(const std::filesystem::path& path);
json bleu_comparison_json(const std::vector<BleuComparisonRow>& rows);
std::string bleu_comparison_markdown(const std::vector<BleuComparisonRow>& rows);

/// Which statistic fills the "Average Latency (s)" column.
enum class LatencyColumn { kPerClipMean, kDurationWeighted, kRtf };
LatencyColumn parse_latency_column(std::string_view name);
std::string_view to_string(LatencyColumn c);

json asr_bench_json(const std::vector<harness::AsrBenchRow>& rows, LatencyColumn column);
std::string asr_bench_markdown(const std::vector<harness::AsrBenchRow>& rows, LatencyColumn column);

struct BleuMatrixEntry {
  std::string language;   // the non-English side
  std::string direction;  // "X-en" or "en-X"
  double mean_bleu = 0.0;
  double std = 0.0;
};

/// Derives the matrix entry from a report's language pair; throws when
/// neither side is English.
BleuMatrixEntry matrix_entry(const LanguageCode& source, const LanguageCode& target,
                             const harness::SamplingSummary& summary);
/// Header `language,direction,mean_bleu,std`; rows sorted by direction then language.
std::string bleu_matrix_csv(std::vector<BleuMatrixEntry> entries);

/// Writes <dir>/<name>.json and <dir>/<name>.md.
void write_report(const std::filesystem::path& dir, const std::string& name, const json& data,
                  const std::string& markdown);
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace cascada::reports
