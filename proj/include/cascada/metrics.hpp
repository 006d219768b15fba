#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascada/core.hpp"

namespace cascada::metrics {

/// Identifies the tokenizer in reports.
inline constexpr std::string_view kTokenizerName = "lower+strip[.,?!;:\"()]+whitespace";

/// Unicode-lowercases, deletes . , ? ! ; : " ( ) and splits on whitespace.
/// Apostrophes and hyphens stay inside words.
std::vector<std::string> tokenize(std::string_view text);

struct BleuScore {
  double score = 0.0;                  // 0..100
  std::array<double, 4> precisions{};  // clipped n-gram precision, n = 1..4
  std::array<long, 4> matches{};
  std::array<long, 4> totals{};
  double brevity_penalty = 0.0;
  long hyp_len = 0;
  long ref_len = 0;
};

/// Unsmoothed corpus BLEU-4, one reference per hypothesis, uniform weights.
/// Counts are pooled over the corpus before the precisions are formed.
BleuScore corpus_bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references);
BleuScore corpus_bleu_tokens(const std::vector<std::vector<std::string>>& hypotheses,
                             const std::vector<std::vector<std::string>>& references);

struct WerScore {
  double wer = 0.0;
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  long ref_words = 0;

  long errors() const noexcept { return substitutions + deletions + insertions; }
};

/// Levenshtein alignment over tokens. Among equal-cost alignments the
/// backtrace prefers substitution, then deletion, then insertion.
WerScore wer(std::string_view hypothesis, std::string_view reference);
WerScore wer_tokens(std::span<const std::string> hypothesis, std::span<const std::string> reference);
/// Pools S, D, I and reference length over all pairs.
WerScore corpus_wer(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references);

struct LatencyRecord {
  double processing_s = 0.0;
  double duration_s = 0.0;
};

struct LatencyStats {
  double per_clip_mean_s = 0.0;
  double duration_weighted_s = 0.0;  // sum(t*d) / sum(d)
  double rtf = 0.0;                  // sum(t) / sum(d)
  std::size_t n = 0;
};

LatencyStats latency_stats(std::span<const LatencyRecord> records);

double cosine_similarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b);

}  // namespace cascada::metrics
