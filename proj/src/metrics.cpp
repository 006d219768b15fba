#include "cascada/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "cascada/text.hpp"

namespace cascada::metrics {
namespace {

bool is_stripped(char32_t c) {
  switch (c) {
    case U'.': case U',': case U'?': case U'!': case U';': case U':': case U'"': case U'(': case U')':
      return true;
    default:
      return false;
  }
}

using NgramCounts = std::map<std::vector<std::string>, long>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<long>(i), tokens.begin() + static_cast<long>(i + n))];
  }
  return counts;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view input) {
  std::u32string cps = text::decode_utf8(input);
  std::u32string kept;
  kept.reserve(cps.size());
  for (char32_t c : cps) {
    if (!is_stripped(c)) kept.push_back(text::to_lower(c));
  }
  return text::split_whitespace(text::encode_utf8(kept));
}

BleuScore corpus_bleu_tokens(const std::vector<std::vector<std::string>>& hypotheses,
                             const std::vector<std::vector<std::string>>& references) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorCode::kInvalidArgument, "corpus_bleu: " + std::to_string(hypotheses.size()) +
                                                 " hypotheses vs " + std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw Error(ErrorCode::kInvalidArgument, "corpus_bleu: empty corpus");

  BleuScore b;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& hyp = hypotheses[s];
    const auto& ref = references[s];
    b.hyp_len += static_cast<long>(hyp.size());
    b.ref_len += static_cast<long>(ref.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      const NgramCounts hyp_counts = count_ngrams(hyp, n);
      const NgramCounts ref_counts = count_ngrams(ref, n);
      for (const auto& [gram, count] : hyp_counts) {
        b.totals[n - 1] += count;
        if (auto it = ref_counts.find(gram); it != ref_counts.end()) b.matches[n - 1] += std::min(count, it->second);
      }
    }
  }

  bool any_zero = false;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    b.precisions[n] = b.totals[n] > 0 ? static_cast<double>(b.matches[n]) / static_cast<double>(b.totals[n]) : 0.0;
    if (b.precisions[n] == 0.0) {
      any_zero = true;
    } else {
      log_sum += 0.25 * std::log(b.precisions[n]);
    }
  }

  if (b.hyp_len == 0) {
    b.brevity_penalty = 0.0;
  } else if (b.hyp_len > b.ref_len) {
    b.brevity_penalty = 1.0;
  } else {
    b.brevity_penalty = std::exp(1.0 - static_cast<double>(b.ref_len) / static_cast<double>(b.hyp_len));
  }

  if (any_zero) {
    b.score = 0.0;
  } else if (std::all_of(b.precisions.begin(), b.precisions.end(), [](double p) { return p == 1.0; }) &&
             b.brevity_penalty == 1.0) {
    b.score = 100.0;  // exp(0) is exact, keep it that way
  } else {
    b.score = 100.0 * b.brevity_penalty * std::exp(log_sum);
  }
  return b;
}

BleuScore corpus_bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  std::vector<std::vector<std::string>> hyp_tokens;
  std::vector<std::vector<std::string>> ref_tokens;
  hyp_tokens.reserve(hypotheses.size());
  ref_tokens.reserve(references.size());
  for (const auto& h : hypotheses) hyp_tokens.push_back(tokenize(h));
  for (const auto& r : references) ref_tokens.push_back(tokenize(r));
  return corpus_bleu_tokens(hyp_tokens, ref_tokens);
}

WerScore wer_tokens(std::span<const std::string> hyp, std::span<const std::string> ref) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  // dist[i][j]: edits turning ref[0..i) into hyp[0..j)
  std::vector<std::vector<long>> dist(n + 1, std::vector<long>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) dist[i][0] = static_cast<long>(i);
  for (std::size_t j = 0; j <= m; ++j) dist[0][j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const long diag = dist[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      dist[i][j] = std::min({diag, dist[i - 1][j] + 1, dist[i][j - 1] + 1});
    }
  }

  WerScore w;
  w.ref_words = static_cast<long>(n);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (dist[i][j] == dist[i - 1][j - 1] + (same ? 0 : 1)) {
        if (!same) ++w.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && dist[i][j] == dist[i - 1][j] + 1) {
      ++w.deletions;
      --i;
    } else {
      ++w.insertions;
      --j;
    }
  }
  w.wer = n > 0 ? static_cast<double>(w.errors()) / static_cast<double>(n) : 0.0;
  return w;
}

WerScore wer(std::string_view hypothesis, std::string_view reference) {
  const auto ref = tokenize(reference);
  if (ref.empty()) throw Error(ErrorCode::kInvalidArgument, "wer: reference is empty after tokenization");
  const auto hyp = tokenize(hypothesis);
  return wer_tokens(hyp, ref);
}

WerScore corpus_wer(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorCode::kInvalidArgument, "corpus_wer: hypothesis/reference count mismatch");
  }
  WerScore total;
  for (std::size_t k = 0; k < hypotheses.size(); ++k) {
    const auto w = wer_tokens(tokenize(hypotheses[k]), tokenize(references[k]));
    total.substitutions += w.substitutions;
    total.deletions += w.deletions;
    total.insertions += w.insertions;
    total.ref_words += w.ref_words;
  }
  if (total.ref_words == 0) throw Error(ErrorCode::kInvalidArgument, "corpus_wer: no reference words");
  total.wer = static_cast<double>(total.errors()) / static_cast<double>(total.ref_words);
  return total;
}

LatencyStats latency_stats(std::span<const LatencyRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "latency_stats: no records");
  double sum_t = 0.0;
  double sum_d = 0.0;
  double sum_td = 0.0;
  for (const auto& r : records) {
    if (!std::isfinite(r.processing_s) || r.processing_s < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "latency_stats: processing time must be finite and >= 0");
    }
    if (!std::isfinite(r.duration_s) || r.duration_s <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "latency_stats: clip duration must be finite and > 0");
    }
    sum_t += r.processing_s;
    sum_d += r.duration_s;
    sum_td += r.processing_s * r.duration_s;
  }
  LatencyStats s;
  s.n = records.size();
  s.per_clip_mean_s = sum_t / static_cast<double>(s.n);
  s.duration_weighted_s = sum_td / sum_d;
  s.rtf = sum_t / sum_d;
  return s;
}

double cosine_similarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "cosine_similarity: dimension " + std::to_string(a.dim()) + " vs " +
                                                 std::to_string(b.dim()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.vector[i] * b.vector[i];
    na += a.vector[i] * a.vector[i];
    nb += b.vector[i] * b.vector[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kInvalidArgument, "cosine_similarity: zero vector");
  // sqrt(na * nb) keeps sim(a, a) == 1 exactly.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace cascada::metrics
