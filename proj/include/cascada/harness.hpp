#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cascada/backends.hpp"
#include "cascada/core.hpp"
#include "cascada/metrics.hpp"
#include "cascada/pipeline.hpp"

namespace cascada::harness {

struct Manifest {
  std::string task_name;
  std::vector<Utterance> utterances;

  const Utterance& at(const std::string& id) const;
  LanguageCode source_lang() const { return utterances.front().source_lang; }
  LanguageCode target_lang() const { return utterances.front().target_lang; }
};

/// JSON Lines, one utterance per line:
///   {"id", "audio_path", "source_lang", "target_lang",
///    "source_text"?, "reference_translation"?, "speaker_id"?, "task"?}
/// Relative audio paths resolve against the manifest's directory. The task
/// name comes from "task" when present (it must agree across lines), else
/// from the file stem.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(std::string_view content, const std::filesystem::path& base_dir,
                        std::string default_task_name);
/// Non-empty, unique ids, one language pair, source != target.
void validate_manifest(const Manifest& manifest);

struct SamplingPlan {
  std::size_t clips_per_iteration = 250;
  std::size_t iterations = 10;
  uint64_t seed = 0;

  void validate(std::size_t manifest_size) const;
};

/// Iteration j draws n distinct ids from the id-sorted manifest by a
/// partial Fisher-Yates shuffle driven by SplitMix64(seed + j); slot i
/// swaps with i + next() % (N - i).
std::vector<std::vector<std::string>> sample_iterations(const Manifest& manifest, const SamplingPlan& plan);

struct SamplingSummary {
  std::vector<double> per_iteration_scores;
  double mean = 0.0;
  double std = 0.0;  // sample std (k - 1); 0 when k == 1
};

SamplingSummary summarize(std::vector<double> scores);

/// The band within which per-task std fell in the original experiments;
/// reported as an annotation only.
inline constexpr double kReferenceStdLow = 0.5;
inline constexpr double kReferenceStdHigh = 1.5;

struct EvalAsr {
  std::string name = "eval-asr";
  AsrFn asr;
  DecodeParams decode{1.0, DecodeStrategy::kGreedy, 0};
  bool deterministic = false;
};

struct S2stBleuReport {
  std::string task_name;
  LanguageCode source_lang;
  LanguageCode target_lang;
  SamplingPlan plan;
  std::string eval_asr_name;
  DecodeParams eval_decode;
  bool preserve_prosody = true;
  std::vector<std::vector<std::string>> subsets;
  std::vector<metrics::BleuScore> per_iteration;
  SamplingSummary summary;  // summary.mean is BLEU-c

  bool std_in_reference_band() const {
    return summary.std > kReferenceStdLow && summary.std < kReferenceStdHigh;
  }
};

/// For each sampled iteration: cascade every clip, back-transcribe the
/// output audio with eval_asr in the target language, and score the
/// transcripts against reference_translation with corpus BLEU. When both
/// the backends and eval_asr are deterministic each clip is processed once.
S2stBleuReport eval_s2st_bleu(const Manifest& manifest, const PipelineConfig& config,
                              const StageBackendSet& backends, const SamplingPlan& plan, const EvalAsr& eval_asr);

struct AsrBenchRow {
  std::string model;
  metrics::WerScore wer;
  metrics::LatencyStats latency;                       // client wall time
  std::optional<metrics::LatencyStats> model_latency;  // server-reported, when every clip had one
  std::optional<std::string> failure;                  // set: row is FAILED, numbers meaningless

  bool failed() const { return failure.has_value(); }
};

/// Transcribes every utterance (audio loading is not timed) and scores the
/// transcripts against source_text.
AsrBenchRow bench_asr(const Manifest& manifest, const EvalAsr& model, int parallelism = 1);

}  // namespace cascada::harness
