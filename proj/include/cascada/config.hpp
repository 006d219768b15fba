#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "cascada/harness.hpp"
#include "cascada/pipeline.hpp"

namespace cascada::config {

/// How back-transcripts are produced during evaluation.
struct EvalAsrSpec {
  BackendKind kind = BackendKind::kMock;
  std::optional<mock::NoiseSpec> noise;  // mock only
  std::string url;                       // remote only
  double timeout_s = 60.0;
  int retries = 2;
  double backoff_s = 0.5;
  DecodeParams decode{1.0, DecodeStrategy::kGreedy, 0};
};

struct AppConfig {
  PipelineConfig pipeline;
  EvalAsrSpec eval_asr;
};

/// Config file schema (every key optional):
///   {
///     "source_lang": "es", "target_lang": "en",
///     "preserve_prosody": true,
///     "parallelism": 1,
///     "asr_decode": {"temperature": 1.0, "strategy": "greedy" | "beam", "beam_size": 5},
///     "backend": {"kind": "mock", "lexicon": "lexicon.tsv", "asr_noise": {"p": 0.0, "seed": 0}}
///              | {"kind": "remote", "url": "http://host:port",
///                 "urls": {"asr": ..., "mt": ..., "tts": ..., "vc": ..., "embed": ...},
///                 "timeout_s": 60, "retries": 2, "backoff_s": 0.5},
///     "eval_asr": {"kind": "mock", "noise": {"p": 0.1, "seed": 42}, "temperature": 1.0, "strategy": "greedy"}
///               | {"kind": "remote", "url": "http://host:port", ...}
///   }
/// "url" fills every stage not named in "urls". Relative lexicon paths
/// resolve against base_dir. Languages left out stay unset until a flag or
/// manifest provides them.
AppConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
AppConfig load_config(const std::filesystem::path& path);

/// Mock or remote backend set for the pipeline config. Remote servers are
/// health-checked for the stages the config uses.
StageBackendSet build_backends(const PipelineConfig& config, bool verify_health = true);

harness::EvalAsr build_eval_asr(const EvalAsrSpec& spec);

}  // namespace cascada::config
