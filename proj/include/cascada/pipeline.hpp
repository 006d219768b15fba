#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascada/backends.hpp"
#include "cascada/core.hpp"
#include "cascada/mock_backends.hpp"

namespace cascada {

enum class BackendKind { kMock, kRemote };

struct BackendSelection {
  BackendKind kind = BackendKind::kMock;

  // kMock
  std::optional<std::filesystem::path> lexicon_path;
  std::optional<mock::NoiseSpec> asr_noise;

  // kRemote: base URL per stage ("asr", "mt", "tts", "vc", "embed").
  std::map<std::string, std::string> urls;
  double timeout_s = 60.0;
  int retries = 2;
  double backoff_s = 0.5;
};

struct PipelineConfig {
  LanguageCode source_lang;  // unset until configured
  LanguageCode target_lang;
  // true: voice conversion onto the source speaker; false: plain TTS output.
  bool preserve_prosody = true;
  DecodeParams asr_decode;
  BackendSelection backend;
  int parallelism = 1;

  /// Stages the cascade will call under this config.
  std::vector<std::string> stages_used() const;
  void validate() const;
};

/// ASR -> MT -> TTS -> (VC onto `clip` when preserve_prosody). Stage
/// failures surface as StageError. An empty transcript is passed on as is.
TranslationResult run_cascade(const AudioClip& clip, const PipelineConfig& config,
                              const StageBackendSet& backends, std::string utterance_id = {});

/// One result per utterance, in input order. Each utterance is read from
/// disk and run with its own language pair; failures land in
/// TranslationResult::error instead of aborting the batch.
std::vector<TranslationResult> run_batch(const std::vector<Utterance>& utterances, const PipelineConfig& config,
                                         const StageBackendSet& backends);

/// Reads an utterance's WAV, filling the speaker tag from speaker_id when
/// the file carries none.
AudioClip load_utterance_audio(const Utterance& utterance);

}  // namespace cascada
