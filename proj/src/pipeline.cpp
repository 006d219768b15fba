#include "cascada/pipeline.hpp"

#include <chrono>
#include <exception>

#include "cascada/parallel.hpp"
#include "cascada/wav.hpp"

namespace cascada {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
auto timed_stage(const char* stage, TranslationResult& result, Fn&& call) {
  const auto start = Clock::now();
  try {
    auto reply = call();
    result.stage_timings[stage] = seconds_since(start);
    if (reply.model_seconds) result.model_timings[stage] = *reply.model_seconds;
    return std::move(reply.value);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.code(), e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, ErrorCode::kStageFailure, e.what());
  }
}

}  // namespace

void StageBackendSet::validate() const {
  if (!asr) throw Error(ErrorCode::kConfig, "backend set '" + name + "' lacks asr");
  if (!mt) throw Error(ErrorCode::kConfig, "backend set '" + name + "' lacks mt");
  if (!tts) throw Error(ErrorCode::kConfig, "backend set '" + name + "' lacks tts");
  if (!vc) throw Error(ErrorCode::kConfig, "backend set '" + name + "' lacks vc");
  if (!embed) throw Error(ErrorCode::kConfig, "backend set '" + name + "' lacks embed");
}

std::vector<std::string> PipelineConfig::stages_used() const {
  std::vector<std::string> stages{"asr", "mt", "tts"};
  if (preserve_prosody) stages.emplace_back("vc");
  return stages;
}

void PipelineConfig::validate() const {
  if (!source_lang.valid() || !target_lang.valid()) {
    throw Error(ErrorCode::kConfig, "source and target languages are required");
  }
  if (parallelism < 1) throw Error(ErrorCode::kConfig, "parallelism must be >= 1");
  asr_decode.validate();
  if (backend.kind == BackendKind::kRemote) {
    for (const auto& stage : stages_used()) {
      if (!backend.urls.contains(stage) || backend.urls.at(stage).empty()) {
        throw Error(ErrorCode::kConfig, "remote backend needs a URL for stage '" + stage + "'");
      }
    }
    if (backend.timeout_s <= 0) throw Error(ErrorCode::kConfig, "timeout_s must be positive");
    if (backend.retries < 0) throw Error(ErrorCode::kConfig, "retries must be >= 0");
    if (backend.backoff_s < 0) throw Error(ErrorCode::kConfig, "backoff_s must be >= 0");
  }
  if (backend.asr_noise) backend.asr_noise->validate();
}

TranslationResult run_cascade(const AudioClip& clip, const PipelineConfig& config,
                              const StageBackendSet& backends, std::string utterance_id) {
  clip.validate();
  const auto start = Clock::now();

  TranslationResult r;
  r.utterance_id = std::move(utterance_id);
  r.transcript = timed_stage("asr", r, [&] { return backends.asr(clip, config.source_lang, config.asr_decode); });
  r.translation = timed_stage("mt", r, [&] {
    return backends.mt(r.transcript, config.source_lang, config.target_lang);
  });
  r.tts_audio = timed_stage("tts", r, [&] { return backends.tts(r.translation, config.target_lang); });
  if (config.preserve_prosody) {
    r.output_audio = timed_stage("vc", r, [&] { return backends.vc(r.tts_audio, clip); });
  } else {
    r.output_audio = r.tts_audio;
  }
  r.total_latency_s = seconds_since(start);
  return r;
}

AudioClip load_utterance_audio(const Utterance& utterance) {
  AudioClip clip = read_wav(utterance.audio_path);
  if (!clip.speaker_tag && utterance.speaker_id) clip.speaker_tag = utterance.speaker_id;
  return clip;
}

std::vector<TranslationResult> run_batch(const std::vector<Utterance>& utterances, const PipelineConfig& config,
                                         const StageBackendSet& backends) {
  std::vector<TranslationResult> results(utterances.size());
  parallel_for(utterances.size(), config.parallelism, [&](std::size_t i) {
    const Utterance& u = utterances[i];
    try {
      PipelineConfig local = config;
      local.source_lang = u.source_lang;
      local.target_lang = u.target_lang;
      results[i] = run_cascade(load_utterance_audio(u), local, backends, u.id);
    } catch (const std::exception& e) {
      results[i] = TranslationResult{};
      results[i].utterance_id = u.id;
      results[i].error = e.what();
    }
  });
  return results;
}

}  // namespace cascada
