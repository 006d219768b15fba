#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "cascada/core.hpp"

namespace cascada {

/// What a stage call hands back: the value, plus the model-side processing
/// time when the backend reports one (remote servers may; mocks don't).
template <typename T>
struct StageReply {
  StageReply(T v) : value(std::move(v)) {}  // NOLINT: implicit on purpose
  StageReply(T v, std::optional<double> model_s) : value(std::move(v)), model_seconds(model_s) {}

  T value;
  std::optional<double> model_seconds;
};

using AsrFn = std::function<StageReply<std::string>(const AudioClip&, const LanguageCode&, const DecodeParams&)>;
using MtFn = std::function<StageReply<std::string>(std::string_view, const LanguageCode&, const LanguageCode&)>;
using TtsFn = std::function<StageReply<AudioClip>(std::string_view, const LanguageCode&)>;
using VcFn = std::function<StageReply<AudioClip>(const AudioClip& content, const AudioClip& reference)>;
using EmbedFn = std::function<StageReply<SpeakerEmbedding>(const AudioClip&)>;

/// The five capabilities a cascade draws on. Implementations must be safe
/// for concurrent invocation.
struct StageBackendSet {
  std::string name;
  AsrFn asr;
  MtFn mt;
  TtsFn tts;
  VcFn vc;
  EmbedFn embed;
  // Identical inputs give identical outputs. Mocks always set this.
  bool deterministic = false;

  /// Throws kConfig naming the first missing capability.
  void validate() const;
};

}  // namespace cascada
