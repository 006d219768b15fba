#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cascada/error.hpp"

namespace cascada {

/// Two lowercase ASCII letters, e.g. "es" or "en".
class LanguageCode {
 public:
  LanguageCode() = default;  // "und", only useful as a placeholder
  explicit LanguageCode(std::string_view code);

  const std::string& str() const noexcept { return code_; }
  bool valid() const noexcept { return code_.size() == 2; }

  friend bool operator==(const LanguageCode&, const LanguageCode&) = default;
  friend auto operator<=>(const LanguageCode&, const LanguageCode&) = default;

 private:
  std::string code_;
};

/// Mono 16-bit PCM audio plus an optional opaque speaker tag.
struct AudioClip {
  std::vector<int16_t> samples;
  int sample_rate = 16000;
  std::optional<std::string> speaker_tag;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }

  /// Throws kInvalidArgument unless the clip may enter a stage.
  void validate() const;

  friend bool operator==(const AudioClip&, const AudioClip&) = default;
};

enum class DecodeStrategy { kGreedy, kBeam };

std::string_view to_string(DecodeStrategy strategy);
DecodeStrategy parse_decode_strategy(std::string_view text);

struct DecodeParams {
  double temperature = 1.0;
  DecodeStrategy strategy = DecodeStrategy::kGreedy;
  int beam_size = 0;  // only meaningful for kBeam

  void validate() const;

  friend bool operator==(const DecodeParams&, const DecodeParams&) = default;
};

struct SpeakerEmbedding {
  std::vector<double> vector;

  std::size_t dim() const noexcept { return vector.size(); }
  /// Throws if empty or any component is non-finite.
  void validate() const;

  friend bool operator==(const SpeakerEmbedding&, const SpeakerEmbedding&) = default;
};

struct Utterance {
  std::string id;
  std::filesystem::path audio_path;
  LanguageCode source_lang;
  LanguageCode target_lang;
  std::optional<std::string> source_text;
  std::optional<std::string> reference_translation;
  std::optional<std::string> speaker_id;
};

struct TranslationResult {
  std::string utterance_id;
  std::string transcript;
  std::string translation;
  AudioClip tts_audio;
  AudioClip output_audio;
  // Client-side wall time per executed stage, request to response.
  std::map<std::string, double> stage_timings;
  // Model time reported by a remote server, only for stages that sent one.
  std::map<std::string, double> model_timings;
  double total_latency_s = 0.0;
  // Set when the utterance failed inside a batch; other fields are then empty.
  std::optional<std::string> error;

  bool ok() const noexcept { return !error.has_value(); }
};

}  // namespace cascada
