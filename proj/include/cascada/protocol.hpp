#pragma once

// JSON bodies of the model-server wire protocol. Audio travels as base64 of
// a complete WAV file. Shared by the remote client and the mock server.
//
//   POST /v1/asr        {"audio", "language", "decode": {"temperature", "strategy"[, "beam_size"]}}
//                       -> {"text", "processing_ms"?}
//   POST /v1/translate  {"text", "source_lang", "target_lang"} -> {"text"}
//   POST /v1/tts        {"text", "language", "voice"?} -> {"audio"}
//   POST /v1/convert    {"content_audio", "reference_audio"} -> {"audio"}
//   POST /v1/embed      {"audio"} -> {"embedding": [...]}
//   GET  /v1/health     -> {"status", "capabilities", "models"}
//   errors: non-2xx with {"error": {"code", "message"}}

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cascada/core.hpp"

namespace cascada::protocol {

using nlohmann::json;

inline constexpr std::string_view kAsrPath = "/v1/asr";
inline constexpr std::string_view kTranslatePath = "/v1/translate";
inline constexpr std::string_view kTtsPath = "/v1/tts";
inline constexpr std::string_view kConvertPath = "/v1/convert";
inline constexpr std::string_view kEmbedPath = "/v1/embed";
inline constexpr std::string_view kHealthPath = "/v1/health";

std::string audio_to_b64(const AudioClip& clip);
AudioClip audio_from_b64(std::string_view b64);

json decode_to_json(const DecodeParams& decode);
DecodeParams decode_from_json(const json& j);

// Requests, client side.
json asr_request(const AudioClip& clip, const LanguageCode& lang, const DecodeParams& decode);
json translate_request(std::string_view text, const LanguageCode& src, const LanguageCode& tgt);
json tts_request(std::string_view text, const LanguageCode& lang, const std::optional<std::string>& voice = {});
json convert_request(const AudioClip& content, const AudioClip& reference);
json embed_request(const AudioClip& clip);

// Requests, server side.
struct AsrRequest {
  AudioClip audio;
  LanguageCode language;
  DecodeParams decode;
};
struct TranslateRequest {
  std::string text;
  LanguageCode source_lang;
  LanguageCode target_lang;
};
struct TtsRequest {
  std::string text;
  LanguageCode language;
  std::optional<std::string> voice;
};
struct ConvertRequest {
  AudioClip content_audio;
  AudioClip reference_audio;
};

AsrRequest parse_asr_request(const json& j);
TranslateRequest parse_translate_request(const json& j);
TtsRequest parse_tts_request(const json& j);
ConvertRequest parse_convert_request(const json& j);
AudioClip parse_embed_request(const json& j);

// Responses.
struct TextResponse {
  std::string text;
  std::optional<double> processing_ms;
};
struct AudioResponse {
  AudioClip audio;
  std::optional<double> processing_ms;
};
struct EmbedResponse {
  SpeakerEmbedding embedding;
  std::optional<double> processing_ms;
};
struct HealthReport {
  std::string status;
  std::vector<std::string> capabilities;
  std::map<std::string, std::string> models;

  bool has(std::string_view capability) const;
};

TextResponse parse_text_response(const json& j);
AudioResponse parse_audio_response(const json& j);
EmbedResponse parse_embed_response(const json& j);
HealthReport parse_health(const json& j);

json text_response(std::string_view text, std::optional<double> processing_ms = {});
json audio_response(const AudioClip& clip);
json embed_response(const SpeakerEmbedding& embedding);
json health_response(const HealthReport& report);
json error_body(std::string_view code, std::string_view message);

}  // namespace cascada::protocol
