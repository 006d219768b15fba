#include "cascada/protocol.hpp"

#include <algorithm>

#include "cascada/base64.hpp"
#include "cascada/wav.hpp"

namespace cascada::protocol {
namespace {

// Field access that reports protocol violations as kValidation so the
// server can map them to 400 and the client to kMalformedResponse.
const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorCode::kValidation, std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

std::string string_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_string()) throw Error(ErrorCode::kValidation, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

LanguageCode lang_field(const json& j, const char* name) {
  try {
    return LanguageCode(string_field(j, name));
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, std::string("field '") + name + "': " + e.what());
  }
}

AudioClip audio_field(const json& j, const char* name) {
  try {
    return audio_from_b64(string_field(j, name));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidation) throw;
    throw Error(ErrorCode::kValidation, std::string("field '") + name + "': " + e.what());
  }
}

std::optional<double> processing_ms_of(const json& j) {
  if (!j.is_object() || !j.contains("processing_ms") || j.at("processing_ms").is_null()) return std::nullopt;
  if (!j.at("processing_ms").is_number()) {
    throw Error(ErrorCode::kValidation, "field 'processing_ms' must be a number");
  }
  return j.at("processing_ms").get<double>();
}

}  // namespace

std::string audio_to_b64(const AudioClip& clip) { return base64::encode(encode_wav(clip)); }

AudioClip audio_from_b64(std::string_view b64) { return decode_wav(base64::decode(b64)); }

json decode_to_json(const DecodeParams& decode) {
  json j = {{"temperature", decode.temperature}, {"strategy", to_string(decode.strategy)}};
  if (decode.strategy == DecodeStrategy::kBeam) j["beam_size"] = decode.beam_size;
  return j;
}

DecodeParams decode_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "decode must be an object");
  DecodeParams d;
  if (j.contains("temperature")) {
    if (!j.at("temperature").is_number()) throw Error(ErrorCode::kValidation, "temperature must be a number");
    d.temperature = j.at("temperature").get<double>();
  }
  if (j.contains("strategy")) {
    try {
      d.strategy = parse_decode_strategy(string_field(j, "strategy"));
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, e.what());
    }
  }
  if (d.strategy == DecodeStrategy::kBeam) {
    const json& b = field(j, "beam_size");
    if (!b.is_number_integer()) throw Error(ErrorCode::kValidation, "beam_size must be an integer");
    d.beam_size = b.get<int>();
  }
  try {
    d.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, e.what());
  }
  return d;
}

json asr_request(const AudioClip& clip, const LanguageCode& lang, const DecodeParams& decode) {
  return {{"audio", audio_to_b64(clip)}, {"language", lang.str()}, {"decode", decode_to_json(decode)}};
}

json translate_request(std::string_view text, const LanguageCode& src, const LanguageCode& tgt) {
  return {{"text", text}, {"source_lang", src.str()}, {"target_lang", tgt.str()}};
}

json tts_request(std::string_view text, const LanguageCode& lang, const std::optional<std::string>& voice) {
  json j = {{"text", text}, {"language", lang.str()}};
  if (voice) j["voice"] = *voice;
  return j;
}

json convert_request(const AudioClip& content, const AudioClip& reference) {
  return {{"content_audio", audio_to_b64(content)}, {"reference_audio", audio_to_b64(reference)}};
}

json embed_request(const AudioClip& clip) { return {{"audio", audio_to_b64(clip)}}; }

AsrRequest parse_asr_request(const json& j) {
  AsrRequest r{audio_field(j, "audio"), lang_field(j, "language"), DecodeParams{}};
  if (j.contains("decode")) r.decode = decode_from_json(j.at("decode"));
  return r;
}

TranslateRequest parse_translate_request(const json& j) {
  return {string_field(j, "text"), lang_field(j, "source_lang"), lang_field(j, "target_lang")};
}

TtsRequest parse_tts_request(const json& j) {
  TtsRequest r{string_field(j, "text"), lang_field(j, "language"), std::nullopt};
  if (j.contains("voice") && !j.at("voice").is_null()) r.voice = string_field(j, "voice");
  return r;
}

ConvertRequest parse_convert_request(const json& j) {
  return {audio_field(j, "content_audio"), audio_field(j, "reference_audio")};
}

AudioClip parse_embed_request(const json& j) { return audio_field(j, "audio"); }

bool HealthReport::has(std::string_view capability) const {
  return std::find(capabilities.begin(), capabilities.end(), capability) != capabilities.end();
}

TextResponse parse_text_response(const json& j) { return {string_field(j, "text"), processing_ms_of(j)}; }

AudioResponse parse_audio_response(const json& j) { return {audio_field(j, "audio"), processing_ms_of(j)}; }

EmbedResponse parse_embed_response(const json& j) {
  const json& arr = field(j, "embedding");
  if (!arr.is_array()) throw Error(ErrorCode::kValidation, "embedding must be an array");
  SpeakerEmbedding e;
  e.vector.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw Error(ErrorCode::kValidation, "embedding entries must be numbers");
    e.vector.push_back(v.get<double>());
  }
  try {
    e.validate();
  } catch (const Error& err) {
    throw Error(ErrorCode::kValidation, err.what());
  }
  return {std::move(e), processing_ms_of(j)};
}

HealthReport parse_health(const json& j) {
  HealthReport h;
  h.status = string_field(j, "status");
  const json& caps = field(j, "capabilities");
  if (!caps.is_array()) throw Error(ErrorCode::kValidation, "capabilities must be an array");
  for (const auto& c : caps) {
    if (!c.is_string()) throw Error(ErrorCode::kValidation, "capabilities must be strings");
    h.capabilities.push_back(c.get<std::string>());
  }
  if (j.contains("models")) {
    const json& models = j.at("models");
    if (!models.is_object()) throw Error(ErrorCode::kValidation, "models must be an object");
    for (const auto& [stage, name] : models.items()) {
      if (!name.is_string()) throw Error(ErrorCode::kValidation, "model names must be strings");
      h.models[stage] = name.get<std::string>();
    }
  }
  return h;
}

json text_response(std::string_view text, std::optional<double> processing_ms) {
  json j = {{"text", text}};
  if (processing_ms) j["processing_ms"] = *processing_ms;
  return j;
}

json audio_response(const AudioClip& clip) { return {{"audio", audio_to_b64(clip)}}; }

json embed_response(const SpeakerEmbedding& embedding) { return {{"embedding", embedding.vector}}; }

json health_response(const HealthReport& report) {
  return {{"status", report.status}, {"capabilities", report.capabilities}, {"models", report.models}};
}

json error_body(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace cascada::protocol
