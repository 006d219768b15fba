#include "cascada/config.hpp"

#include <fstream>
#include <memory>

#include "cascada/mock_backends.hpp"
#include "cascada/remote_backend.hpp"

namespace cascada::config {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kConfig, "config: " + what); }

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("key '") + key + "' has the wrong type");
  }
}

BackendKind parse_kind(const std::string& kind) {
  if (kind == "mock") return BackendKind::kMock;
  if (kind == "remote") return BackendKind::kRemote;
  bad("backend kind must be 'mock' or 'remote', got '" + kind + "'");
}

mock::NoiseSpec parse_noise(const json& j) {
  if (!j.is_object()) bad("noise must be an object");
  mock::NoiseSpec n{get<double>(j, "p", 0.0), get<uint64_t>(j, "seed", 0)};
  try {
    n.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  return n;
}

DecodeParams parse_decode(const json& j, DecodeParams d) {
  d.temperature = get<double>(j, "temperature", d.temperature);
  try {
    d.strategy = parse_decode_strategy(get<std::string>(j, "strategy", std::string(to_string(d.strategy))));
    d.beam_size = get<int>(j, "beam_size", d.strategy == DecodeStrategy::kBeam ? 5 : 0);
    d.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    bad(e.what());
  }
  return d;
}

}  // namespace

AppConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("top level must be an object");
  AppConfig app;
  PipelineConfig& p = app.pipeline;
  p.source_lang = LanguageCode();
  p.target_lang = LanguageCode();
  try {
    if (j.contains("source_lang")) p.source_lang = LanguageCode(get<std::string>(j, "source_lang", ""));
    if (j.contains("target_lang")) p.target_lang = LanguageCode(get<std::string>(j, "target_lang", ""));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    bad(e.what());
  }
  p.preserve_prosody = get<bool>(j, "preserve_prosody", true);
  p.parallelism = get<int>(j, "parallelism", 1);
  if (p.parallelism < 1) bad("parallelism must be >= 1");
  if (j.contains("asr_decode")) p.asr_decode = parse_decode(j.at("asr_decode"), p.asr_decode);

  if (j.contains("backend")) {
    const json& b = j.at("backend");
    if (!b.is_object()) bad("backend must be an object");
    p.backend.kind = parse_kind(get<std::string>(b, "kind", "mock"));
    if (p.backend.kind == BackendKind::kMock) {
      if (b.contains("lexicon")) {
        std::filesystem::path lex = get<std::string>(b, "lexicon", "");
        p.backend.lexicon_path = lex.is_relative() ? base_dir / lex : lex;
      }
      if (b.contains("asr_noise")) p.backend.asr_noise = parse_noise(b.at("asr_noise"));
    } else {
      if (b.contains("urls")) {
        if (!b.at("urls").is_object()) bad("backend.urls must be an object");
        for (const auto& [stage, url] : b.at("urls").items()) {
          if (!url.is_string()) bad("backend.urls." + stage + " must be a string");
          p.backend.urls[stage] = url.get<std::string>();
        }
      }
      if (b.contains("url")) {
        const auto url = get<std::string>(b, "url", "");
        for (const char* stage : {"asr", "mt", "tts", "vc", "embed"}) p.backend.urls.try_emplace(stage, url);
      }
      p.backend.timeout_s = get<double>(b, "timeout_s", 60.0);
      p.backend.retries = get<int>(b, "retries", 2);
      p.backend.backoff_s = get<double>(b, "backoff_s", 0.5);
    }
  }

  if (j.contains("eval_asr")) {
    const json& e = j.at("eval_asr");
    if (!e.is_object()) bad("eval_asr must be an object");
    EvalAsrSpec& s = app.eval_asr;
    s.kind = parse_kind(get<std::string>(e, "kind", "mock"));
    if (e.contains("noise")) s.noise = parse_noise(e.at("noise"));
    s.url = get<std::string>(e, "url", "");
    if (s.kind == BackendKind::kRemote && s.url.empty()) bad("remote eval_asr needs a url");
    s.timeout_s = get<double>(e, "timeout_s", 60.0);
    s.retries = get<int>(e, "retries", 2);
    s.backoff_s = get<double>(e, "backoff_s", 0.5);
    s.decode = parse_decode(e, s.decode);
  }
  return app;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

StageBackendSet build_backends(const PipelineConfig& config, bool verify_health) {
  if (config.backend.kind == BackendKind::kMock) {
    mock::MockOptions options;
    if (config.backend.lexicon_path) options.lexicon = mock::load_lexicon(*config.backend.lexicon_path);
    options.asr_noise = config.backend.asr_noise;
    return mock::make_mock_backends(std::move(options));
  }
  return remote::make_remote_backends(config.backend, config.stages_used(), verify_health);
}

harness::EvalAsr build_eval_asr(const EvalAsrSpec& spec) {
  harness::EvalAsr eval;
  eval.decode = spec.decode;
  if (spec.kind == BackendKind::kMock) {
    eval.deterministic = true;
    if (spec.noise) {
      eval.name = "mock-noisy-asr(p=" + std::to_string(spec.noise->word_error_rate) + ")";
      eval.asr = [noise = *spec.noise](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
        return mock::noisy_asr(c, l, d, noise);
      };
    } else {
      eval.name = "mock-tone-asr";
      eval.asr = [](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
        return mock::tone_asr(c, l, d);
      };
    }
    return eval;
  }
  auto client = std::make_shared<const remote::RemoteClient>(
      remote::RemoteEndpoint{spec.url, spec.timeout_s, spec.retries, spec.backoff_s});
  eval.name = "remote:" + spec.url;
  eval.asr = [client](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
    return client->transcribe(c, l, d);
  };
  return eval;
}

}  // namespace cascada::config
