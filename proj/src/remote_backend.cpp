#include "cascada/remote_backend.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <thread>

#include <httplib.h>

namespace cascada::remote {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

bool is_timeout(httplib::Error err, double elapsed_s, double timeout_s) {
  if (err == httplib::Error::ConnectionTimeout) return true;
  return err == httplib::Error::Read && elapsed_s >= 0.95 * timeout_s;
}

template <typename Parse>
auto parse_or_throw(const json& body, std::string_view path, Parse&& parse) {
  try {
    return parse(body);
  } catch (const Error& e) {
    throw RemoteError(ErrorCode::kMalformedResponse,
                      "malformed response from " + std::string(path) + ": " + e.what(), 1);
  }
}

std::optional<double> ms_to_s(std::optional<double> ms) {
  if (!ms) return std::nullopt;
  return *ms / 1000.0;
}

}  // namespace

RemoteClient::RemoteClient(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.base_url.empty()) throw Error(ErrorCode::kConfig, "remote endpoint has no base URL");
  if (!(endpoint_.timeout_s > 0)) throw Error(ErrorCode::kConfig, "remote timeout must be positive");
  if (endpoint_.retries < 0) throw Error(ErrorCode::kConfig, "remote retries must be >= 0");
}

json RemoteClient::call(const char* method, std::string_view path, const json* body) const {
  const auto timeout = std::chrono::duration<double>(endpoint_.timeout_s);
  const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  const std::string payload = body ? body->dump() : std::string();

  ErrorCode last_code = ErrorCode::kTransport;
  std::string last_message;
  int last_status = 0;
  std::string last_remote_code;
  const int max_attempts = endpoint_.retries + 1;

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (attempt > 0) {
      const double delay = endpoint_.backoff_s * std::ldexp(1.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }

    httplib::Client client(endpoint_.base_url);
    client.set_connection_timeout(timeout_us);
    client.set_read_timeout(timeout_us);
    client.set_write_timeout(timeout_us);

    const auto start = Clock::now();
    httplib::Result res = std::string_view(method) == "GET"
                              ? client.Get(std::string(path))
                              : client.Post(std::string(path), payload, "application/json");
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();

    if (!res) {
      const auto err = res.error();
      last_code = is_timeout(err, elapsed, endpoint_.timeout_s) ? ErrorCode::kTimeout : ErrorCode::kTransport;
      last_message = std::string(path) + ": " + httplib::to_string(err);
      last_status = 0;
      last_remote_code.clear();
      continue;
    }

    const int status = res->status;
    if (status >= 200 && status < 300) {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw RemoteError(ErrorCode::kMalformedResponse,
                          std::string(path) + ": response is not JSON: " + e.what(), attempt + 1, status);
      }
    }

    std::string code = "http_" + std::to_string(status);
    std::string message = res->body;
    try {
      const json err = json::parse(res->body);
      code = err.at("error").at("code").get<std::string>();
      message = err.at("error").at("message").get<std::string>();
    } catch (const std::exception&) {
      // not a protocol error payload; keep the raw body
    }

    if (status >= 400 && status < 500) {
      throw RemoteError(ErrorCode::kRemote,
                        std::string(path) + ": server rejected request (" + std::to_string(status) + " " + code +
                            "): " + message,
                        attempt + 1, status, code);
    }
    last_code = ErrorCode::kRemote;
    last_status = status;
    last_remote_code = code;
    last_message = std::string(path) + ": server error (" + std::to_string(status) + " " + code + "): " + message;
  }

  throw RemoteError(last_code, last_message + " [gave up after " + std::to_string(max_attempts) + " attempts]",
                    max_attempts, last_status, last_remote_code);
}

StageReply<std::string> RemoteClient::transcribe(const AudioClip& clip, const LanguageCode& lang,
                                                 const DecodeParams& decode) const {
  const json req = protocol::asr_request(clip, lang, decode);
  auto r = parse_or_throw(call("POST", protocol::kAsrPath, &req), protocol::kAsrPath, protocol::parse_text_response);
  return {std::move(r.text), ms_to_s(r.processing_ms)};
}

StageReply<std::string> RemoteClient::translate(std::string_view text, const LanguageCode& src,
                                                const LanguageCode& tgt) const {
  const json req = protocol::translate_request(text, src, tgt);
  auto r = parse_or_throw(call("POST", protocol::kTranslatePath, &req), protocol::kTranslatePath,
                          protocol::parse_text_response);
  return {std::move(r.text), ms_to_s(r.processing_ms)};
}

StageReply<AudioClip> RemoteClient::synthesize(std::string_view text, const LanguageCode& lang) const {
  const json req = protocol::tts_request(text, lang);
  auto r = parse_or_throw(call("POST", protocol::kTtsPath, &req), protocol::kTtsPath, protocol::parse_audio_response);
  return {std::move(r.audio), ms_to_s(r.processing_ms)};
}

StageReply<AudioClip> RemoteClient::convert(const AudioClip& content, const AudioClip& reference) const {
  const json req = protocol::convert_request(content, reference);
  auto r = parse_or_throw(call("POST", protocol::kConvertPath, &req), protocol::kConvertPath,
                          protocol::parse_audio_response);
  return {std::move(r.audio), ms_to_s(r.processing_ms)};
}

StageReply<SpeakerEmbedding> RemoteClient::embed(const AudioClip& clip) const {
  const json req = protocol::embed_request(clip);
  auto r = parse_or_throw(call("POST", protocol::kEmbedPath, &req), protocol::kEmbedPath,
                          protocol::parse_embed_response);
  return {std::move(r.embedding), ms_to_s(r.processing_ms)};
}

protocol::HealthReport RemoteClient::health() const {
  return parse_or_throw(call("GET", protocol::kHealthPath, nullptr), protocol::kHealthPath, protocol::parse_health);
}

StageBackendSet make_remote_backends(const BackendSelection& selection, const std::vector<std::string>& required_stages,
                                     bool verify_health) {
  std::map<std::string, std::shared_ptr<const RemoteClient>> by_url;
  std::map<std::string, std::shared_ptr<const RemoteClient>> by_stage;
  for (const auto& [stage, url] : selection.urls) {
    if (url.empty()) continue;
    auto& client = by_url[url];
    if (!client) {
      client = std::make_shared<const RemoteClient>(
          RemoteEndpoint{url, selection.timeout_s, selection.retries, selection.backoff_s});
    }
    by_stage[stage] = client;
  }

  for (const auto& stage : required_stages) {
    if (!by_stage.contains(stage)) throw Error(ErrorCode::kConfig, "no remote URL configured for stage '" + stage + "'");
  }

  if (verify_health) {
    std::map<const RemoteClient*, protocol::HealthReport> reports;
    for (const auto& stage : required_stages) {
      const auto& client = by_stage.at(stage);
      auto it = reports.find(client.get());
      if (it == reports.end()) it = reports.emplace(client.get(), client->health()).first;
      if (!it->second.has(stage)) {
        throw Error(ErrorCode::kConfig, "server " + client->endpoint().base_url + " does not offer capability '" +
                                            stage + "'");
      }
    }
  }

  auto client_for = [by_stage](const std::string& stage) -> std::shared_ptr<const RemoteClient> {
    auto it = by_stage.find(stage);
    if (it == by_stage.end()) throw Error(ErrorCode::kConfig, "no remote URL configured for stage '" + stage + "'");
    return it->second;
  };

  StageBackendSet set;
  set.name = "remote";
  set.deterministic = false;
  set.asr = [client_for](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
    return client_for("asr")->transcribe(c, l, d);
  };
  set.mt = [client_for](std::string_view t, const LanguageCode& s, const LanguageCode& g) {
    return client_for("mt")->translate(t, s, g);
  };
  set.tts = [client_for](std::string_view t, const LanguageCode& l) { return client_for("tts")->synthesize(t, l); };
  set.vc = [client_for](const AudioClip& c, const AudioClip& r) { return client_for("vc")->convert(c, r); };
  set.embed = [client_for](const AudioClip& c) { return client_for("embed")->embed(c); };
  return set;
}

}  // namespace cascada::remote
