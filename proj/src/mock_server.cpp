#include "cascada/mock_server.hpp"

#include <chrono>
#include <functional>

#include <httplib.h>

#include "cascada/protocol.hpp"
#include "cascada/rng.hpp"

namespace cascada {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

MockServer::MockServer(MockServerOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  if (!(options_.fail_rate >= 0.0 && options_.fail_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fail rate must lie in [0, 1]");
  }
  if (options_.delay_ms < 0 || options_.fail_first < 0) {
    throw Error(ErrorCode::kInvalidArgument, "delay and fail-first must be >= 0");
  }
  // httplib defaults to SO_REUSEPORT, which lets a second server silently share a busy port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  install_routes();
}

MockServer::~MockServer() { stop(); }

std::string MockServer::url() const { return "http://" + host_ + ":" + std::to_string(port_); }

bool MockServer::inject_fault(uint64_t request_index) const {
  if (request_index < static_cast<uint64_t>(options_.fail_first)) return true;
  if (options_.fail_rate <= 0.0) return false;
  return SplitMix64(options_.fault_seed ^ request_index).next_unit() < options_.fail_rate;
}

void MockServer::install_routes() {
  using Handler = std::function<json(const json&)>;

  // Wraps a stage handler with request counting, faults, delay, body
  // parsing and error mapping.
  auto stage = [this](const std::string& path, Handler handler) {
    server_->Post(path, [this, handler](const httplib::Request& req, httplib::Response& res) {
      const uint64_t index = requests_.fetch_add(1);
      if (options_.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(options_.delay_ms));
      if (inject_fault(index)) {
        reply(res, 503, protocol::error_body("injected_fault", "fault injected by mock server"));
        return;
      }
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        reply(res, 400, protocol::error_body("bad_request", std::string("malformed JSON body: ") + e.what()));
        return;
      }
      try {
        reply(res, 200, handler(body));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kValidation) {
          reply(res, 400, protocol::error_body("bad_request", e.what()));
        } else {
          reply(res, 422, protocol::error_body("unprocessable", e.what()));
        }
      } catch (const std::exception& e) {
        reply(res, 500, protocol::error_body("internal", e.what()));
      }
    });
  };

  stage(std::string(protocol::kAsrPath), [this](const json& body) {
    const auto req = protocol::parse_asr_request(body);
    const auto start = Clock::now();
    std::string text = options_.asr_echo ? *options_.asr_echo : mock::tone_asr(req.audio, req.language, req.decode);
    const double measured = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    json out = protocol::text_response(text, options_.fixed_processing_ms.value_or(measured));
    // Echo the decode parameters so callers can see what reached the model.
    out["decode"] = protocol::decode_to_json(req.decode);
    return out;
  });

  stage(std::string(protocol::kTranslatePath), [this](const json& body) {
    const auto req = protocol::parse_translate_request(body);
    return protocol::text_response(mock::dict_mt(req.text, req.source_lang, req.target_lang, options_.lexicon));
  });

  stage(std::string(protocol::kTtsPath), [](const json& body) {
    const auto req = protocol::parse_tts_request(body);
    return protocol::audio_response(mock::tone_tts(req.text, req.language));
  });

  stage(std::string(protocol::kConvertPath), [](const json& body) {
    const auto req = protocol::parse_convert_request(body);
    return protocol::audio_response(mock::fingerprint_vc(req.content_audio, req.reference_audio));
  });

  stage(std::string(protocol::kEmbedPath), [](const json& body) {
    return protocol::embed_response(mock::hash_embed(protocol::parse_embed_request(body)));
  });

  server_->Get(std::string(protocol::kHealthPath), [](const httplib::Request&, httplib::Response& res) {
    protocol::HealthReport h;
    h.status = "ok";
    h.capabilities = {"asr", "mt", "tts", "vc", "embed"};
    h.models = {{"asr", "mock-tone-asr"},
                {"mt", "mock-dict-mt"},
                {"tts", "mock-tone-tts"},
                {"vc", "mock-fingerprint-vc"},
                {"embed", "mock-hash-embed"}};
    reply(res, 200, protocol::health_response(h));
  });

  server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 404 ? "not_found" : "http_" + std::to_string(res.status);
    reply(res, res.status, protocol::error_body(code, "no route for " + req.method + " " + req.path));
  });
}

int MockServer::start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockServer::run(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  server_->listen_after_bind();
}

void MockServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace cascada
