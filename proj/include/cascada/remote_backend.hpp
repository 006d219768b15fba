#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cascada/backends.hpp"
#include "cascada/pipeline.hpp"
#include "cascada/protocol.hpp"

namespace cascada::remote {

struct RemoteEndpoint {
  std::string base_url;  // scheme://host:port
  double timeout_s = 60.0;
  // Extra attempts after the first, on transport errors and 5xx only.
  int retries = 2;
  // Sleep before retry k (0-based) is backoff_s * 2^k.
  double backoff_s = 0.5;
};

/// Failure talking to a model server. code() is kTransport, kTimeout,
/// kRemote (server error payload) or kMalformedResponse.
class RemoteError : public Error {
 public:
  RemoteError(ErrorCode code, const std::string& message, int attempts, int http_status = 0,
              std::string remote_code = {})
      : Error(code, message), attempts_(attempts), http_status_(http_status), remote_code_(std::move(remote_code)) {}

  /// Requests sent, including the first.
  int attempts() const noexcept { return attempts_; }
  int http_status() const noexcept { return http_status_; }
  const std::string& remote_code() const noexcept { return remote_code_; }

 private:
  int attempts_;
  int http_status_;
  std::string remote_code_;
};

/// Stateless client; each call opens its own connection so one instance may
/// be shared across threads.
class RemoteClient {
 public:
  explicit RemoteClient(RemoteEndpoint endpoint);

  StageReply<std::string> transcribe(const AudioClip& clip, const LanguageCode& lang, const DecodeParams& decode) const;
  StageReply<std::string> translate(std::string_view text, const LanguageCode& src, const LanguageCode& tgt) const;
  StageReply<AudioClip> synthesize(std::string_view text, const LanguageCode& lang) const;
  StageReply<AudioClip> convert(const AudioClip& content, const AudioClip& reference) const;
  StageReply<SpeakerEmbedding> embed(const AudioClip& clip) const;
  protocol::HealthReport health() const;

  const RemoteEndpoint& endpoint() const noexcept { return endpoint_; }

 private:
  nlohmann::json call(const char* method, std::string_view path, const nlohmann::json* body) const;

  RemoteEndpoint endpoint_;
};

inline protocol::HealthReport health_check(const RemoteEndpoint& endpoint) { return RemoteClient(endpoint).health(); }

/// Builds a backend set over per-stage URLs. Stages without a URL throw
/// kConfig when called. With verify_health, each distinct server is asked
/// for its capabilities and a stage the config needs but the server lacks
/// is a kConfig error here, before any work starts.
StageBackendSet make_remote_backends(const BackendSelection& selection,
                                     const std::vector<std::string>& required_stages, bool verify_health = true);

}  // namespace cascada::remote
