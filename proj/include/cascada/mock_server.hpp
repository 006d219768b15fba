#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "cascada/mock_backends.hpp"

namespace httplib {
class Server;
}

namespace cascada {

struct MockServerOptions {
  mock::Lexicon lexicon;
  // Fraction of stage requests answered with 503 "injected_fault". The
  // decision for request k draws from SplitMix64(fault_seed ^ k).
  double fail_rate = 0.0;
  // The first N stage requests fail regardless of fail_rate.
  int fail_first = 0;
  uint64_t fault_seed = 0;
  // Sleep before answering each stage request.
  int delay_ms = 0;
  // When set, /v1/asr answers this text for any clip.
  std::optional<std::string> asr_echo;
  // When set, reported in place of the measured processing_ms.
  std::optional<double> fixed_processing_ms;
};

/// The full wire protocol over the mock backends. /v1/health is exempt
/// from fault injection and delay.
class MockServer {
 public:
  explicit MockServer(MockServerOptions options = {});
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Binds and serves on a background thread. port 0 picks a free port.
  /// Returns the bound port; throws kIo when the port is taken.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

  int port() const noexcept { return port_; }
  std::string url() const;
  /// Stage requests received (health excluded).
  uint64_t request_count() const noexcept { return requests_.load(); }
  void reset_request_count() noexcept { requests_.store(0); }

 private:
  void install_routes();
  bool inject_fault(uint64_t request_index) const;

  MockServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
  std::atomic<uint64_t> requests_{0};
};

}  // namespace cascada
