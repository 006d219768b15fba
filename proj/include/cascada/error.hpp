#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace cascada {

enum class ErrorCode {
  kInvalidArgument,
  kFileNotFound,
  kIo,
  kMalformedWav,
  kUnsupportedEncoding,   // WAV audio-format other than PCM
  kUnsupportedChannels,   // anything but mono
  kUnsupportedBitDepth,   // anything but 16-bit
  kSampleRate,
  kSegmentLength,
  kValidation,
  kConfig,
  kStageFailure,
  kTransport,
  kTimeout,
  kRemote,
  kMalformedResponse,
};

std::string_view to_string(ErrorCode code);

/// Base exception for everything thrown by the library. The code lets
/// callers branch on the failure class without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A backend call failed inside the cascade. Carries the stage name
/// ("asr", "mt", "tts", "vc", "embed") and the original error code.
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorCode cause, const std::string& message)
      : Error(ErrorCode::kStageFailure, stage + ": " + message),
        stage_(std::move(stage)),
        cause_(cause) {}

  const std::string& stage() const noexcept { return stage_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  ErrorCode cause_;
};

}  // namespace cascada
