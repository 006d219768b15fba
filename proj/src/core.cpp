#include "cascada/core.hpp"

#include <cmath>

namespace cascada {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kFileNotFound: return "file_not_found";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMalformedWav: return "malformed_wav";
    case ErrorCode::kUnsupportedEncoding: return "unsupported_encoding";
    case ErrorCode::kUnsupportedChannels: return "unsupported_channels";
    case ErrorCode::kUnsupportedBitDepth: return "unsupported_bit_depth";
    case ErrorCode::kSampleRate: return "sample_rate";
    case ErrorCode::kSegmentLength: return "segment_length";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kStageFailure: return "stage_failure";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kRemote: return "remote";
    case ErrorCode::kMalformedResponse: return "malformed_response";
  }
  return "unknown";
}

LanguageCode::LanguageCode(std::string_view code) {
  if (code.size() != 2 || code[0] < 'a' || code[0] > 'z' || code[1] < 'a' || code[1] > 'z') {
    throw Error(ErrorCode::kInvalidArgument,
                "language code must be two lowercase ASCII letters, got '" + std::string(code) + "'");
  }
  code_ = std::string(code);
}

void AudioClip::validate() const {
  if (sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "audio clip has no samples");
  }
}

std::string_view to_string(DecodeStrategy strategy) {
  return strategy == DecodeStrategy::kGreedy ? "greedy" : "beam";
}

DecodeStrategy parse_decode_strategy(std::string_view text) {
  if (text == "greedy") return DecodeStrategy::kGreedy;
  if (text == "beam") return DecodeStrategy::kBeam;
  throw Error(ErrorCode::kInvalidArgument, "unknown decode strategy '" + std::string(text) + "'");
}

void DecodeParams::validate() const {
  if (!std::isfinite(temperature) || temperature < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be a finite value >= 0");
  }
  if (strategy == DecodeStrategy::kBeam && beam_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "beam decoding needs beam_size >= 1");
  }
}

void SpeakerEmbedding::validate() const {
  if (vector.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "speaker embedding is empty");
  }
  for (double v : vector) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "speaker embedding has a non-finite component");
    }
  }
}

}  // namespace cascada
