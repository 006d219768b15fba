#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cascada/core.hpp"

namespace cascada {

// RIFF/WAVE, PCM 16-bit mono. The speaker tag travels in LIST/INFO/IART.

AudioClip read_wav(const std::filesystem::path& path);
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

/// In-memory variants used by the wire protocol.
AudioClip decode_wav(std::string_view bytes);
std::string encode_wav(const AudioClip& clip);

}  // namespace cascada
