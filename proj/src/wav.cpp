#include "cascada/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

namespace cascada {
namespace {

constexpr uint16_t kFormatPcm = 1;

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

uint16_t get_u16(std::string_view in, std::size_t at) {
  return static_cast<uint16_t>(static_cast<unsigned char>(in[at]) |
                               (static_cast<unsigned char>(in[at + 1]) << 8));
}

uint32_t get_u32(std::string_view in, std::size_t at) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(in[at + i]);
  }
  return v;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedWav, "malformed WAV: " + what);
}

std::optional<std::string> parse_info_artist(std::string_view list) {
  if (list.size() < 4 || list.substr(0, 4) != "INFO") return std::nullopt;
  std::size_t pos = 4;
  while (pos + 8 <= list.size()) {
    std::string_view id = list.substr(pos, 4);
    uint32_t size = get_u32(list, pos + 4);
    pos += 8;
    if (size > list.size() - pos) malformed("INFO sub-chunk overruns LIST chunk");
    if (id == "IART") {
      std::string value(list.substr(pos, size));
      while (!value.empty() && value.back() == '\0') value.pop_back();
      return value;
    }
    pos += size + (size & 1u);
  }
  return std::nullopt;
}

}  // namespace

AudioClip decode_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    malformed("missing RIFF/WAVE header");
  }

  bool have_fmt = false;
  bool have_data = false;
  AudioClip clip;
  std::string_view data;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    std::string_view id = bytes.substr(pos, 4);
    uint32_t size = get_u32(bytes, pos + 4);
    pos += 8;
    if (size > bytes.size() - pos) malformed("chunk '" + std::string(id) + "' overruns file");
    std::string_view body = bytes.substr(pos, size);

    if (id == "fmt ") {
      if (size < 16) malformed("fmt chunk too short");
      uint16_t format = get_u16(body, 0);
      uint16_t channels = get_u16(body, 2);
      uint32_t rate = get_u32(body, 4);
      uint16_t bits = get_u16(body, 14);
      if (format != kFormatPcm) {
        throw Error(ErrorCode::kUnsupportedEncoding,
                    "unsupported WAV encoding (audio format " + std::to_string(format) + ", need PCM)");
      }
      if (channels != 1) {
        throw Error(ErrorCode::kUnsupportedChannels,
                    "unsupported channel count " + std::to_string(channels) + " (need mono)");
      }
      if (bits != 16) {
        throw Error(ErrorCode::kUnsupportedBitDepth,
                    "unsupported bit depth " + std::to_string(bits) + " (need 16)");
      }
      if (rate == 0 || rate > static_cast<uint32_t>(INT32_MAX)) malformed("bad sample rate");
      clip.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      data = body;
      have_data = true;
    } else if (id == "LIST") {
      if (auto tag = parse_info_artist(body)) clip.speaker_tag = std::move(*tag);
    }
    pos += size + (size & 1u);
  }

  if (!have_fmt) malformed("no fmt chunk");
  if (!have_data) malformed("no data chunk");
  if (data.size() % 2 != 0) malformed("odd data length for 16-bit samples");

  clip.samples.resize(data.size() / 2);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = static_cast<int16_t>(get_u16(data, 2 * i));
  }
  return clip;
}

std::string encode_wav(const AudioClip& clip) {
  clip.validate();
  const auto data_bytes = static_cast<uint32_t>(clip.samples.size() * 2);

  std::string list;
  if (clip.speaker_tag) {
    std::string value = *clip.speaker_tag;
    value.push_back('\0');
    const auto value_size = static_cast<uint32_t>(value.size());
    if (value.size() & 1u) value.push_back('\0');
    list += "INFO";
    list += "IART";
    put_u32(list, value_size);
    list += value;
  }

  std::string out;
  out.reserve(44 + data_bytes + (list.empty() ? 0 : 8 + list.size()));
  out += "RIFF";
  put_u32(out, static_cast<uint32_t>(36 + data_bytes + (list.empty() ? 0 : 8 + list.size())));
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (int16_t s : clip.samples) put_u16(out, static_cast<uint16_t>(s));
  if (!list.empty()) {
    out += "LIST";
    put_u32(out, static_cast<uint32_t>(list.size()));
    out += list;
  }
  return out;
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such audio file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  std::string bytes = encode_wav(clip);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace cascada
