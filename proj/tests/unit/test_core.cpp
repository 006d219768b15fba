#include <doctest.h>

#include <functional>
#include <random>

#include "cascada/base64.hpp"
#include "cascada/core.hpp"
#include "cascada/rng.hpp"
#include "cascada/text.hpp"
#include "cascada/wav.hpp"
#include "test_support.hpp"

using namespace cascada;

namespace {

void put_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}
void put_u32(std::string& s, uint32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

// Hand-built header so the reader is not only tested against the writer.
std::string raw_wav(uint16_t format, uint16_t channels, uint32_t rate, uint16_t bits, const std::string& data) {
  std::string s = "RIFF";
  put_u32(s, static_cast<uint32_t>(36 + data.size()));
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, format);
  put_u16(s, channels);
  put_u32(s, rate);
  put_u32(s, rate * channels * bits / 8);
  put_u16(s, static_cast<uint16_t>(channels * bits / 8));
  put_u16(s, bits);
  s += "data";
  put_u32(s, static_cast<uint32_t>(data.size()));
  return s + data;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("language codes") {
  CHECK(LanguageCode("es").str() == "es");
  CHECK_FALSE(LanguageCode().valid());
  CHECK(code_of([] { LanguageCode("ES"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { LanguageCode("eng"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { LanguageCode(""); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("decode params") {
  DecodeParams d;
  CHECK(d.temperature == 1.0);
  CHECK(d.strategy == DecodeStrategy::kGreedy);
  CHECK_NOTHROW(d.validate());
  d.strategy = DecodeStrategy::kBeam;
  CHECK_THROWS_AS(d.validate(), Error);
  d.beam_size = 4;
  CHECK_NOTHROW(d.validate());
  d.temperature = -0.1;
  CHECK_THROWS_AS(d.validate(), Error);
  CHECK(parse_decode_strategy("beam") == DecodeStrategy::kBeam);
  CHECK_THROWS_AS(parse_decode_strategy("sample"), Error);
}

TEST_CASE("wav: 100 samples at 8 kHz is a 244-byte canonical file") {
  testing::TempDir dir;
  AudioClip clip;
  clip.sample_rate = 8000;
  for (int i = 0; i < 100; ++i) clip.samples.push_back(static_cast<int16_t>(i * 300 - 15000));
  write_wav(clip, dir / "a.wav");
  CHECK(std::filesystem::file_size(dir / "a.wav") == 244);
  const AudioClip back = read_wav(dir / "a.wav");
  CHECK(back == clip);
  CHECK(back.duration_s() == doctest::Approx(0.0125));
}

TEST_CASE("wav: round trip is exact for random clips, with and without a speaker tag") {
  std::mt19937 gen(7);
  std::uniform_int_distribution<int> sample(-32768, 32767);
  std::uniform_int_distribution<int> length(1, 3000);
  for (int trial = 0; trial < 50; ++trial) {
    AudioClip clip;
    clip.sample_rate = trial % 2 ? 16000 : 22050;
    clip.samples.resize(static_cast<std::size_t>(length(gen)));
    for (auto& s : clip.samples) s = static_cast<int16_t>(sample(gen));
    if (trial % 3 == 0) clip.speaker_tag = "spk" + std::to_string(trial);
    if (trial % 5 == 0) clip.speaker_tag = "odd";  // odd-length tag exercises padding
    CHECK(decode_wav(encode_wav(clip)) == clip);
  }
}

TEST_CASE("wav: the reader matches a hand-built header") {
  std::string data;
  put_u16(data, 1);
  put_u16(data, static_cast<uint16_t>(-2));
  const AudioClip clip = decode_wav(raw_wav(1, 1, 16000, 16, data));
  CHECK(clip.sample_rate == 16000);
  REQUIRE(clip.samples.size() == 2);
  CHECK(clip.samples[0] == 1);
  CHECK(clip.samples[1] == -2);
  CHECK_FALSE(clip.speaker_tag);
}

TEST_CASE("wav: unsupported formats get distinct errors") {
  const std::string four(4, '\0');
  CHECK(code_of([&] { decode_wav(raw_wav(1, 2, 16000, 16, four)); }) == ErrorCode::kUnsupportedChannels);
  CHECK(code_of([&] { decode_wav(raw_wav(3, 1, 16000, 32, four)); }) == ErrorCode::kUnsupportedEncoding);
  CHECK(code_of([&] { decode_wav(raw_wav(1, 1, 16000, 8, four)); }) == ErrorCode::kUnsupportedBitDepth);
  CHECK(code_of([&] { decode_wav("not a wav file at all"); }) == ErrorCode::kMalformedWav);
  std::string truncated = raw_wav(1, 1, 16000, 16, four);
  truncated.resize(truncated.size() - 2);
  CHECK(code_of([&] { decode_wav(truncated); }) == ErrorCode::kMalformedWav);
  CHECK(code_of([] { read_wav("/nonexistent/x.wav"); }) == ErrorCode::kFileNotFound);
}

TEST_CASE("wav: an empty data chunk reads back as an empty clip that stages reject") {
  const AudioClip clip = decode_wav(raw_wav(1, 1, 16000, 16, ""));
  CHECK(clip.samples.empty());
  CHECK(code_of([&] { clip.validate(); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { encode_wav(clip); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("splitmix64 and fnv1a64 reference values") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafULL);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("spk1") == 0x8b926d19094e9fe2ULL);
  SplitMix64 u(123);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next_unit();
    CHECK((x >= 0.0 && x < 1.0));
  }
}

TEST_CASE("utf8 and lowercase") {
  CHECK(text::to_lower("ÁRBOL Niño ÇA") == "árbol niño ça");
  CHECK(text::encode_utf8(text::decode_utf8("añb€😀")) == "añb€😀");
  const auto bad = text::decode_utf8(std::string("a\xff") + "b");
  REQUIRE(bad.size() == 3);
  CHECK(bad[1] == U'\uFFFD');
  CHECK(text::split_whitespace("  a \t b\nc  ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(text::join({"a", "b"}, " ") == "a b");
}

TEST_CASE("base64") {
  CHECK(base64::encode("") == "");
  CHECK(base64::encode("f") == "Zg==");
  CHECK(base64::encode("fo") == "Zm8=");
  CHECK(base64::encode("foobar") == "Zm9vYmFy");
  CHECK(base64::decode("Zm9vYg==") == "foob");
  std::string all;
  for (int i = 0; i < 256; ++i) all.push_back(static_cast<char>(i));
  CHECK(base64::decode(base64::encode(all)) == all);
  CHECK(code_of([] { base64::decode("Zm9v!"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { base64::decode("Zm9"); }) == ErrorCode::kInvalidArgument);
}
