#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cascada/metrics.hpp"
#include "cascada/mock_backends.hpp"
#include "cascada/rng.hpp"

using namespace cascada;
using namespace cascada::mock;

namespace {

const LanguageCode kEs{"es"};
const LanguageCode kEn{"en"};
const DecodeParams kGreedy{};

std::string random_alphabet_string(SplitMix64& rng, std::size_t len) {
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(kAlphabet[rng.next() % kAlphabet.size()]);
  return s;
}

AudioClip tagged(std::string tag) {
  AudioClip c = tone_tts("x", kEn);
  c.speaker_tag = std::move(tag);
  return c;
}

}  // namespace

TEST_CASE("tone_tts lengths, tag and the 400 Hz base tone") {
  const AudioClip ab = tone_tts("ab", kEs);
  CHECK(ab.samples.size() == 2560);
  CHECK(ab.sample_rate == 16000);
  CHECK(ab.speaker_tag == std::string(kTtsSpeakerTag));

  const AudioClip a = tone_tts("a", kEs);
  REQUIRE(a.samples.size() == kSegmentSamples);
  for (std::size_t n = 0; n < kSegmentSamples; ++n) {
    const auto expected = std::lround(32767.0 * std::sin(2.0 * std::numbers::pi * 400.0 * n / 16000.0));
    REQUIRE(a.samples[n] == expected);
  }
  CHECK(tone_tts("Z", kEs) == tone_tts("z", kEs));
  CHECK(tone_tts("é", kEs) == tone_tts(" ", kEs));
  CHECK_THROWS_AS(tone_tts("", kEs), Error);
  CHECK(symbol_frequency(kAlphabetSlots - 1) < 8000.0);
}

TEST_CASE("tone codec round trip") {
  CHECK(tone_asr(tone_tts("hello world", kEn), kEn, kGreedy) == "hello world");
  CHECK(tone_asr(tone_tts(kAlphabet, kEn), kEn, kGreedy) == kAlphabet);
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string s = random_alphabet_string(rng, 1 + rng.next() % 40);
    REQUIRE(tone_asr(tone_tts(s, kEn), kEn, kGreedy) == s);
  }
}

TEST_CASE("tone_asr rejects foreign audio") {
  AudioClip c = tone_tts("ab", kEn);
  c.sample_rate = 8000;
  try {
    tone_asr(c, kEn, kGreedy);
    FAIL("expected a sample-rate error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSampleRate);
  }
  AudioClip d = tone_tts("ab", kEn);
  d.samples.pop_back();
  try {
    tone_asr(d, kEn, kGreedy);
    FAIL("expected a segment-length error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSegmentLength);
  }
}

TEST_CASE("tone_asr decodes silence to the lowest slot and reserved slots to U+FFFD") {
  AudioClip silence;
  silence.samples.assign(kSegmentSamples, 0);
  CHECK(tone_asr(silence, kEn, kGreedy) == "a");

  AudioClip reserved;
  const double w = 2.0 * std::numbers::pi * symbol_frequency(60) / 16000.0;
  for (std::size_t n = 0; n < kSegmentSamples; ++n) {
    reserved.samples.push_back(static_cast<int16_t>(std::lround(30000.0 * std::sin(w * n))));
  }
  CHECK(tone_asr(reserved, kEn, kGreedy) == "\xEF\xBF\xBD");
}

TEST_CASE("noisy_asr degenerate rates") {
  const AudioClip clip = tone_tts("uno dos  tres", kEs);
  CHECK(noisy_asr(clip, kEs, kGreedy, {0.0, 42}) == tone_asr(clip, kEs, kGreedy));
  CHECK(noisy_asr(clip, kEs, kGreedy, {1.0, 42}) == "xerr xerr  xerr");
  CHECK(noisy_asr(clip, kEs, kGreedy, {0.5, 7}) == noisy_asr(clip, kEs, kGreedy, {0.5, 7}));
  CHECK_THROWS_AS(noisy_asr(clip, kEs, kGreedy, {1.5, 7}), Error);
}

TEST_CASE("noisy_asr corrupted words are nested as p grows") {
  const AudioClip clip = tone_tts("a b c d e f g h i j k l m n o p q r s t", kEn);
  const auto lo = metrics::tokenize(noisy_asr(clip, kEn, kGreedy, {0.2, 5}));
  const auto hi = metrics::tokenize(noisy_asr(clip, kEn, kGreedy, {0.6, 5}));
  REQUIRE(lo.size() == hi.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] == kNoiseMarker) CHECK(hi[i] == kNoiseMarker);
  }
}

TEST_CASE("noisy_asr corpus WER stays within 3 sigma of p as the corpus grows") {
  SplitMix64 rng(3);
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  const double p = 0.1;
  for (std::size_t words = 0; words < 4000;) {
    const std::size_t n = 3 + rng.next() % 6;
    std::string text;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) text += ' ';
      text += "w" + std::to_string(rng.next() % 1000);
    }
    refs.push_back(text);
    hyps.push_back(noisy_asr(tone_tts(text, kEn), kEn, kGreedy, {p, 42}));
    words += n;
  }
  const auto w = metrics::corpus_wer(hyps, refs);
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(w.ref_words));
  CHECK(std::abs(w.wer - p) < 3 * sigma);
  CHECK(w.deletions == 0);
  CHECK(w.insertions == 0);
}

TEST_CASE("lexicon parsing and dict_mt") {
  const Lexicon lex = parse_lexicon("# comment\nhola\thello\n\namigo\tfriend\r\n");
  CHECK(lex.size() == 2);
  CHECK(dict_mt("hola amigo", kEs, kEn, {{"hola", "hello"}}) == "hello amigo");
  CHECK(dict_mt("hola  amigo ", kEs, kEn, lex) == "hello friend");
  CHECK(dict_mt("cualquier texto", kEs, kEn, {}) == "cualquier texto");
  CHECK(dict_mt("", kEs, kEn, lex) == "");
  try {
    parse_lexicon("ok\tfine\nbroken line\n");
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kValidation);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("fingerprint_vc moves the reference tag onto the content") {
  const AudioClip content = tone_tts("hola", kEs);
  const AudioClip out = fingerprint_vc(content, tagged("spk7"));
  CHECK(out.samples == content.samples);
  CHECK(out.speaker_tag == "spk7");
  CHECK(fingerprint_vc(content, content) == content);
  AudioClip untagged = tagged("x");
  untagged.speaker_tag.reset();
  CHECK(fingerprint_vc(content, untagged).speaker_tag == "unknown");
}

TEST_CASE("hash_embed is a unit vector determined by the tag") {
  const auto e1 = hash_embed(tagged("spk1"));
  CHECK(e1.dim() == kEmbeddingDim);
  double norm2 = 0;
  for (double v : e1.vector) norm2 += v * v;
  CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-9);

  AudioClip other = tone_tts("completely different audio", kEn);
  other.speaker_tag = "spk1";
  CHECK(hash_embed(other) == e1);
  CHECK(metrics::cosine_similarity(e1, hash_embed(other)) == 1.0);

  // Frozen from an independent SplitMix64/FNV-1a implementation.
  const double c12 = metrics::cosine_similarity(e1, hash_embed(tagged("spk2")));
  CHECK(c12 == doctest::Approx(-0.009523004604056556).epsilon(1e-12));
  CHECK(std::abs(c12) < 0.5);

  AudioClip untagged = tagged("x");
  untagged.speaker_tag.reset();
  CHECK(hash_embed(untagged) == hash_embed(tagged("unknown")));
}

TEST_CASE("mock backend set") {
  StageBackendSet set = make_mock_backends({{{"hola", "hello"}}, std::nullopt});
  CHECK(set.deterministic);
  CHECK_NOTHROW(set.validate());
  CHECK(set.mt("hola", kEs, kEn).value == "hello");
  CHECK_FALSE(set.mt("hola", kEs, kEn).model_seconds);
  CHECK_THROWS_AS(make_mock_backends({{}, NoiseSpec{-1.0, 0}}), Error);
}
