#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "cascada/backends.hpp"
#include "cascada/core.hpp"

namespace cascada::mock {

// Tone codec: each character becomes one 80 ms sine segment at 16 kHz. The
// alphabet has 64 slots; index i sounds at 400 + 20*i Hz.
inline constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789 .,?!'-:;";
inline constexpr int kAlphabetSlots = 64;
inline constexpr double kBaseFrequencyHz = 400.0;
inline constexpr double kStepHz = 20.0;
inline constexpr int kToneSampleRate = 16000;
inline constexpr std::size_t kSegmentSamples = 1280;  // 0.08 s at 16 kHz
inline constexpr std::string_view kTtsSpeakerTag = "tts-default";
inline constexpr std::string_view kUnknownSpeaker = "unknown";
inline constexpr std::string_view kNoiseMarker = "xerr";
inline constexpr std::size_t kEmbeddingDim = 192;

constexpr double symbol_frequency(int index) { return kBaseFrequencyHz + kStepHz * index; }

/// Index of `c` in the alphabet, or nullopt for characters outside it.
std::optional<int> symbol_index(char32_t c);

struct NoiseSpec {
  double word_error_rate = 0.0;
  uint64_t seed = 0;

  void validate() const;
};

using Lexicon = std::unordered_map<std::string, std::string>;

/// "source<TAB>target" per line, '#' starts a comment line.
Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon parse_lexicon(std::string_view content);

/// Lowercases, maps characters outside the alphabet to space, and renders
/// one tone segment per character. Empty text is a precondition error.
AudioClip tone_tts(std::string_view text, const LanguageCode& lang);

/// Goertzel argmax over the 64 slot frequencies, one decision per segment.
/// Reserved slots decode to U+FFFD.
std::string tone_asr(const AudioClip& clip, const LanguageCode& lang, const DecodeParams& decode);

/// tone_asr, then each space-separated word is replaced by "xerr" with
/// probability p. Word i of a transcript draws from SplitMix64 seeded with
/// (seed ^ fnv1a64(clean transcript)) ^ i, so the outcome is fixed per clip.
std::string noisy_asr(const AudioClip& clip, const LanguageCode& lang, const DecodeParams& decode,
                      const NoiseSpec& spec);

/// Word-by-word lexicon lookup; unknown words pass through.
std::string dict_mt(std::string_view text, const LanguageCode& src, const LanguageCode& tgt,
                    const Lexicon& lexicon);

/// Samples of `content` carrying the speaker tag of `reference`.
AudioClip fingerprint_vc(const AudioClip& content, const AudioClip& reference);

/// Unit vector drawn from SplitMix64 seeded by the FNV-1a hash of the tag.
SpeakerEmbedding hash_embed(const AudioClip& clip);

struct MockOptions {
  Lexicon lexicon;
  std::optional<NoiseSpec> asr_noise;
};

StageBackendSet make_mock_backends(MockOptions options = {});

}  // namespace cascada::mock
