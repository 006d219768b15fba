#include "cascada/mock_backends.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <memory>
#include <numbers>
#include <vector>

#include "cascada/rng.hpp"
#include "cascada/text.hpp"

namespace cascada::mock {
namespace {

using Segment = std::array<int16_t, kSegmentSamples>;

const std::array<Segment, kAlphabetSlots>& tone_table() {
  static const auto table = [] {
    auto t = std::make_unique<std::array<Segment, kAlphabetSlots>>();
    for (int i = 0; i < kAlphabetSlots; ++i) {
      const double w = 2.0 * std::numbers::pi * symbol_frequency(i) / kToneSampleRate;
      for (std::size_t n = 0; n < kSegmentSamples; ++n) {
        (*t)[i][n] = static_cast<int16_t>(std::lround(32767.0 * std::sin(w * static_cast<double>(n))));
      }
    }
    return t;
  }();
  return *table;
}

const std::array<double, kAlphabetSlots>& goertzel_coefficients() {
  static const auto coeffs = [] {
    std::array<double, kAlphabetSlots> c{};
    for (int i = 0; i < kAlphabetSlots; ++i) {
      c[i] = 2.0 * std::cos(2.0 * std::numbers::pi * symbol_frequency(i) / kToneSampleRate);
    }
    return c;
  }();
  return coeffs;
}

// All 64 Goertzel filters advance together so the inner loop vectorizes.
std::array<double, kAlphabetSlots> goertzel_powers(const int16_t* x, std::size_t n) {
  const auto& coeff = goertzel_coefficients();
  std::array<double, kAlphabetSlots> s1{};
  std::array<double, kAlphabetSlots> s2{};
  for (std::size_t k = 0; k < n; ++k) {
    const double xk = x[k];
    for (int i = 0; i < kAlphabetSlots; ++i) {
      const double s0 = xk + coeff[i] * s1[i] - s2[i];
      s2[i] = s1[i];
      s1[i] = s0;
    }
  }
  std::array<double, kAlphabetSlots> power{};
  for (int i = 0; i < kAlphabetSlots; ++i) power[i] = s1[i] * s1[i] + s2[i] * s2[i] - coeff[i] * s1[i] * s2[i];
  return power;
}

std::string transcript_for_slot(int slot) {
  if (slot < static_cast<int>(kAlphabet.size())) return std::string(1, kAlphabet[slot]);
  return text::encode_utf8(U"\uFFFD");
}

}  // namespace

std::optional<int> symbol_index(char32_t c) {
  if (c >= 0x80) return std::nullopt;
  auto pos = kAlphabet.find(static_cast<char>(c));
  if (pos == std::string_view::npos) return std::nullopt;
  return static_cast<int>(pos);
}

void NoiseSpec::validate() const {
  if (!(word_error_rate >= 0.0 && word_error_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise word_error_rate must lie in [0, 1]");
  }
}

Lexicon parse_lexicon(std::string_view content) {
  Lexicon lexicon;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(ErrorCode::kValidation,
                  "lexicon line " + std::to_string(line_no) + ": expected 'source<TAB>target'");
    }
    lexicon.insert_or_assign(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  }
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read lexicon " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_lexicon(content);
}

AudioClip tone_tts(std::string_view text, const LanguageCode& /*lang*/) {
  if (text.empty()) throw Error(ErrorCode::kInvalidArgument, "tone_tts: empty text");
  const std::u32string cps = text::decode_utf8(text);
  const auto space = *symbol_index(U' ');
  const auto& table = tone_table();

  AudioClip clip;
  clip.sample_rate = kToneSampleRate;
  clip.speaker_tag = std::string(kTtsSpeakerTag);
  clip.samples.reserve(cps.size() * kSegmentSamples);
  for (char32_t c : cps) {
    const int slot = symbol_index(text::to_lower(c)).value_or(space);
    clip.samples.insert(clip.samples.end(), table[slot].begin(), table[slot].end());
  }
  return clip;
}

std::string tone_asr(const AudioClip& clip, const LanguageCode& /*lang*/, const DecodeParams& /*decode*/) {
  clip.validate();
  if (clip.sample_rate != kToneSampleRate) {
    throw Error(ErrorCode::kSampleRate, "tone_asr needs 16000 Hz audio, got " +
                                            std::to_string(clip.sample_rate));
  }
  if (clip.samples.size() % kSegmentSamples != 0) {
    throw Error(ErrorCode::kSegmentLength, "tone_asr: " + std::to_string(clip.samples.size()) +
                                               " samples is not a multiple of 1280");
  }
  std::string out;
  out.reserve(clip.samples.size() / kSegmentSamples);
  for (std::size_t start = 0; start < clip.samples.size(); start += kSegmentSamples) {
    const auto power = goertzel_powers(clip.samples.data() + start, kSegmentSamples);
    // strict > keeps the lowest index on ties
    int best = 0;
    for (int i = 1; i < kAlphabetSlots; ++i) {
      if (power[i] > power[best]) best = i;
    }
    out += transcript_for_slot(best);
  }
  return out;
}

std::string noisy_asr(const AudioClip& clip, const LanguageCode& lang, const DecodeParams& decode,
                      const NoiseSpec& spec) {
  spec.validate();
  const std::string clean = tone_asr(clip, lang, decode);
  const uint64_t salt = spec.seed ^ fnv1a64(clean);

  // Separators are kept verbatim so p = 0 reproduces tone_asr exactly.
  std::string out;
  out.reserve(clean.size());
  uint64_t word_index = 0;
  std::size_t pos = 0;
  while (pos <= clean.size()) {
    std::size_t end = clean.find(' ', pos);
    if (end == std::string::npos) end = clean.size();
    std::string_view word(clean.data() + pos, end - pos);
    if (!word.empty()) {
      SplitMix64 rng(salt ^ word_index);
      ++word_index;
      out += rng.next_unit() < spec.word_error_rate ? kNoiseMarker : word;
    }
    if (end < clean.size()) out.push_back(' ');
    pos = end + 1;
  }
  return out;
}

std::string dict_mt(std::string_view text, const LanguageCode& /*src*/, const LanguageCode& /*tgt*/,
                    const Lexicon& lexicon) {
  std::vector<std::string> words = text::split_whitespace(text);
  for (auto& w : words) {
    if (auto it = lexicon.find(w); it != lexicon.end()) w = it->second;
  }
  return text::join(words, " ");
}

AudioClip fingerprint_vc(const AudioClip& content, const AudioClip& reference) {
  content.validate();
  reference.validate();
  AudioClip out = content;
  out.speaker_tag = reference.speaker_tag.value_or(std::string(kUnknownSpeaker));
  return out;
}

SpeakerEmbedding hash_embed(const AudioClip& clip) {
  clip.validate();
  SplitMix64 rng(fnv1a64(clip.speaker_tag.value_or(std::string(kUnknownSpeaker))));
  SpeakerEmbedding emb;
  emb.vector.resize(kEmbeddingDim);
  double norm2 = 0.0;
  for (double& v : emb.vector) {
    v = 2.0 * rng.next_unit() - 1.0;
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  for (double& v : emb.vector) v /= norm;
  return emb;
}

StageBackendSet make_mock_backends(MockOptions options) {
  if (options.asr_noise) options.asr_noise->validate();
  auto lexicon = std::make_shared<const Lexicon>(std::move(options.lexicon));

  StageBackendSet set;
  set.name = "mock";
  set.deterministic = true;
  if (auto noise = options.asr_noise) {
    set.asr = [noise = *noise](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
      return noisy_asr(c, l, d, noise);
    };
  } else {
    set.asr = [](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) { return tone_asr(c, l, d); };
  }
  set.mt = [lexicon](std::string_view t, const LanguageCode& s, const LanguageCode& g) {
    return dict_mt(t, s, g, *lexicon);
  };
  set.tts = [](std::string_view t, const LanguageCode& l) { return tone_tts(t, l); };
  set.vc = [](const AudioClip& c, const AudioClip& r) { return fingerprint_vc(c, r); };
  set.embed = [](const AudioClip& c) { return hash_embed(c); };
  return set;
}

}  // namespace cascada::mock
