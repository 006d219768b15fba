#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cascada/harness.hpp"

namespace cascada::synth {

struct SynthOptions {
  std::size_t clips = 20;
  LanguageCode source_lang{"es"};
  LanguageCode target_lang{"en"};
  uint64_t seed = 1;
  std::size_t min_words = 4;
  std::size_t max_words = 8;
  std::size_t speakers = 5;
  // true: lexicon maps every word to itself and references equal the
  // source text. false: a small es->en style word list.
  bool identity_lexicon = true;
  std::string task_name = "synthetic";
};

struct SynthCorpus {
  std::filesystem::path manifest_path;
  std::filesystem::path lexicon_path;
  std::filesystem::path config_path;
  harness::Manifest manifest;
  std::size_t total_words = 0;
};

/// Writes tone-encoded WAVs (tagged spk0..spkN-1), manifest.jsonl,
/// lexicon.tsv and a mock config.json under `dir`.
SynthCorpus write_synthetic_corpus(const std::filesystem::path& dir, const SynthOptions& options);

}  // namespace cascada::synth
