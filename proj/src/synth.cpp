#include "cascada/synth.hpp"

#include <array>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "cascada/mock_backends.hpp"
#include "cascada/reports.hpp"
#include "cascada/rng.hpp"
#include "cascada/text.hpp"
#include "cascada/wav.hpp"

namespace cascada::synth {
namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 40> kWords{{
    {"hola", "hello"},     {"amigo", "friend"},   {"casa", "house"},     {"perro", "dog"},
    {"gato", "cat"},       {"agua", "water"},     {"libro", "book"},     {"mesa", "table"},
    {"ciudad", "city"},    {"tiempo", "time"},    {"noche", "night"},    {"dia", "day"},
    {"sol", "sun"},        {"luna", "moon"},      {"verde", "green"},    {"rojo", "red"},
    {"grande", "big"},     {"pequeno", "small"},  {"bueno", "good"},     {"malo", "bad"},
    {"comer", "eat"},      {"beber", "drink"},    {"hablar", "speak"},   {"ver", "see"},
    {"tren", "train"},     {"calle", "street"},   {"mar", "sea"},        {"rio", "river"},
    {"pan", "bread"},      {"leche", "milk"},     {"escuela", "school"}, {"madre", "mother"},
    {"padre", "father"},   {"nino", "child"},     {"flor", "flower"},    {"arbol", "tree"},
    {"cielo", "sky"},      {"fuego", "fire"},     {"viento", "wind"},    {"nube", "cloud"},
}};

}  // namespace

SynthCorpus write_synthetic_corpus(const std::filesystem::path& dir, const SynthOptions& options) {
  if (options.clips == 0) throw Error(ErrorCode::kInvalidArgument, "synthetic corpus needs at least one clip");
  if (options.min_words == 0 || options.min_words > options.max_words) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= min_words <= max_words");
  }
  if (options.speakers == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one speaker");

  std::error_code ec;
  std::filesystem::create_directories(dir / "audio", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + (dir / "audio").string() + ": " + ec.message());

  SynthCorpus corpus;
  corpus.manifest.task_name = options.task_name;
  SplitMix64 rng(options.seed);
  std::string jsonl;
  const std::size_t span = options.max_words - options.min_words + 1;

  for (std::size_t i = 0; i < options.clips; ++i) {
    const std::size_t words = options.min_words + static_cast<std::size_t>(rng.next() % span);
    std::vector<std::string> src;
    std::vector<std::string> tgt;
    for (std::size_t w = 0; w < words; ++w) {
      const auto& [s, t] = kWords[rng.next() % kWords.size()];
      src.emplace_back(s);
      tgt.emplace_back(options.identity_lexicon ? s : t);
    }
    corpus.total_words += words;

    Utterance u;
    u.id = fmt::format("utt{:05}", i);
    u.source_lang = options.source_lang;
    u.target_lang = options.target_lang;
    u.source_text = text::join(src, " ");
    u.reference_translation = text::join(tgt, " ");
    u.speaker_id = fmt::format("spk{}", i % options.speakers);
    const std::filesystem::path rel = std::filesystem::path("audio") / (u.id + ".wav");
    u.audio_path = dir / rel;

    AudioClip clip = mock::tone_tts(*u.source_text, u.source_lang);
    clip.speaker_tag = u.speaker_id;
    write_wav(clip, u.audio_path);

    nlohmann::json line = {{"id", u.id},
                           {"audio_path", rel.generic_string()},
                           {"source_lang", u.source_lang.str()},
                           {"target_lang", u.target_lang.str()},
                           {"source_text", *u.source_text},
                           {"reference_translation", *u.reference_translation},
                           {"speaker_id", *u.speaker_id},
                           {"task", options.task_name}};
    jsonl += line.dump() + "\n";
    corpus.manifest.utterances.push_back(std::move(u));
  }

  std::string lexicon = "# source<TAB>target\n";
  for (const auto& [s, t] : kWords) lexicon += fmt::format("{}\t{}\n", s, options.identity_lexicon ? s : t);

  corpus.manifest_path = dir / "manifest.jsonl";
  corpus.lexicon_path = dir / "lexicon.tsv";
  corpus.config_path = dir / "config.json";
  reports::write_text(corpus.manifest_path, jsonl);
  reports::write_text(corpus.lexicon_path, lexicon);

  const nlohmann::json config = {
      {"source_lang", options.source_lang.str()},
      {"target_lang", options.target_lang.str()},
      {"preserve_prosody", true},
      {"parallelism", 1},
      {"asr_decode", {{"temperature", 1.0}, {"strategy", "greedy"}}},
      {"backend", {{"kind", "mock"}, {"lexicon", "lexicon.tsv"}}},
      {"eval_asr", {{"kind", "mock"}, {"temperature", 1.0}, {"strategy", "greedy"}}},
  };
  reports::write_text(corpus.config_path, config.dump(2) + "\n");
  return corpus;
}

}  // namespace cascada::synth
