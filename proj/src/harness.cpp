#include "cascada/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include <json.hpp>

#include "cascada/parallel.hpp"
#include "cascada/rng.hpp"

namespace cascada::harness {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kValidation, "manifest line " + std::to_string(line) + ": " + what);
}

std::optional<std::string> optional_string(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) invalid(line, std::string("'") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::string required_string(const json& j, const char* key, std::size_t line) {
  auto v = optional_string(j, key, line);
  if (!v) invalid(line, std::string("missing required field '") + key + "'");
  return *v;
}

LanguageCode required_lang(const json& j, const char* key, std::size_t line) {
  try {
    return LanguageCode(required_string(j, key, line));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidation) throw;
    invalid(line, e.what());
  }
}

}  // namespace

const Utterance& Manifest::at(const std::string& id) const {
  for (const auto& u : utterances) {
    if (u.id == id) return u;
  }
  throw Error(ErrorCode::kInvalidArgument, "no utterance '" + id + "' in manifest '" + task_name + "'");
}

Manifest parse_manifest(std::string_view content, const std::filesystem::path& base_dir,
                        std::string default_task_name) {
  Manifest m;
  std::optional<std::string> task;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      invalid(line_no, std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) invalid(line_no, "expected a JSON object");

    Utterance u;
    u.id = required_string(j, "id", line_no);
    if (u.id.empty()) invalid(line_no, "empty id");
    std::filesystem::path audio = required_string(j, "audio_path", line_no);
    u.audio_path = audio.is_relative() ? base_dir / audio : audio;
    u.source_lang = required_lang(j, "source_lang", line_no);
    u.target_lang = required_lang(j, "target_lang", line_no);
    u.source_text = optional_string(j, "source_text", line_no);
    u.reference_translation = optional_string(j, "reference_translation", line_no);
    u.speaker_id = optional_string(j, "speaker_id", line_no);
    if (auto t = optional_string(j, "task", line_no)) {
      if (task && *task != *t) invalid(line_no, "task '" + *t + "' differs from earlier '" + *task + "'");
      task = std::move(t);
    }
    m.utterances.push_back(std::move(u));
  }
  m.task_name = task.value_or(std::move(default_task_name));
  validate_manifest(m);
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read manifest " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_manifest(content, path.parent_path(), path.stem().string());
}

void validate_manifest(const Manifest& manifest) {
  if (manifest.utterances.empty()) throw Error(ErrorCode::kValidation, "manifest has no utterances");
  std::set<std::string> seen;
  const auto& first = manifest.utterances.front();
  for (const auto& u : manifest.utterances) {
    if (!seen.insert(u.id).second) throw Error(ErrorCode::kValidation, "duplicate utterance id '" + u.id + "'");
    if (u.source_lang == u.target_lang) {
      throw Error(ErrorCode::kValidation, "utterance '" + u.id + "': source and target language are both " +
                                              u.source_lang.str());
    }
    if (u.source_lang != first.source_lang || u.target_lang != first.target_lang) {
      throw Error(ErrorCode::kValidation, "utterance '" + u.id + "' is " + u.source_lang.str() + "-" +
                                              u.target_lang.str() + " but the task is " + first.source_lang.str() +
                                              "-" + first.target_lang.str());
    }
  }
}

void SamplingPlan::validate(std::size_t manifest_size) const {
  if (clips_per_iteration == 0) throw Error(ErrorCode::kInvalidArgument, "clips per iteration must be >= 1");
  if (iterations == 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (clips_per_iteration > manifest_size) {
    throw Error(ErrorCode::kInvalidArgument, "sample larger than manifest (" + std::to_string(clips_per_iteration) +
                                                 " > " + std::to_string(manifest_size) + ")");
  }
}

std::vector<std::vector<std::string>> sample_iterations(const Manifest& manifest, const SamplingPlan& plan) {
  plan.validate(manifest.utterances.size());
  std::vector<std::string> ids;
  ids.reserve(manifest.utterances.size());
  for (const auto& u : manifest.utterances) ids.push_back(u.id);
  std::sort(ids.begin(), ids.end());

  const std::size_t total = ids.size();
  std::vector<std::vector<std::string>> subsets;
  subsets.reserve(plan.iterations);
  for (std::size_t j = 0; j < plan.iterations; ++j) {
    SplitMix64 rng(plan.seed + j);
    std::vector<std::string> pool = ids;
    for (std::size_t i = 0; i < plan.clips_per_iteration; ++i) {
      const std::size_t pick = i + static_cast<std::size_t>(rng.next() % (total - i));
      std::swap(pool[i], pool[pick]);
    }
    pool.resize(plan.clips_per_iteration);
    subsets.push_back(std::move(pool));
  }
  return subsets;
}

SamplingSummary summarize(std::vector<double> scores) {
  if (scores.empty()) throw Error(ErrorCode::kInvalidArgument, "summarize: no scores");
  SamplingSummary s;
  const auto k = static_cast<double>(scores.size());
  s.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / k;
  if (scores.size() > 1) {
    double ss = 0.0;
    for (double v : scores) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (k - 1.0));
  }
  s.per_iteration_scores = std::move(scores);
  return s;
}

S2stBleuReport eval_s2st_bleu(const Manifest& manifest, const PipelineConfig& config,
                              const StageBackendSet& backends, const SamplingPlan& plan, const EvalAsr& eval_asr) {
  validate_manifest(manifest);
  if (!eval_asr.asr) throw Error(ErrorCode::kConfig, "no evaluation ASR configured");
  eval_asr.decode.validate();

  S2stBleuReport report;
  report.task_name = manifest.task_name;
  report.source_lang = manifest.source_lang();
  report.target_lang = manifest.target_lang();
  report.plan = plan;
  report.eval_asr_name = eval_asr.name;
  report.eval_decode = eval_asr.decode;
  report.preserve_prosody = config.preserve_prosody;
  report.subsets = sample_iterations(manifest, plan);

  for (const auto& subset : report.subsets) {
    for (const auto& id : subset) {
      const auto& u = manifest.at(id);
      if (!u.reference_translation) {
        throw Error(ErrorCode::kValidation, "utterance '" + id + "' has no reference_translation");
      }
    }
  }

  PipelineConfig local = config;
  local.source_lang = manifest.source_lang();
  local.target_lang = manifest.target_lang();

  auto back_transcribe = [&](const std::string& id) -> std::string {
    const Utterance& u = manifest.at(id);
    try {
      const auto result = run_cascade(load_utterance_audio(u), local, backends, id);
      return eval_asr.asr(result.output_audio, local.target_lang, eval_asr.decode).value;
    } catch (const StageError& e) {
      throw StageError(e.stage(), e.cause(), "utterance '" + id + "': " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kStageFailure, "utterance '" + id + "': " + e.what());
    }
  };

  // Runs the ids in parallel; the first failure (in id order) is rethrown.
  auto run_all = [&](const std::vector<std::string>& ids) {
    std::vector<std::string> out(ids.size());
    std::vector<std::exception_ptr> errors(ids.size());
    parallel_for(ids.size(), local.parallelism, [&](std::size_t i) {
      try {
        out[i] = back_transcribe(ids[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return out;
  };

  const bool cacheable = backends.deterministic && eval_asr.deterministic;
  std::map<std::string, std::string> cache;
  if (cacheable) {
    std::set<std::string> unique;
    for (const auto& subset : report.subsets) unique.insert(subset.begin(), subset.end());
    const std::vector<std::string> ids(unique.begin(), unique.end());
    const auto transcripts = run_all(ids);
    for (std::size_t i = 0; i < ids.size(); ++i) cache.emplace(ids[i], transcripts[i]);
  }

  std::vector<double> scores;
  for (const auto& subset : report.subsets) {
    std::vector<std::string> hyps;
    if (cacheable) {
      for (const auto& id : subset) hyps.push_back(cache.at(id));
    } else {
      hyps = run_all(subset);
    }
    std::vector<std::string> refs;
    refs.reserve(subset.size());
    for (const auto& id : subset) refs.push_back(*manifest.at(id).reference_translation);
    report.per_iteration.push_back(metrics::corpus_bleu(hyps, refs));
    scores.push_back(report.per_iteration.back().score);
  }
  report.summary = summarize(std::move(scores));
  return report;
}

AsrBenchRow bench_asr(const Manifest& manifest, const EvalAsr& model, int parallelism) {
  validate_manifest(manifest);
  if (!model.asr) throw Error(ErrorCode::kConfig, "bench_asr: model '" + model.name + "' has no ASR capability");
  for (const auto& u : manifest.utterances) {
    if (!u.source_text) throw Error(ErrorCode::kValidation, "utterance '" + u.id + "' has no source_text");
  }

  const std::size_t n = manifest.utterances.size();
  std::vector<std::string> hyps(n);
  std::vector<metrics::LatencyRecord> wall(n);
  std::vector<std::optional<double>> model_s(n);
  std::vector<std::exception_ptr> errors(n);

  parallel_for(n, parallelism, [&](std::size_t i) {
    const Utterance& u = manifest.utterances[i];
    try {
      const AudioClip clip = load_utterance_audio(u);
      const auto start = std::chrono::steady_clock::now();
      auto reply = model.asr(clip, u.source_lang, model.decode);
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      hyps[i] = std::move(reply.value);
      wall[i] = {elapsed, clip.duration_s()};
      model_s[i] = reply.model_seconds;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });

  AsrBenchRow row;
  row.model = model.name;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      row.failure = "utterance '" + manifest.utterances[i].id + "': " + e.what();
    }
    return row;
  }

  std::vector<std::string> refs;
  refs.reserve(n);
  for (const auto& u : manifest.utterances) refs.push_back(*u.source_text);
  row.wer = metrics::corpus_wer(hyps, refs);
  row.latency = metrics::latency_stats(wall);
  if (std::all_of(model_s.begin(), model_s.end(), [](const auto& v) { return v.has_value(); })) {
    std::vector<metrics::LatencyRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) records[i] = {*model_s[i], wall[i].duration_s};
    row.model_latency = metrics::latency_stats(records);
  }
  return row;
}

}  // namespace cascada::harness
