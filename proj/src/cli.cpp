#include "cascada/cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "cascada/config.hpp"
#include "cascada/harness.hpp"
#include "cascada/mock_server.hpp"
#include "cascada/mos.hpp"
#include "cascada/pipeline.hpp"
#include "cascada/remote_backend.hpp"
#include "cascada/reports.hpp"
#include "cascada/synth.hpp"
#include "cascada/wav.hpp"

namespace cascada::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Bad flags or configuration detected before any work starts.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested.store(true); }

void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_logger_mt("cascada");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    const char* level = std::getenv("CASCADA_LOG");
    spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
  });
}

config::AppConfig load_config_or_usage(const fs::path& path) {
  try {
    return config::load_config(path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

StageBackendSet backends_or_usage(const PipelineConfig& pc) {
  try {
    pc.validate();
    return config::build_backends(pc);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw UsageError(e.what());
    throw;
  }
}

// --- translate ---------------------------------------------------------------

struct TranslateFlags {
  std::string input;
  std::string src;
  std::string tgt;
  std::string config;
  std::string output;
  bool no_prosody = false;
};

int cmd_translate(const TranslateFlags& f, std::ostream& out) {
  auto app = load_config_or_usage(f.config);
  PipelineConfig pc = app.pipeline;
  try {
    pc.source_lang = LanguageCode(f.src);
    pc.target_lang = LanguageCode(f.tgt);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (f.no_prosody) pc.preserve_prosody = false;
  const StageBackendSet backends = backends_or_usage(pc);

  const fs::path input(f.input);
  const AudioClip clip = read_wav(input);
  spdlog::info("translating {} ({:.2f} s, {}-{})", input.string(), clip.duration_s(), pc.source_lang.str(),
               pc.target_lang.str());
  const TranslationResult result = run_cascade(clip, pc, backends, input.stem().string());

  fs::path output = f.output.empty() ? fs::path(input).replace_extension(".translated.wav") : fs::path(f.output);
  fs::path sidecar = fs::path(output).replace_extension(".json");
  write_wav(result.output_audio, output);
  json j = reports::to_json(result);
  j["source_lang"] = pc.source_lang.str();
  j["target_lang"] = pc.target_lang.str();
  j["preserve_prosody"] = pc.preserve_prosody;
  j["stages"] = pc.stages_used();
  j["output_audio"] = output.string();
  reports::write_text(sidecar, j.dump(2) + "\n");

  out << "transcript:  " << result.transcript << "\n"
      << "translation: " << result.translation << "\n"
      << "output:      " << output.string() << " (sidecar " << sidecar.string() << ")\n";
  return kExitOk;
}

// --- batch -------------------------------------------------------------------

struct BatchFlags {
  std::string manifest;
  std::string config;
  std::string out_dir;
  int parallelism = 0;
  bool no_prosody = false;
};

int cmd_batch(const BatchFlags& f, std::ostream& out) {
  auto app = load_config_or_usage(f.config);
  const auto manifest = harness::load_manifest(f.manifest);
  PipelineConfig pc = app.pipeline;
  pc.source_lang = manifest.source_lang();
  pc.target_lang = manifest.target_lang();
  if (f.parallelism > 0) pc.parallelism = f.parallelism;
  if (f.no_prosody) pc.preserve_prosody = false;
  const StageBackendSet backends = backends_or_usage(pc);

  const auto results = run_batch(manifest.utterances, pc, backends);
  fs::create_directories(f.out_dir);
  json arr = json::array();
  std::size_t failures = 0;
  for (const auto& r : results) {
    json j = reports::to_json(r);
    if (r.ok()) {
      const fs::path wav = fs::path(f.out_dir) / (r.utterance_id + ".wav");
      write_wav(r.output_audio, wav);
      j["output_audio"] = wav.string();
    } else {
      ++failures;
      spdlog::warn("utterance {} failed: {}", r.utterance_id, *r.error);
    }
    arr.push_back(std::move(j));
  }
  reports::write_text(fs::path(f.out_dir) / "results.json", arr.dump(2) + "\n");
  out << fmt::format("{} utterances, {} ok, {} failed; results in {}\n", results.size(), results.size() - failures,
                     failures, (fs::path(f.out_dir) / "results.json").string());
  return failures == results.size() ? kExitFailure : kExitOk;
}

// --- bench-s2st --------------------------------------------------------------

struct BenchS2stFlags {
  std::string manifest;
  std::string config;
  std::size_t clips = 0;
  std::size_t iterations = 0;
  uint64_t seed = 0;
  std::string out_dir = "reports";
  std::string name = "s2st_bleu";
  std::optional<double> eval_noise;
  uint64_t eval_seed = 42;
  int parallelism = 0;
  bool no_prosody = false;
};

int cmd_bench_s2st(const BenchS2stFlags& f, std::ostream& out) {
  auto app = load_config_or_usage(f.config);
  const auto manifest = harness::load_manifest(f.manifest);

  const harness::SamplingPlan plan{f.clips, f.iterations, f.seed};
  try {
    plan.validate(manifest.utterances.size());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  PipelineConfig pc = app.pipeline;
  pc.source_lang = manifest.source_lang();
  pc.target_lang = manifest.target_lang();
  if (f.parallelism > 0) pc.parallelism = f.parallelism;
  if (f.no_prosody) pc.preserve_prosody = false;
  const StageBackendSet backends = backends_or_usage(pc);

  config::EvalAsrSpec eval_spec = app.eval_asr;
  if (f.eval_noise) {
    if (eval_spec.kind != BackendKind::kMock) throw UsageError("--eval-noise needs a mock eval_asr");
    eval_spec.noise = mock::NoiseSpec{*f.eval_noise, f.eval_seed};
    try {
      eval_spec.noise->validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  const harness::EvalAsr eval_asr = config::build_eval_asr(eval_spec);

  const auto report = harness::eval_s2st_bleu(manifest, pc, backends, plan, eval_asr);
  reports::write_report(f.out_dir, f.name, reports::s2st_json(report), reports::s2st_markdown(report));
  out << fmt::format("{}: BLEU-c {} over {} iterations of {} clips ({})\n", report.task_name,
                     mos::format_pm(report.summary.mean, report.summary.std), plan.iterations,
                     plan.clips_per_iteration,
                     report.std_in_reference_band() ? "std inside reference band" : "std outside reference band");
  return kExitOk;
}

// --- bench-asr ---------------------------------------------------------------

struct BenchAsrFlags {
  std::string manifest;
  std::vector<std::string> backends;
  std::string out_dir = "reports";
  std::string name = "asr_bench";
  std::string latency_column = "per_clip_mean";
  double temperature = 1.0;
  std::string strategy = "greedy";
  int beam_size = 5;
  double timeout_s = 60.0;
  int retries = 2;
  double backoff_s = 0.5;
  int parallelism = 1;
};

// NAME=SPEC with SPEC one of: tone | noisy:P[:SEED] | http(s)://host:port,
// optionally suffixed "@MS" to add a fixed delay per call.
harness::EvalAsr parse_asr_backend(const std::string& entry, const BenchAsrFlags& f) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
    throw UsageError("--backend expects NAME=SPEC, got '" + entry + "'");
  }
  harness::EvalAsr model;
  model.name = entry.substr(0, eq);
  std::string spec = entry.substr(eq + 1);

  int delay_ms = 0;
  if (auto at = spec.rfind('@'); at != std::string::npos && spec.rfind("http", 0) != 0) {
    try {
      delay_ms = std::stoi(spec.substr(at + 1));
    } catch (const std::exception&) {
      throw UsageError("bad delay in backend spec '" + spec + "'");
    }
    spec.resize(at);
  }

  if (spec == "tone") {
    model.asr = [](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) { return mock::tone_asr(c, l, d); };
    model.deterministic = true;
  } else if (spec.rfind("noisy:", 0) == 0) {
    mock::NoiseSpec noise{0.0, 42};
    try {
      const std::string rest = spec.substr(6);
      const auto colon = rest.find(':');
      noise.word_error_rate = std::stod(rest.substr(0, colon));
      if (colon != std::string::npos) noise.seed = std::stoull(rest.substr(colon + 1));
      noise.validate();
    } catch (const std::exception& e) {
      throw UsageError("bad noisy backend spec '" + spec + "': " + e.what());
    }
    model.asr = [noise](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
      return mock::noisy_asr(c, l, d, noise);
    };
    model.deterministic = true;
  } else if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    auto client = std::make_shared<const remote::RemoteClient>(
        remote::RemoteEndpoint{spec, f.timeout_s, f.retries, f.backoff_s});
    model.asr = [client](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
      return client->transcribe(c, l, d);
    };
  } else {
    throw UsageError("unknown backend spec '" + spec + "' (tone, noisy:P[:SEED], or a URL)");
  }

  if (delay_ms > 0) {
    model.asr = [inner = model.asr, delay_ms](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      return inner(c, l, d);
    };
  }
  return model;
}

int cmd_bench_asr(const BenchAsrFlags& f, std::ostream& out) {
  if (f.backends.empty()) throw UsageError("at least one --backend is required");
  reports::LatencyColumn column;
  DecodeParams decode;
  try {
    column = reports::parse_latency_column(f.latency_column);
    decode.temperature = f.temperature;
    decode.strategy = parse_decode_strategy(f.strategy);
    decode.beam_size = decode.strategy == DecodeStrategy::kBeam ? f.beam_size : 0;
    decode.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::vector<harness::EvalAsr> models;
  for (const auto& entry : f.backends) {
    models.push_back(parse_asr_backend(entry, f));
    models.back().decode = decode;
  }

  const auto manifest = harness::load_manifest(f.manifest);
  std::vector<harness::AsrBenchRow> rows;
  for (const auto& model : models) {
    try {
      rows.push_back(harness::bench_asr(manifest, model, f.parallelism));
    } catch (const std::exception& e) {
      harness::AsrBenchRow row;
      row.model = model.name;
      row.failure = e.what();
      rows.push_back(std::move(row));
    }
    if (rows.back().failed()) spdlog::warn("backend {} failed: {}", model.name, *rows.back().failure);
  }

  const std::string md = reports::asr_bench_markdown(rows, column);
  reports::write_report(f.out_dir, f.name, reports::asr_bench_json(rows, column), md);
  out << md;
  const bool any_ok = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.failed(); });
  return any_ok ? kExitOk : kExitFailure;
}

// --- mos ---------------------------------------------------------------------

struct MosFlags {
  std::string survey;
  std::string gt_reference;
  std::vector<int> questions{1, 2};
  std::string out_dir = "reports";
  std::string name = "mos";
};

int cmd_mos(const MosFlags& f, std::ostream& out) {
  for (int q : f.questions) {
    if (q < 1 || q > mos::kQuestions) throw UsageError("--questions entries must be 1, 2 or 3");
  }
  const auto responses = mos::load_survey(f.survey);
  std::vector<mos::GtReference> gt;
  if (!f.gt_reference.empty()) gt = mos::load_gt_reference(f.gt_reference);
  const auto report = mos::aggregate_mos(responses, mos::MosOptions{f.questions}, gt);

  const std::string std_table = reports::mos_markdown(report, reports::Spread::kStd);
  const std::string ci_table = reports::mos_markdown(report, reports::Spread::kCi95);
  reports::write_report(f.out_dir, f.name, reports::mos_json(report), std_table + "\n" + ci_table);
  out << std_table << "\n" << ci_table;
  return kExitOk;
}

// --- compare-bleu / bleu-matrix -----------------------------------------------

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kValidation, path + ": " + e.what());
  }
}

struct CompareFlags {
  std::string bleu_r;
  std::vector<std::string> results;
  std::vector<std::string> bleu_c;
  std::string out_dir = "reports";
  std::string name = "bleu_comparison";
};

int cmd_compare_bleu(const CompareFlags& f, std::ostream& out) {
  std::map<std::string, double> measured;
  for (const auto& entry : f.bleu_c) {
    const auto eq = entry.rfind('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--bleu-c expects TASK=VALUE, got '" + entry + "'");
    try {
      measured[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--bleu-c value is not a number in '" + entry + "'");
    }
  }
  for (const auto& path : f.results) {
    const json j = read_json_file(path);
    try {
      measured[j.at("task").get<std::string>()] = j.at("bleu_c").get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kValidation, path + " is not a bench-s2st report: " + e.what());
    }
  }

  auto rows = reports::load_bleu_reference(f.bleu_r);
  for (auto& row : rows) {
    if (auto it = measured.find(row.task); it != measured.end()) row.bleu_c = it->second;
  }
  const std::string md = reports::bleu_comparison_markdown(rows);
  reports::write_report(f.out_dir, f.name, reports::bleu_comparison_json(rows), md);
  out << md;
  return kExitOk;
}

struct MatrixFlags {
  std::vector<std::string> results;
  std::string output;
};

int cmd_bleu_matrix(const MatrixFlags& f, std::ostream& out) {
  std::vector<reports::BleuMatrixEntry> entries;
  for (const auto& path : f.results) {
    const json j = read_json_file(path);
    try {
      harness::SamplingSummary s;
      s.mean = j.at("summary").at("mean").get<double>();
      s.std = j.at("summary").at("std").get<double>();
      entries.push_back(reports::matrix_entry(LanguageCode(j.at("source_lang").get<std::string>()),
                                              LanguageCode(j.at("target_lang").get<std::string>()), s));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kValidation, path + " is not a bench-s2st report: " + e.what());
    }
  }
  const std::string csv = reports::bleu_matrix_csv(std::move(entries));
  if (!f.output.empty()) {
    if (auto parent = fs::path(f.output).parent_path(); !parent.empty()) fs::create_directories(parent);
    reports::write_text(f.output, csv);
  }
  out << csv;
  return kExitOk;
}

// --- serve-mock --------------------------------------------------------------

struct ServeFlags {
  int port = 0;
  std::string host = "127.0.0.1";
  std::string lexicon;
  double fail_rate = 0.0;
  int fail_first = 0;
  int delay_ms = 0;
  std::string asr_echo;
  uint64_t seed = 0;
};

int cmd_serve_mock(const ServeFlags& f, std::ostream& out) {
  MockServerOptions options;
  if (!f.lexicon.empty()) options.lexicon = mock::load_lexicon(f.lexicon);
  options.fail_rate = f.fail_rate;
  options.fail_first = f.fail_first;
  options.delay_ms = f.delay_ms;
  options.fault_seed = f.seed;
  if (!f.asr_echo.empty()) options.asr_echo = f.asr_echo;

  std::unique_ptr<MockServer> server;
  try {
    server = std::make_unique<MockServer>(std::move(options));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  g_stop_requested.store(false);
  auto previous_int = std::signal(SIGINT, on_stop_signal);
  auto previous_term = std::signal(SIGTERM, on_stop_signal);
  struct RestoreSignals {
    decltype(previous_int) i;
    decltype(previous_term) t;
    ~RestoreSignals() {
      std::signal(SIGINT, i);
      std::signal(SIGTERM, t);
    }
  } restore{previous_int, previous_term};

  server->start(f.host, f.port);
  out << "serving mock backends on " << server->url() << std::endl;
  spdlog::info("mock server up on {}", server->url());
  while (!g_stop_requested.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server->stop();
  return kExitOk;
}

// --- synth-corpus ------------------------------------------------------------

struct SynthFlags {
  std::string out_dir;
  std::size_t clips = 20;
  std::string src = "es";
  std::string tgt = "en";
  uint64_t seed = 1;
  std::size_t min_words = 4;
  std::size_t max_words = 8;
  std::size_t speakers = 5;
  bool translate_lexicon = false;
  std::string task = "synthetic";
};

int cmd_synth_corpus(const SynthFlags& f, std::ostream& out) {
  synth::SynthOptions o;
  try {
    o.source_lang = LanguageCode(f.src);
    o.target_lang = LanguageCode(f.tgt);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  o.clips = f.clips;
  o.seed = f.seed;
  o.min_words = f.min_words;
  o.max_words = f.max_words;
  o.speakers = f.speakers;
  o.identity_lexicon = !f.translate_lexicon;
  o.task_name = f.task;
  const auto corpus = synth::write_synthetic_corpus(f.out_dir, o);
  out << fmt::format("wrote {} clips ({} words): {}\n", corpus.manifest.utterances.size(), corpus.total_words,
                     corpus.manifest_path.string());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  init_logging();

  CLI::App app{"Cascade speech-to-speech translation: run the ASR -> MT -> TTS -> VC pipeline and its evaluations"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  TranslateFlags tf;
  auto* translate = app.add_subcommand("translate", "Translate one WAV clip through the cascade");
  translate->add_option("--input", tf.input, "Source WAV (PCM 16-bit mono)")->required();
  translate->add_option("--src", tf.src, "Source language code")->required();
  translate->add_option("--tgt", tf.tgt, "Target language code")->required();
  translate->add_option("--config", tf.config, "Pipeline config JSON")->required();
  translate->add_option("--output", tf.output, "Output WAV (default: <input>.translated.wav)");
  translate->add_flag("--no-prosody", tf.no_prosody, "Skip voice conversion (vanilla TTS output)");

  BatchFlags bf;
  auto* batch = app.add_subcommand("batch", "Translate every utterance of a manifest");
  batch->add_option("--manifest", bf.manifest, "Manifest (JSON Lines)")->required();
  batch->add_option("--config", bf.config, "Pipeline config JSON")->required();
  batch->add_option("--out-dir", bf.out_dir, "Directory for output WAVs and results.json")->required();
  batch->add_option("--parallelism", bf.parallelism, "Concurrent clips (overrides config)");
  batch->add_flag("--no-prosody", bf.no_prosody, "Skip voice conversion");

  BenchS2stFlags sf;
  auto* s2st = app.add_subcommand("bench-s2st", "Back-transcription BLEU over seeded sample iterations");
  s2st->add_option("--manifest", sf.manifest, "Manifest (JSON Lines)")->required();
  s2st->add_option("--config", sf.config, "Pipeline config JSON")->required();
  s2st->add_option("--clips", sf.clips, "Clips per iteration")->required();
  s2st->add_option("--iterations", sf.iterations, "Number of iterations")->required();
  s2st->add_option("--seed", sf.seed, "Sampling seed")->required();
  s2st->add_option("--out-dir", sf.out_dir, "Report directory")->capture_default_str();
  s2st->add_option("--name", sf.name, "Report base name")->capture_default_str();
  s2st->add_option("--eval-noise", sf.eval_noise, "Word error rate injected into the mock evaluation ASR");
  s2st->add_option("--eval-seed", sf.eval_seed, "Seed for --eval-noise")->capture_default_str();
  s2st->add_option("--parallelism", sf.parallelism, "Concurrent clips (overrides config)");
  s2st->add_flag("--no-prosody", sf.no_prosody, "Skip voice conversion");

  BenchAsrFlags af;
  auto* asr = app.add_subcommand("bench-asr", "WER and latency of one or more ASR backends");
  asr->add_option("--manifest", af.manifest, "Manifest with source_text")->required();
  asr->add_option("--backend", af.backends, "NAME=SPEC; SPEC is tone, noisy:P[:SEED] or a server URL, optional @MS delay")
      ->required();
  asr->add_option("--out-dir", af.out_dir, "Report directory")->capture_default_str();
  asr->add_option("--name", af.name, "Report base name")->capture_default_str();
  asr->add_option("--latency-column", af.latency_column, "per_clip_mean | duration_weighted | rtf")
      ->capture_default_str();
  asr->add_option("--temperature", af.temperature, "Decode temperature")->capture_default_str();
  asr->add_option("--strategy", af.strategy, "greedy | beam")->capture_default_str();
  asr->add_option("--beam-size", af.beam_size, "Beam size for --strategy beam")->capture_default_str();
  asr->add_option("--timeout", af.timeout_s, "Remote timeout in seconds")->capture_default_str();
  asr->add_option("--retries", af.retries, "Remote retries")->capture_default_str();
  asr->add_option("--backoff", af.backoff_s, "Initial remote backoff in seconds")->capture_default_str();
  asr->add_option("--parallelism", af.parallelism, "Concurrent clips")->capture_default_str();

  MosFlags mf;
  auto* mos_cmd = app.add_subcommand("mos", "Aggregate a MOS survey CSV into per-task tables");
  mos_cmd->add_option("--survey", mf.survey, "Survey CSV")->required();
  mos_cmd->add_option("--gt-reference", mf.gt_reference, "JSON array of {task, mos_h, source} rows");
  mos_cmd->add_option("--questions", mf.questions, "Questions pooled into MOS-h/v/c")->delimiter(',')
      ->capture_default_str();
  mos_cmd->add_option("--out-dir", mf.out_dir, "Report directory")->capture_default_str();
  mos_cmd->add_option("--name", mf.name, "Report base name")->capture_default_str();

  CompareFlags cf;
  auto* compare = app.add_subcommand("compare-bleu", "Table of reported BLEU-r against measured BLEU-c");
  compare->add_option("--bleu-r", cf.bleu_r, "JSON array of {task, bleu_r, source}")->required();
  compare->add_option("--result", cf.results, "bench-s2st JSON report(s)");
  compare->add_option("--bleu-c", cf.bleu_c, "TASK=VALUE measured score(s)");
  compare->add_option("--out-dir", cf.out_dir, "Report directory")->capture_default_str();
  compare->add_option("--name", cf.name, "Report base name")->capture_default_str();

  MatrixFlags xf;
  auto* matrix = app.add_subcommand("bleu-matrix", "Per-language BLEU CSV (X-en / en-X) from bench-s2st reports");
  matrix->add_option("--result", xf.results, "bench-s2st JSON report(s)")->required();
  matrix->add_option("--output", xf.output, "CSV path (also printed)");

  ServeFlags vf;
  auto* serve = app.add_subcommand("serve-mock", "Serve the wire protocol backed by the mock backends");
  serve->add_option("--port", vf.port, "TCP port")->required();
  serve->add_option("--host", vf.host, "Bind address")->capture_default_str();
  serve->add_option("--lexicon", vf.lexicon, "Lexicon TSV for /v1/translate");
  serve->add_option("--fail-rate", vf.fail_rate, "Fraction of stage requests answered with 503")
      ->capture_default_str();
  serve->add_option("--fail-first", vf.fail_first, "Fail the first N stage requests")->capture_default_str();
  serve->add_option("--delay-ms", vf.delay_ms, "Delay before each stage response")->capture_default_str();
  serve->add_option("--asr-echo", vf.asr_echo, "Answer every /v1/asr with this text");
  serve->add_option("--seed", vf.seed, "Fault injection seed")->capture_default_str();

  SynthFlags yf;
  auto* synth_cmd = app.add_subcommand("synth-corpus", "Write a tone-encoded test corpus with manifest and config");
  synth_cmd->add_option("--out-dir", yf.out_dir, "Output directory")->required();
  synth_cmd->add_option("--clips", yf.clips, "Number of clips")->capture_default_str();
  synth_cmd->add_option("--src", yf.src, "Source language")->capture_default_str();
  synth_cmd->add_option("--tgt", yf.tgt, "Target language")->capture_default_str();
  synth_cmd->add_option("--seed", yf.seed, "Text generation seed")->capture_default_str();
  synth_cmd->add_option("--min-words", yf.min_words, "Minimum words per clip")->capture_default_str();
  synth_cmd->add_option("--max-words", yf.max_words, "Maximum words per clip")->capture_default_str();
  synth_cmd->add_option("--speakers", yf.speakers, "Distinct speaker tags")->capture_default_str();
  synth_cmd->add_flag("--translate-lexicon", yf.translate_lexicon, "Use a word-list lexicon instead of identity");
  synth_cmd->add_option("--task", yf.task, "Task name")->capture_default_str();

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (translate->parsed()) return cmd_translate(tf, out);
    if (batch->parsed()) return cmd_batch(bf, out);
    if (s2st->parsed()) return cmd_bench_s2st(sf, out);
    if (asr->parsed()) return cmd_bench_asr(af, out);
    if (mos_cmd->parsed()) return cmd_mos(mf, out);
    if (compare->parsed()) return cmd_compare_bleu(cf, out);
    if (matrix->parsed()) return cmd_bleu_matrix(xf, out);
    if (serve->parsed()) return cmd_serve_mock(vf, out);
    if (synth_cmd->parsed()) return cmd_synth_corpus(yf, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr); }

}  // namespace cascada::cli
