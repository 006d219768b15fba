// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every check also has a wall-clock budget.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "cascada/cli.hpp"
#include "cascada/harness.hpp"
#include "cascada/metrics.hpp"
#include "cascada/mock_backends.hpp"
#include "cascada/mock_server.hpp"
#include "cascada/mos.hpp"
#include "cascada/remote_backend.hpp"
#include "cascada/reports.hpp"
#include "cascada/synth.hpp"
#include "test_support.hpp"

using namespace cascada;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

const LanguageCode kEs{"es"};
const LanguageCode kEn{"en"};

struct Corpus {
  testing::TempDir dir{"acceptance"};
  synth::SynthCorpus corpus;
  PipelineConfig config;
  StageBackendSet backends;

  explicit Corpus(std::size_t clips, uint64_t seed = 1) {
    synth::SynthOptions o;
    o.clips = clips;
    o.seed = seed;
    corpus = synth::write_synthetic_corpus(dir / "corpus", o);
    config.source_lang = kEs;
    config.target_lang = kEn;
    backends = mock::make_mock_backends({mock::load_lexicon(corpus.lexicon_path), std::nullopt});
  }
};

harness::EvalAsr noisy_eval(double p, uint64_t seed) {
  harness::EvalAsr e;
  e.name = "noisy";
  e.deterministic = true;
  e.asr = [p, seed](const AudioClip& c, const LanguageCode& l, const DecodeParams& d) {
    return mock::noisy_asr(c, l, d, {p, seed});
  };
  return e;
}

// --- BLEU -------------------------------------------------------------------

std::string bleu_oracle() {
  // (5/5 * 3/4 * 2/3 * 1/2)^(1/4) * exp(1 - 6/5), computed offline.
  const auto b = metrics::corpus_bleu({"the cat sat on mat"}, {"the cat sat on the mat"});
  expect(std::abs(b.score - 57.89300674674099) < 1e-6, fmt::format("fixture scored {}", b.score));

  const std::vector<std::string> corpus{"a quick brown fox jumps", "over the lazy dog today", "one two three four"};
  const auto identity = metrics::corpus_bleu(corpus, corpus);
  expect(identity.score == 100.0, fmt::format("identity scored {}", identity.score));

  const auto zero = metrics::corpus_bleu({"w x y z v"}, {"w x y q z v"});
  expect(zero.matches[3] == 0, "zero-4-gram fixture has a 4-gram match");
  expect(zero.score == 0.0, fmt::format("zero-4-gram corpus scored {}", zero.score));
  return fmt::format("fixture {:.6f}, identity 100, no 4-gram 0", b.score);
}

// --- WER --------------------------------------------------------------------

using Tokens = std::vector<std::string>;

int exhaustive_edits(const Tokens& h, std::size_t i, const Tokens& r, std::size_t j) {
  if (i == h.size()) return static_cast<int>(r.size() - j);
  if (j == r.size()) return static_cast<int>(h.size() - i);
  return std::min({exhaustive_edits(h, i + 1, r, j + 1) + (h[i] == r[j] ? 0 : 1),
                   exhaustive_edits(h, i + 1, r, j) + 1, exhaustive_edits(h, i, r, j + 1) + 1});
}

std::string wer_oracle() {
  std::vector<Tokens> seqs{{}};
  for (std::size_t start = 0, len = 1; len <= 5; ++len) {
    const std::size_t end = seqs.size();
    for (std::size_t k = start; k < end; ++k) {
      for (const char* sym : {"a", "b", "c"}) {
        Tokens t = seqs[k];
        t.emplace_back(sym);
        seqs.push_back(std::move(t));
      }
    }
    start = end;
  }
  expect(seqs.size() == 364, "expected 364 sequences");

  std::size_t pairs = 0;
  for (const auto& r : seqs) {
    if (r.empty()) continue;  // WER is undefined without reference words
    for (const auto& h : seqs) {
      const auto w = metrics::wer_tokens(h, r);
      const int best = exhaustive_edits(h, 0, r, 0);
      if (w.errors() != best || w.wer != static_cast<double>(best) / static_cast<double>(r.size())) {
        throw Failure(fmt::format("mismatch on hyp '{}' ref '{}': {} vs {}", fmt::join(h, " "), fmt::join(r, " "),
                                  w.errors(), best));
      }
      ++pairs;
    }
  }
  return fmt::format("{} pairs agree with exhaustive alignment", pairs);
}

// --- closed loop ------------------------------------------------------------

std::string closed_loop() {
  Corpus c(20);
  harness::EvalAsr eval;
  eval.name = "tone";
  eval.deterministic = true;
  eval.asr = [](const AudioClip& a, const LanguageCode& l, const DecodeParams& d) { return mock::tone_asr(a, l, d); };
  const auto report = harness::eval_s2st_bleu(c.corpus.manifest, c.config, c.backends, {10, 5, 3}, eval);
  expect(report.summary.mean == 100.0, fmt::format("BLEU-c mean {}", report.summary.mean));
  expect(report.summary.std == 0.0, fmt::format("BLEU-c std {}", report.summary.std));

  const auto results = run_batch(c.corpus.manifest.utterances, c.config, c.backends);
  std::vector<std::string> hyps, refs, back, translations;
  for (std::size_t i = 0; i < results.size(); ++i) {
    expect(results[i].ok(), "utterance failed: " + results[i].error.value_or(""));
    const auto& u = c.corpus.manifest.utterances[i];
    hyps.push_back(results[i].transcript);
    refs.push_back(*u.source_text);
    back.push_back(mock::tone_asr(results[i].output_audio, kEn, {}));
    translations.push_back(*u.reference_translation);
  }
  const auto asr_wer = metrics::corpus_wer(hyps, refs);
  const auto back_wer = metrics::corpus_wer(back, translations);
  expect(asr_wer.wer == 0.0 && back_wer.wer == 0.0, fmt::format("WER {} / {}", asr_wer.wer, back_wer.wer));
  return fmt::format("20 clips: BLEU-c {}, corpus WER {:.2f}",
                     mos::format_pm(report.summary.mean, report.summary.std), asr_wer.wer);
}

// --- noise calibration ------------------------------------------------------

std::string noise_calibration() {
  Corpus c(220, 5);
  expect(c.corpus.total_words >= 1000, fmt::format("only {} words", c.corpus.total_words));

  std::vector<std::string> hyps, refs;
  const mock::NoiseSpec spec{0.1, 42};
  for (const auto& u : c.corpus.manifest.utterances) {
    hyps.push_back(mock::noisy_asr(load_utterance_audio(u), kEs, {}, spec));
    refs.push_back(*u.source_text);
  }
  const auto w = metrics::corpus_wer(hyps, refs);
  expect(w.wer >= 0.07 && w.wer <= 0.13, fmt::format("WER {} outside [0.07, 0.13]", w.wer));

  std::vector<double> means;
  for (double p : {0.0, 0.1, 0.3}) {
    const auto r = harness::eval_s2st_bleu(c.corpus.manifest, c.config, c.backends, {150, 5, 11}, noisy_eval(p, 42));
    means.push_back(r.summary.mean);
  }
  expect(means[0] > means[1] && means[1] > means[2],
         fmt::format("BLEU-c not strictly decreasing: {:.2f} {:.2f} {:.2f}", means[0], means[1], means[2]));
  return fmt::format("{} words, WER {:.4f} at p=0.1; BLEU-c {:.2f} > {:.2f} > {:.2f}", w.ref_words, w.wer, means[0],
                     means[1], means[2]);
}

// --- sampling determinism ---------------------------------------------------

int quiet_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cascada");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != cli::kExitOk) throw Failure(fmt::format("cli exited {}: {}", code, err.str()));
  return code;
}

std::string sampling_determinism() {
  testing::TempDir dir{"acceptance"};
  const fs::path corpus = dir / "corpus";
  quiet_cli({"synth-corpus", "--out-dir", corpus.string(), "--clips", "30", "--seed", "9"});
  auto bench = [&](const std::string& seed, const std::string& name) {
    quiet_cli({"bench-s2st", "--manifest", (corpus / "manifest.jsonl").string(), "--config",
               (corpus / "config.json").string(), "--clips", "8", "--iterations", "4", "--seed", seed, "--eval-noise",
               "0.2", "--out-dir", (dir / "reports").string(), "--name", name});
    return testing::read_file(dir / "reports" / (name + ".json"));
  };
  const std::string first = bench("7", "first");
  const std::string second = bench("7", "second");
  const std::string other = bench("8", "other");
  expect(!first.empty() && first == second, "reports for identical flags differ");

  const json a = json::parse(first);
  const json b = json::parse(other);
  bool subsets_differ = false;
  for (std::size_t k = 0; k < a.at("iterations").size(); ++k) {
    subsets_differ |= a["iterations"][k]["clip_ids"] != b["iterations"][k]["clip_ids"];
  }
  expect(subsets_differ, "changing the seed left every subset unchanged");
  return fmt::format("identical reports ({} bytes); seed 8 draws different subsets", first.size());
}

// --- MOS --------------------------------------------------------------------

std::string mos_aggregation() {
  const auto report = mos::aggregate_mos(mos::load_survey(testing::fixture_dir() / "mos" / "survey.csv"));
  std::ifstream in(testing::fixture_dir() / "mos" / "expected.json");
  const json want = json::parse(in);
  expect(report.cells.size() == want.at("cells").size(), "cell count differs");
  for (const auto& e : want.at("cells")) {
    const mos::MosReport::CellKey key{e.at("task"), mos::parse_system(e.at("system").get<std::string>()),
                                      e.at("question")};
    expect(report.cells.contains(key), "missing cell " + e.dump());
    const auto& got = report.cells.at(key);
    const bool ok = got.n == e.at("n").get<std::size_t>() && std::abs(got.mean - e.at("mean").get<double>()) < 1e-9 &&
                    std::abs(got.std - e.at("std").get<double>()) < 1e-9 &&
                    std::abs(got.ci95 - e.at("ci95").get<double>()) < 1e-9;
    expect(ok, "cell differs: " + e.dump());
  }

  expect(mos::format_pm(3.76, 0.08) == "3.76 ± 0.08", "format_pm(3.76, 0.08) = " + mos::format_pm(3.76, 0.08));
  mos::MosReport table;
  table.tasks = {"Spanish-English"};
  table.question_subset = {1, 2};
  table.systems[{"Spanish-English", mos::System::kGroundTruth}] = {3.88, 0.10, 0.05, 40};
  table.systems[{"Spanish-English", mos::System::kVanilla}] = {2.75, 0.12, 0.04, 40};
  table.systems[{"Spanish-English", mos::System::kCascade}] = {3.76, 0.08, 0.03, 40};
  const std::string md = reports::mos_markdown(table, reports::Spread::kStd);
  expect(md.find("| Spanish-English | 3.88 ± 0.10 | 2.75 ± 0.12 | **3.76 ± 0.08** |") != std::string::npos,
         "rendered table:\n" + md);
  return fmt::format("{} cells within 1e-9; renders 3.76 ± 0.08", report.cells.size());
}

// --- prosody ----------------------------------------------------------------

std::string prosody_flow() {
  Corpus c(10);
  double min_on = 1.0;
  double max_off = -1.0;
  for (const auto& u : c.corpus.manifest.utterances) {
    const AudioClip source = load_utterance_audio(u);
    const auto src_emb = c.backends.embed(source).value;
    PipelineConfig on = c.config;
    PipelineConfig off = c.config;
    off.preserve_prosody = false;
    const auto with = run_cascade(source, on, c.backends);
    const auto without = run_cascade(source, off, c.backends);
    min_on = std::min(min_on, metrics::cosine_similarity(src_emb, c.backends.embed(with.output_audio).value));
    max_off = std::max(max_off, metrics::cosine_similarity(src_emb, c.backends.embed(without.output_audio).value));
  }
  expect(min_on == 1.0, fmt::format("prosody on: min cosine {}", min_on));
  expect(max_off < 0.5, fmt::format("prosody off: max cosine {}", max_off));
  return fmt::format("10 clips: cosine 1.0 with prosody, max {:.3f} without", max_off);
}

// --- BLEU comparison table ----------------------------------------------------

std::string bleu_table() {
  testing::TempDir dir{"acceptance"};
  testing::write_file(dir / "bleu_r.json", R"([
    {"task": "Fisher Es-En", "bleu_r": 42.9, "source": "Translatotron 2"},
    {"task": "Fisher Es-En", "bleu_r": 39.9, "source": "S2UT"},
    {"task": "MuST-C En-De", "bleu_r": 30.2, "source": "ComSpeech"},
    {"task": "MuST-C En-Fr", "bleu_r": 40.8, "source": "ComSpeech"},
    {"task": "VoxPopuli Fr-En", "bleu_r": 20.3, "source": "Textless"}
  ])");
  auto rows = reports::load_bleu_reference(dir / "bleu_r.json");
  expect(rows.size() == 5, "expected five reference rows");
  // Synthetic measurements: above, below and equal to the reported values.
  const std::array<double, 5> measured{45.6, 37.25, 39.7, 40.8, 12.0};
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].bleu_c = measured[i];

  const std::string md = reports::bleu_comparison_markdown(rows);
  const std::array<std::string, 5> want{
      "| Fisher Es-En | 42.90 (Translatotron 2) | **45.60** |",
      "| Fisher Es-En | **39.90** (S2UT) | 37.25 |",
      "| MuST-C En-De | 30.20 (ComSpeech) | **39.70** |",
      "| MuST-C En-Fr | 40.80 (ComSpeech) | 40.80 |",
      "| VoxPopuli Fr-En | **20.30** (Textless) | 12.00 |",
  };
  std::istringstream lines(md);
  std::vector<std::string> body;
  for (std::string line; std::getline(lines, line);) body.push_back(line);
  expect(body.size() == 7, "table has " + std::to_string(body.size()) + " lines:\n" + md);
  for (std::size_t i = 0; i < want.size(); ++i) expect(body[i + 2] == want[i], "row " + body[i + 2]);
  return "five rows, bold on the larger value, none on ties";
}

// --- wire-protocol loopback -------------------------------------------------

int free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  socklen_t len = sizeof(addr);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    ::close(fd);
    throw Failure("cannot find a free port");
  }
  ::close(fd);
  return ntohs(addr.sin_port);
}

// `cascada serve-mock` on a background thread, stopped with SIGTERM.
class CliServer {
 public:
  explicit CliServer(std::vector<std::string> extra) : port_(free_port()) {
    std::vector<std::string> args{"cascada", "serve-mock", "--port", std::to_string(port_)};
    args.insert(args.end(), extra.begin(), extra.end());
    thread_ = std::thread([this, args] {
      code_ = cli::run(args, out_, err_);
      done_ = true;
    });
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (std::chrono::steady_clock::now() < deadline && !done_) {
      try {
        remote::health_check({url(), 0.5, 0, 0.0});
        return;
      } catch (const Error&) {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
    }
    thread_.join();
    throw Failure("serve-mock did not come up: " + err_.str());
  }
  ~CliServer() {
    if (!thread_.joinable()) return;
    std::raise(SIGTERM);
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  int port_;
  std::thread thread_;
  std::ostringstream out_, err_;
  std::atomic<int> code_{-1};
  std::atomic<bool> done_{false};
};

std::string wire_loopback() {
  Corpus c(12);
  BackendSelection sel;
  sel.kind = BackendKind::kRemote;
  sel.timeout_s = 5.0;
  sel.retries = 0;
  sel.backoff_s = 0.0;

  std::size_t compared = 0;
  {
    CliServer server({"--lexicon", c.corpus.lexicon_path.string()});
    for (const char* stage : {"asr", "mt", "tts", "vc", "embed"}) sel.urls[stage] = server.url();
    PipelineConfig remote_cfg = c.config;
    remote_cfg.backend = sel;
    remote_cfg.parallelism = 4;
    const auto remote_set = remote::make_remote_backends(sel, remote_cfg.stages_used());
    const auto local = run_batch(c.corpus.manifest.utterances, c.config, c.backends);
    const auto wired = run_batch(c.corpus.manifest.utterances, remote_cfg, remote_set);
    for (std::size_t i = 0; i < local.size(); ++i) {
      const auto& a = local[i];
      const auto& b = wired[i];
      expect(b.ok(), a.utterance_id + " failed over the wire: " + b.error.value_or(""));
      expect(a.transcript == b.transcript && a.translation == b.translation && a.tts_audio == b.tts_audio &&
                 a.output_audio == b.output_audio,
             a.utterance_id + " differs over the wire");
      expect(b.model_timings.contains("asr"), a.utterance_id + " lacks the server ASR timing");
      ++compared;
    }
    const AudioClip probe = load_utterance_audio(c.corpus.manifest.utterances[0]);
    expect(remote_set.embed(probe).value.vector == c.backends.embed(probe).value.vector, "embedding differs over the wire");
  }

  const int retries = 2;
  const AudioClip clip = load_utterance_audio(c.corpus.manifest.utterances[0]);
  auto expect_exhausted = [&](const std::string& url) {
    const remote::RemoteClient client({url, 5.0, retries, 0.01});
    try {
      client.transcribe(clip, kEs, {});
    } catch (const remote::RemoteError& e) {
      expect(e.attempts() == retries + 1, fmt::format("{} attempts", e.attempts()));
      expect(e.code() == ErrorCode::kRemote && e.remote_code() == "injected_fault",
             std::string("unexpected failure: ") + e.what());
      return;
    }
    throw Failure("request succeeded against an always-failing server");
  };
  {
    CliServer failing({"--fail-rate", "1.0"});
    expect_exhausted(failing.url());
  }
  MockServerOptions opts;
  opts.fail_rate = 1.0;
  MockServer counted(std::move(opts));
  counted.start();
  expect_exhausted(counted.url());
  expect(counted.request_count() == static_cast<uint64_t>(retries + 1),
         fmt::format("server saw {} requests", counted.request_count()));
  return fmt::format("{} clips identical over serve-mock; fail-rate 1.0 gives {} attempts", compared, retries + 1);
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<std::string()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"bleu-oracle", 1.0, bleu_oracle},
      {"wer-oracle", 30.0, wer_oracle},
      {"closed-loop-cascade", 10.0, closed_loop},
      {"noise-calibration", 30.0, noise_calibration},
      {"sampling-determinism", 30.0, sampling_determinism},
      {"mos-aggregation", 5.0, mos_aggregation},
      {"prosody-information-flow", 10.0, prosody_flow},
      {"bleu-comparison-table", 1.0, bleu_table},
      {"wire-protocol-loopback", 10.0, wire_loopback},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.check();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && elapsed > c.budget_s) {
      ok = false;
      detail = fmt::format("over budget ({:.2f} s > {:.0f} s); {}", elapsed, c.budget_s, detail);
    }
    if (!ok) ++failed;
    std::cout << fmt::format("{} {} ({:.2f} s): {}", ok ? "PASS" : "FAIL", c.name, elapsed, detail) << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed == 0 ? 0 : 1;
}
