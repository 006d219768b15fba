#include "cascada/reports.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "cascada/metrics.hpp"

namespace cascada::reports {
namespace {

std::string num(double v) { return fmt::format("{:.2f}", v); }

std::string bold_if(bool bold, const std::string& cell) { return bold ? "**" + cell + "**" : cell; }

std::string_view system_heading(mos::System s) {
  switch (s) {
    case mos::System::kGroundTruth: return "MOS-h (GT)";
    case mos::System::kVanilla: return "MOS-v (vanilla TTS)";
    case mos::System::kCascade: return "MOS-c (prosody transfer)";
  }
  return "?";
}

json cell_json(const mos::CellStats& c) {
  return {{"mean", c.mean}, {"std", c.std}, {"ci95_halfwidth", c.ci95}, {"n", c.n}};
}

}  // namespace

json to_json(const metrics::BleuScore& b) {
  return {{"score", b.score},         {"precisions", b.precisions}, {"matches", b.matches},
          {"totals", b.totals},       {"brevity_penalty", b.brevity_penalty},
          {"hyp_len", b.hyp_len},     {"ref_len", b.ref_len}};
}

json to_json(const metrics::WerScore& w) {
  return {{"wer", w.wer},
          {"substitutions", w.substitutions},
          {"deletions", w.deletions},
          {"insertions", w.insertions},
          {"ref_words", w.ref_words}};
}

json to_json(const metrics::LatencyStats& s) {
  return {{"per_clip_mean_s", s.per_clip_mean_s},
          {"duration_weighted_s", s.duration_weighted_s},
          {"rtf", s.rtf},
          {"n", s.n}};
}

json to_json(const harness::SamplingSummary& s) {
  return {{"per_iteration_scores", s.per_iteration_scores}, {"mean", s.mean}, {"std", s.std}};
}

json to_json(const TranslationResult& r) {
  json j = {{"utterance_id", r.utterance_id}};
  if (r.error) {
    j["error"] = *r.error;
    return j;
  }
  j["transcript"] = r.transcript;
  j["translation"] = r.translation;
  j["stage_timings"] = r.stage_timings;
  if (!r.model_timings.empty()) j["model_timings"] = r.model_timings;
  j["total_latency_s"] = r.total_latency_s;
  j["vc_applied"] = r.stage_timings.contains("vc");
  j["output_speaker_tag"] = r.output_audio.speaker_tag ? json(*r.output_audio.speaker_tag) : json(nullptr);
  j["output_duration_s"] = r.output_audio.duration_s();
  return j;
}

json s2st_json(const harness::S2stBleuReport& r) {
  json iterations = json::array();
  for (std::size_t j = 0; j < r.per_iteration.size(); ++j) {
    iterations.push_back({{"iteration", j}, {"clip_ids", r.subsets[j]}, {"bleu", to_json(r.per_iteration[j])}});
  }
  return {
      {"task", r.task_name},
      {"source_lang", r.source_lang.str()},
      {"target_lang", r.target_lang.str()},
      {"preserve_prosody", r.preserve_prosody},
      {"sampling", {{"clips_per_iteration", r.plan.clips_per_iteration}, {"iterations", r.plan.iterations},
                    {"seed", r.plan.seed}}},
      {"eval_asr", {{"name", r.eval_asr_name}, {"temperature", r.eval_decode.temperature},
                    {"strategy", to_string(r.eval_decode.strategy)}}},
      {"tokenizer", metrics::kTokenizerName},
      {"iterations", iterations},
      {"summary", to_json(r.summary)},
      {"bleu_c", r.summary.mean},
      {"std_in_reference_band", r.std_in_reference_band()},
      {"reference_band", {harness::kReferenceStdLow, harness::kReferenceStdHigh}},
  };
}

std::string s2st_markdown(const harness::S2stBleuReport& r) {
  std::string md = fmt::format("# Back-transcription BLEU: {}\n\n", r.task_name);
  md += fmt::format("Language pair {}-{}, {} clips x {} iterations, seed {}. ", r.source_lang.str(),
                    r.target_lang.str(), r.plan.clips_per_iteration, r.plan.iterations, r.plan.seed);
  md += fmt::format("Evaluation ASR `{}` (temperature {}, {}). Tokenizer `{}`.\n\n", r.eval_asr_name,
                    r.eval_decode.temperature, to_string(r.eval_decode.strategy), metrics::kTokenizerName);
  md += "| Iteration | BLEU | BP | p1 | p2 | p3 | p4 |\n|---|---|---|---|---|---|---|\n";
  for (std::size_t j = 0; j < r.per_iteration.size(); ++j) {
    const auto& b = r.per_iteration[j];
    md += fmt::format("| {} | {} | {:.4f} | {:.4f} | {:.4f} | {:.4f} | {:.4f} |\n", j + 1, num(b.score),
                      b.brevity_penalty, b.precisions[0], b.precisions[1], b.precisions[2], b.precisions[3]);
  }
  md += fmt::format("\n**BLEU-c: {}**\n\n", mos::format_pm(r.summary.mean, r.summary.std));
  md += fmt::format("Std {} the reference band ({}, {}).\n", r.std_in_reference_band() ? "falls inside" : "falls outside",
                    harness::kReferenceStdLow, harness::kReferenceStdHigh);
  return md;
}

json mos_json(const mos::MosReport& report) {
  json cells = json::array();
  for (const auto& [key, stats] : report.cells) {
    json c = cell_json(stats);
    c["task"] = std::get<0>(key);
    c["system"] = mos::code(std::get<1>(key));
    c["question"] = std::get<2>(key);
    cells.push_back(std::move(c));
  }
  json tasks = json::array();
  for (const auto& task : report.tasks) {
    json t = {{"task", task}};
    for (auto s : {mos::System::kGroundTruth, mos::System::kVanilla, mos::System::kCascade}) {
      if (s == mos::System::kGroundTruth) {
        if (auto gt = report.ground_truth(task)) {
          t["MOS-h"] = cell_json(*gt);
          if (!report.systems.contains({task, s})) {
            t["MOS-h"]["source"] = report.gt_reference.at(task).source;
          }
        }
        continue;
      }
      if (auto it = report.systems.find({task, s}); it != report.systems.end()) {
        t[std::string(mos::alias(s))] = cell_json(it->second);
      }
    }
    tasks.push_back(std::move(t));
  }
  json j = {{"question_subset", report.question_subset}, {"cells", cells}, {"tasks", tasks}};
  j["headline_mos_c"] = report.headline_mos_c ? json(*report.headline_mos_c) : json(nullptr);
  j["headline_note"] =
      "unweighted mean of MOS-c cell means over tasks and the question subset; an interpretation, not a "
      "published definition";
  return j;
}

std::string mos_markdown(const mos::MosReport& report, Spread spread) {
  const char* label = spread == Spread::kStd ? "mean ± std" : "mean ± 95% CI half-width";
  std::string md = fmt::format("# MOS by task ({}, questions", label);
  for (int q : report.question_subset) md += fmt::format(" {}", q);
  md += ")\n\n";
  md += fmt::format("| Translation Task | {} | {} | {} |\n|---|---|---|---|\n", system_heading(mos::System::kGroundTruth),
                    system_heading(mos::System::kVanilla), system_heading(mos::System::kCascade));

  auto render = [&](const mos::CellStats& c, bool reference_only) {
    if (reference_only) return num(c.mean);
    return mos::format_pm(c.mean, spread == Spread::kStd ? c.std : c.ci95);
  };

  for (const auto& task : report.tasks) {
    std::optional<mos::CellStats> cells[3];
    bool reference_only = false;
    cells[0] = report.ground_truth(task);
    reference_only = cells[0] && !report.systems.contains({task, mos::System::kGroundTruth});
    if (auto it = report.systems.find({task, mos::System::kVanilla}); it != report.systems.end()) cells[1] = it->second;
    if (auto it = report.systems.find({task, mos::System::kCascade}); it != report.systems.end()) cells[2] = it->second;

    // Ground truth is a ceiling, not a competitor; only the synthesized systems are bolded.
    double best = -1.0;
    for (int k = 1; k < 3; ++k) {
      if (cells[k]) best = std::max(best, cells[k]->mean);
    }
    md += "| " + task;
    for (int k = 0; k < 3; ++k) {
      md += " | ";
      if (!cells[k]) {
        md += "n/a";
        continue;
      }
      md += bold_if(k > 0 && cells[k]->mean == best, render(*cells[k], k == 0 && reference_only));
    }
    md += " |\n";
  }
  if (report.headline_mos_c) {
    md += fmt::format("\nHeadline MOS-c: {} (unweighted mean over tasks and questions", num(*report.headline_mos_c));
    for (int q : report.question_subset) md += fmt::format(" {}", q);
    md += "; interpretive).\n";
  }
  return md;
}

std::vector<BleuComparisonRow> load_bleu_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read BLEU reference file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kValidation, "BLEU reference file: " + std::string(e.what()));
  }
  if (!j.is_array()) throw Error(ErrorCode::kValidation, "BLEU reference file must hold a JSON array");
  std::vector<BleuComparisonRow> rows;
  for (const auto& item : j) {
    try {
      BleuComparisonRow r;
      r.task = item.at("task").get<std::string>();
      r.bleu_r = item.at("bleu_r").get<double>();
      r.source = item.value("source", std::string());
      rows.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kValidation, std::string("BLEU reference row: ") + e.what());
    }
  }
  return rows;
}

json bleu_comparison_json(const std::vector<BleuComparisonRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"task", r.task},
                   {"bleu_r", r.bleu_r},
                   {"source", r.source},
                   {"bleu_c", r.bleu_c ? json(*r.bleu_c) : json(nullptr)}});
  }
  return out;
}

std::string bleu_comparison_markdown(const std::vector<BleuComparisonRow>& rows) {
  std::string md = "| Task | BLEU-r (reported) | BLEU-c (this cascade) |\n|---|---|---|\n";
  for (const auto& r : rows) {
    const std::string source = r.source.empty() ? std::string() : " (" + r.source + ")";
    if (!r.bleu_c) {
      md += fmt::format("| {} | {}{} | n/a |\n", r.task, num(r.bleu_r), source);
      continue;
    }
    md += fmt::format("| {} | {}{} | {} |\n", r.task, bold_if(r.bleu_r > *r.bleu_c, num(r.bleu_r)), source,
                      bold_if(*r.bleu_c > r.bleu_r, num(*r.bleu_c)));
  }
  return md;
}

LatencyColumn parse_latency_column(std::string_view name) {
  if (name == "per_clip_mean") return LatencyColumn::kPerClipMean;
  if (name == "duration_weighted") return LatencyColumn::kDurationWeighted;
  if (name == "rtf") return LatencyColumn::kRtf;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown latency column '" + std::string(name) + "' (per_clip_mean, duration_weighted, rtf)");
}

std::string_view to_string(LatencyColumn c) {
  switch (c) {
    case LatencyColumn::kPerClipMean: return "per_clip_mean";
    case LatencyColumn::kDurationWeighted: return "duration_weighted";
    case LatencyColumn::kRtf: return "rtf";
  }
  return "?";
}

namespace {

double pick(const metrics::LatencyStats& s, LatencyColumn c) {
  switch (c) {
    case LatencyColumn::kPerClipMean: return s.per_clip_mean_s;
    case LatencyColumn::kDurationWeighted: return s.duration_weighted_s;
    case LatencyColumn::kRtf: return s.rtf;
  }
  return 0.0;
}

}  // namespace

json asr_bench_json(const std::vector<harness::AsrBenchRow>& rows, LatencyColumn column) {
  json out = {{"latency_column", to_string(column)}, {"tokenizer", metrics::kTokenizerName}};
  json arr = json::array();
  for (const auto& r : rows) {
    json j = {{"model", r.model}};
    if (r.failed()) {
      j["status"] = "FAILED";
      j["error"] = *r.failure;
    } else {
      j["status"] = "ok";
      j["wer"] = to_json(r.wer);
      j["wer_percent"] = 100.0 * r.wer.wer;
      j["latency"] = to_json(r.latency);
      j["average_latency_s"] = pick(r.latency, column);
      if (r.model_latency) j["model_latency"] = to_json(*r.model_latency);
    }
    arr.push_back(std::move(j));
  }
  out["rows"] = std::move(arr);
  return out;
}

std::string asr_bench_markdown(const std::vector<harness::AsrBenchRow>& rows, LatencyColumn column) {
  std::string md = fmt::format("Average Latency column: `{}`. Tokenizer `{}`.\n\n", to_string(column),
                               metrics::kTokenizerName);
  md += "| Model | WER (%) | Average Latency (s) | Per-clip mean (s) | Duration-weighted (s) | RTF |\n";
  md += "|---|---|---|---|---|---|\n";
  double best_wer = 1e300;
  for (const auto& r : rows) {
    if (!r.failed()) best_wer = std::min(best_wer, r.wer.wer);
  }
  for (const auto& r : rows) {
    if (r.failed()) {
      md += fmt::format("| {} | FAILED | FAILED | - | - | - |\n", r.model);
      continue;
    }
    md += fmt::format("| {} | {} | {:.3f} | {:.3f} | {:.3f} | {:.4f} |\n", r.model,
                      bold_if(r.wer.wer == best_wer, num(100.0 * r.wer.wer)), pick(r.latency, column),
                      r.latency.per_clip_mean_s, r.latency.duration_weighted_s, r.latency.rtf);
  }
  return md;
}

BleuMatrixEntry matrix_entry(const LanguageCode& source, const LanguageCode& target,
                             const harness::SamplingSummary& summary) {
  const LanguageCode en("en");
  if (target == en) return {source.str(), "X-en", summary.mean, summary.std};
  if (source == en) return {target.str(), "en-X", summary.mean, summary.std};
  throw Error(ErrorCode::kInvalidArgument,
              "BLEU matrix needs English on one side, got " + source.str() + "-" + target.str());
}

std::string bleu_matrix_csv(std::vector<BleuMatrixEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.direction, a.language) < std::tie(b.direction, b.language);
  });
  std::string csv = "language,direction,mean_bleu,std\n";
  for (const auto& e : entries) {
    csv += fmt::format("{},{},{},{}\n", e.language, e.direction, e.mean_bleu, e.std);
  }
  return csv;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

void write_report(const std::filesystem::path& dir, const std::string& name, const json& data,
                  const std::string& markdown) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / (name + ".json"), data.dump(2) + "\n");
  write_text(dir / (name + ".md"), markdown);
}

}  // namespace cascada::reports
