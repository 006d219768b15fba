#include "cascada/mos.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

namespace cascada::mos {
namespace {

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kValidation, "survey line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// RFC 4180 style: commas separate, double quotes group, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) bad_line(line_no, "unterminated quote");
  fields.emplace_back(trim(cur));
  return fields;
}

}  // namespace

std::string_view code(System s) {
  switch (s) {
    case System::kGroundTruth: return "gt";
    case System::kVanilla: return "vanilla";
    case System::kCascade: return "crossvoice";
  }
  return "?";
}

std::string_view alias(System s) {
  switch (s) {
    case System::kGroundTruth: return "MOS-h";
    case System::kVanilla: return "MOS-v";
    case System::kCascade: return "MOS-c";
  }
  return "?";
}

System parse_system(std::string_view c) {
  if (c == "gt") return System::kGroundTruth;
  if (c == "vanilla") return System::kVanilla;
  if (c == "crossvoice") return System::kCascade;
  throw Error(ErrorCode::kValidation, "unknown system code '" + std::string(c) + "' (expected gt, vanilla, crossvoice)");
}

bool valid_rating(double rating) {
  if (!std::isfinite(rating) || rating < 1.0 || rating > 4.0) return false;
  const double doubled = rating * 2.0;
  return doubled == std::round(doubled);
}

std::vector<SurveyResponse> parse_survey_csv(std::string_view content) {
  static const std::vector<std::string> kHeader{"respondent_id", "clip_id", "task", "system", "question", "rating"};
  std::vector<SurveyResponse> out;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, line_no);

    if (!header_seen) {
      if (fields != kHeader) bad_line(line_no, "expected header 'respondent_id,clip_id,task,system,question,rating'");
      header_seen = true;
      continue;
    }
    if (fields.size() != kHeader.size()) {
      bad_line(line_no, "expected 6 fields, got " + std::to_string(fields.size()));
    }

    SurveyResponse r;
    r.respondent_id = fields[0];
    r.clip_id = fields[1];
    r.task_name = fields[2];
    if (r.task_name.empty()) bad_line(line_no, "empty task");
    try {
      r.system = parse_system(fields[3]);
    } catch (const Error& e) {
      bad_line(line_no, e.what());
    }
    if (fields[4] == "1" || fields[4] == "2" || fields[4] == "3") {
      r.question = fields[4][0] - '0';
    } else {
      bad_line(line_no, "unknown question '" + fields[4] + "' (expected 1, 2 or 3)");
    }
    const std::string& text = fields[5];
    double rating = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), rating);
    if (ec != std::errc() || ptr != text.data() + text.size()) bad_line(line_no, "rating '" + text + "' is not a number");
    if (!valid_rating(rating)) {
      bad_line(line_no, "invalid rating " + text + " (must be a half step between 1 and 4)");
    }
    r.rating = rating;
    out.push_back(std::move(r));
  }
  if (out.empty()) throw Error(ErrorCode::kValidation, "no responses");
  return out;
}

std::vector<SurveyResponse> load_survey(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read survey " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_survey_csv(content);
}

CellStats cell_stats(std::span<const double> ratings) {
  if (ratings.empty()) throw Error(ErrorCode::kInvalidArgument, "cell_stats: no ratings");
  CellStats c;
  c.n = ratings.size();
  const auto n = static_cast<double>(c.n);
  c.mean = std::accumulate(ratings.begin(), ratings.end(), 0.0) / n;
  if (c.n > 1) {
    double ss = 0.0;
    for (double r : ratings) ss += (r - c.mean) * (r - c.mean);
    c.std = std::sqrt(ss / (n - 1.0));
  }
  c.ci95 = 1.96 * c.std / std::sqrt(n);
  return c;
}

std::vector<GtReference> load_gt_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read GT reference " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kValidation, "GT reference " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::kValidation, "GT reference must be a JSON array");
  std::vector<GtReference> out;
  for (const auto& row : j) {
    try {
      GtReference g;
      g.task = row.at("task").get<std::string>();
      g.mos_h = row.at("mos_h").get<double>();
      if (row.contains("source")) g.source = row.at("source").get<std::string>();
      out.push_back(std::move(g));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kValidation, std::string("GT reference row: ") + e.what());
    }
  }
  return out;
}

std::optional<CellStats> MosReport::ground_truth(const std::string& task) const {
  if (auto it = systems.find({task, System::kGroundTruth}); it != systems.end()) return it->second;
  if (auto it = gt_reference.find(task); it != gt_reference.end()) {
    CellStats c;
    c.mean = it->second.mos_h;
    return c;
  }
  return std::nullopt;
}

MosReport aggregate_mos(const std::vector<SurveyResponse>& responses, const MosOptions& options,
                        const std::vector<GtReference>& gt_reference) {
  if (responses.empty()) throw Error(ErrorCode::kValidation, "no responses");
  for (int q : options.question_subset) {
    if (q < 1 || q > kQuestions) throw Error(ErrorCode::kInvalidArgument, "question subset entries must be 1..3");
  }

  MosReport report;
  report.question_subset = options.question_subset;
  std::map<MosReport::CellKey, std::vector<double>> cell_ratings;
  std::map<MosReport::SystemKey, std::vector<double>> system_ratings;
  auto in_subset = [&](int q) {
    return std::find(options.question_subset.begin(), options.question_subset.end(), q) !=
           options.question_subset.end();
  };

  for (const auto& r : responses) {
    if (!valid_rating(r.rating)) throw Error(ErrorCode::kValidation, "invalid rating " + std::to_string(r.rating));
    if (std::find(report.tasks.begin(), report.tasks.end(), r.task_name) == report.tasks.end()) {
      report.tasks.push_back(r.task_name);
    }
    cell_ratings[{r.task_name, r.system, r.question}].push_back(r.rating);
    if (in_subset(r.question)) system_ratings[{r.task_name, r.system}].push_back(r.rating);
  }
  for (const auto& g : gt_reference) {
    report.gt_reference[g.task] = g;
    if (std::find(report.tasks.begin(), report.tasks.end(), g.task) == report.tasks.end()) {
      report.tasks.push_back(g.task);
    }
  }

  for (const auto& [key, ratings] : cell_ratings) report.cells[key] = cell_stats(ratings);
  for (const auto& [key, ratings] : system_ratings) report.systems[key] = cell_stats(ratings);

  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [key, stats] : report.cells) {
    if (std::get<1>(key) == System::kCascade && in_subset(std::get<2>(key))) {
      sum += stats.mean;
      ++count;
    }
  }
  if (count > 0) report.headline_mos_c = sum / static_cast<double>(count);
  return report;
}

std::string format_pm(double mean, double spread) { return fmt::format("{:.2f} ± {:.2f}", mean, spread); }

}  // namespace cascada::mos
