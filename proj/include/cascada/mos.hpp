#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cascada/core.hpp"

namespace cascada::mos {

// Survey systems. CSV codes: gt, vanilla, crossvoice.
enum class System { kGroundTruth, kVanilla, kCascade };

std::string_view code(System s);
/// Column label: MOS-h, MOS-v, MOS-c.
std::string_view alias(System s);
System parse_system(std::string_view code);

// 1: voice similarity to the source, 2: naturalness, 3: emphasis and
// intonation similarity. Four-point scale; half steps mark "in between".
inline constexpr int kQuestions = 3;

struct SurveyResponse {
  std::string respondent_id;
  std::string clip_id;
  std::string task_name;
  System system = System::kCascade;
  int question = 1;
  double rating = 0.0;
};

/// Header `respondent_id,clip_id,task,system,question,rating`. Errors name
/// the 1-based line number. No data rows is an error ("no responses").
std::vector<SurveyResponse> parse_survey_csv(std::string_view content);
std::vector<SurveyResponse> load_survey(const std::filesystem::path& path);

/// True for 1, 1.5, ..., 4.
bool valid_rating(double rating);

struct CellStats {
  double mean = 0.0;
  double std = 0.0;   // sample std, k - 1 denominator; 0 for n == 1
  double ci95 = 0.0;  // 1.96 * std / sqrt(n)
  std::size_t n = 0;
};

CellStats cell_stats(std::span<const double> ratings);

/// Externally sourced ground-truth score for a task.
struct GtReference {
  std::string task;
  double mos_h = 0.0;
  std::string source;
};

/// JSON array of {"task", "mos_h", "source"?}.
std::vector<GtReference> load_gt_reference(const std::filesystem::path& path);

struct MosOptions {
  // Questions pooled into the per-system MOS-h/v/c figures and the headline.
  std::vector<int> question_subset{1, 2};
};

struct MosReport {
  using CellKey = std::tuple<std::string, System, int>;  // task, system, question
  using SystemKey = std::pair<std::string, System>;

  std::vector<std::string> tasks;  // first-seen order
  std::map<CellKey, CellStats> cells;
  // Pooled over question_subset.
  std::map<SystemKey, CellStats> systems;
  std::vector<int> question_subset;
  std::map<std::string, GtReference> gt_reference;
  // Unweighted mean of the cascade system's per-(task, question) cell means over
  // question_subset. Interpretive; see the report note.
  std::optional<double> headline_mos_c;

  /// MOS-h for a task: survey data if present, else the reference row.
  std::optional<CellStats> ground_truth(const std::string& task) const;
};

MosReport aggregate_mos(const std::vector<SurveyResponse>& responses, const MosOptions& options = {},
                        const std::vector<GtReference>& gt_reference = {});

/// "3.76 ± 0.08": two decimals each.
std::string format_pm(double mean, double spread);

}  // namespace cascada::mos
