#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fidelity/types.hpp"

namespace fidelity {

enum class EffectClass { Negligible, Small, Medium, Large };
std::string_view to_string(EffectClass c);

/// (mean_b - mean_a) / pooled SD, without small-sample correction.
/// Throws ValidationError for fewer than two values per side and
/// UndefinedEffectError when the pooled SD is zero.
double cohens_d(std::span<const double> a, std::span<const double> b);

/// |d| < 0.25 negligible, < 0.5 small, < 0.8 medium, otherwise large.
EffectClass classify_effect(double d);

/// One per-attempt value of one measure.
struct MeasureRow {
  std::string driver;
  Environment environment = Environment::Real;
  TaskKind task = TaskKind::Lct;
  int attempt = 1;
  std::string measure;
  double value = 0.0;
};

/// One subjective realism rating (fraction in [0, 1]).
struct RatingRow {
  std::string driver;
  Environment environment = Environment::Std;
  TaskKind task = TaskKind::Lct;
  double rating = 0.0;
};

struct EffectEntry {
  TaskKind task = TaskKind::Lct;
  std::string measure;
  Environment env_a = Environment::Real;
  Environment env_b = Environment::Std;
  double mean_a = 0.0, mean_b = 0.0;
  double sd_a = 0.0, sd_b = 0.0;
  std::size_t n_a = 0, n_b = 0;
  std::optional<double> d;  // absent when the pooled SD is zero
  std::optional<EffectClass> magnitude;
};

/// Per-environment mean realism rating of one task, with d against the rating baseline.
struct RatingSummary {
  TaskKind task = TaskKind::Lct;
  Environment environment = Environment::Std;
  double mean = 0.0;
  std::size_t n = 0;
  std::optional<double> d;
  std::optional<EffectClass> magnitude;
};

enum class Pooling { PerAttempt, PerDriver };

struct ComparisonConfig {
  Environment baseline = Environment::Real;
  Environment rating_baseline = Environment::Std;
  Pooling pooling = Pooling::PerAttempt;
};

struct EffectReport {
  std::vector<EffectEntry> entries;    // task order, then measure order, then environment
  std::vector<RatingSummary> ratings;  // task order, then environment
  Environment rating_baseline = Environment::Std;
  std::string provenance;
};

/// Fit-derived measure names in table order.
std::vector<std::string> model_measure_names(TaskKind task);
/// Full table order for a task: metrics, then model measures.
std::vector<std::string> report_measure_order(TaskKind task);
/// Row label used in rendered tables.
std::string measure_label(TaskKind task, std::string_view measure);

/// Groups rows by (task, measure, environment) and compares every non-baseline
/// environment to the baseline. Throws ReportError listing every (task, measure)
/// that has other environments but no baseline rows.
EffectReport build_comparison(std::span<const MeasureRow> rows, std::span<const RatingRow> ratings,
                              const ComparisonConfig& cfg = {});

enum class ReportFormat { Markdown, Csv };
std::optional<ReportFormat> parse_report_format(std::string_view text);

void render_report(std::ostream& out, const EffectReport& report, ReportFormat format);
std::string render_report(const EffectReport& report, ReportFormat format);

}  // namespace fidelity
