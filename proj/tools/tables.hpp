#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fidelity/attempts.hpp"
#include "fidelity/driver_model.hpp"
#include "fidelity/effect.hpp"
#include "fidelity/metrics.hpp"

namespace fidelity::cli {

struct MetricRow {
  std::string driver;
  Environment environment = Environment::Real;
  TaskKind task = TaskKind::Lct;
  int attempt = 1;
  Metric metric;
};

struct FitRow {
  std::string driver;
  Environment environment = Environment::Real;
  TaskKind task = TaskKind::Lct;
  int attempt = 1;
  ModelFit fit;
};

inline constexpr std::string_view kMetricHeader = "driver,environment,task,attempt,metric,value,unit";
inline constexpr std::string_view kFitHeader =
    "driver,environment,task,attempt,model,K_or_k,T_R,T_p,rms_error,r_squared,avg_adjustment_magnitude,n_adjustments";

std::string write_metric_rows(std::span<const MetricRow> rows);
std::vector<MetricRow> parse_metric_rows(std::string_view text);
std::string write_fit_rows(std::span<const FitRow> rows);
std::vector<FitRow> parse_fit_rows(std::string_view text);

/// Values in report form. Fit rows contribute only when their model is the
/// one tabulated for the task (continuous for LCT/SLX, intermittent for CLV).
std::vector<MeasureRow> measure_rows(std::span<const MetricRow> metrics, std::span<const FitRow> fits);

/// The model tabulated for a task.
ModelKind report_model(TaskKind task);

/// One realism rating per (driver, environment, task), taken from the attempts' source metadata.
std::vector<RatingRow> rating_rows(std::span<const AttemptSegment> attempts);

enum class PlotKind { YawRateVsSwa, Trajectory, SteeringTimeseries };
std::optional<PlotKind> parse_plot_kind(std::string_view text);

/// Comma-separated series grouped by environment, non-finite points skipped.
std::string plot_data(std::span<const AttemptSegment> attempts, PlotKind kind);

}  // namespace fidelity::cli
