#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fidelity/circle_estimate.hpp"
#include "fidelity/layout.hpp"
#include "fidelity/types.hpp"

namespace fidelity {

struct SegmentationConfig {
  double speed_on = 2.0;      // m/s, activity starts at or above this speed
  double speed_off = 0.5;     // m/s, activity ends below this speed
  double pad = 1.0;           // s added on both sides
  double min_duration = 5.0;  // s, shorter (padded) segments are dropped
};

enum class AnchorMethod { LateralThreshold, PeakMidpoint, CircleCentre };

std::string_view to_string(AnchorMethod method);
std::optional<AnchorMethod> parse_anchor_method(std::string_view text);
AnchorMethod anchor_method_for(TaskKind task);

struct AnchorPose {
  double t_anchor = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  AnchorMethod method = AnchorMethod::LateralThreshold;
};

/// One task attempt. Samples are in world coordinates until to_task_frame
/// has been applied (then `aligned` is true).
struct AttemptSegment {
  LogMeta source_meta;
  int attempt_index = 1;
  std::vector<TrajectorySample> samples;
  std::optional<AnchorPose> anchor;
  std::optional<int> cone_hits;  // recorded contact count, when the source logged hits
  bool aligned = false;
};

struct AnchorConfig {
  double lateral_threshold = 1.0;  // m, LCT rightward excursion
  double peak_smoothing = 0.2;     // s, SLX lateral smoothing window
  double peak_prominence = 0.5;    // m
  double circle_min_speed = 2.0;   // m/s, CLV samples used for the centre estimate
  int circle_triples = kDefaultCircleTriples;
};

/// Splits a uniformly sampled log into speed-activity segments (hysteresis
/// on/off, padded, merged when padding overlaps, short ones dropped).
/// Cone hits recorded in the log metadata are attributed to the segment
/// containing them. Throws ValidationError when the log's task differs from the layout's.
std::vector<AttemptSegment> segment_attempts(const DriveLog& log, const TaskLayout& layout,
                                             const SegmentationConfig& cfg = {});

/// Samples' lateral coordinate in the frame of the mean pose over the first second.
std::vector<double> initial_frame_lateral(const AttemptSegment& seg);

/// Locates the per-task anchor on a world-frame segment. Throws ExtractionError
/// naming the rule that failed.
AnchorPose locate_anchor(const AttemptSegment& seg, const TaskLayout& layout, std::uint64_t seed,
                         const AnchorConfig& cfg = {});

/// Rigid transform taking the anchor to the layout's reference pose.
AttemptSegment to_task_frame(const AttemptSegment& seg, const AnchorPose& anchor, const TaskLayout& layout);

/// Seed of the anchor stream for one attempt, independent of processing order.
std::uint64_t attempt_seed(std::uint64_t root, const LogMeta& meta, int attempt_index);

/// segment -> anchor -> alignment for every attempt in the log.
std::vector<AttemptSegment> extract_attempts(const DriveLog& log, const TaskLayout& layout, std::uint64_t seed,
                                             const SegmentationConfig& seg_cfg = {}, const AnchorConfig& anchor_cfg = {});

/// Attempt files are drive logs carrying attempt metadata keys.
DriveLog attempt_to_log(const AttemptSegment& seg);
AttemptSegment attempt_from_log(const DriveLog& log);

}  // namespace fidelity
