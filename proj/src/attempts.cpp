#include "fidelity/attempts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "fidelity/drive_log.hpp"
#include "fidelity/errors.hpp"
#include "fidelity/random.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

std::string_view to_string(AnchorMethod method) {
  switch (method) {
    case AnchorMethod::LateralThreshold: return "LATERAL_THRESHOLD";
    case AnchorMethod::PeakMidpoint: return "PEAK_MIDPOINT";
    case AnchorMethod::CircleCentre: return "CIRCLE_CENTRE";
  }
  return "LATERAL_THRESHOLD";
}

std::optional<AnchorMethod> parse_anchor_method(std::string_view text) {
  for (auto m : {AnchorMethod::LateralThreshold, AnchorMethod::PeakMidpoint, AnchorMethod::CircleCentre}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

AnchorMethod anchor_method_for(TaskKind task) {
  switch (task) {
    case TaskKind::Lct: return AnchorMethod::LateralThreshold;
    case TaskKind::Slx: return AnchorMethod::PeakMidpoint;
    case TaskKind::Clv: return AnchorMethod::CircleCentre;
  }
  return AnchorMethod::LateralThreshold;
}

namespace {

struct Span {
  double t0;
  double t1;
};

/// Mean position and circular-mean heading over the first second.
Pose2 initial_mean_pose(const std::vector<TrajectorySample>& samples) {
  const double t_end = samples.front().t + 1.0;
  double sx = 0.0, sy = 0.0, sc = 0.0, ss = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (n > 0 && s.t >= t_end) break;
    sx += s.x;
    sy += s.y;
    sc += std::cos(s.heading);
    ss += std::sin(s.heading);
    ++n;
  }
  return {sx / n, sy / n, std::atan2(ss, sc)};
}

std::map<std::string, std::string> attempt_extras(const LogMeta& meta) {
  auto extra = meta.extra;
  extra.erase(std::string(kConeHitEventsKey));
  return extra;
}

double parse_extra_number(const LogMeta& meta, const std::string& key) {
  auto it = meta.extra.find(key);
  if (it == meta.extra.end()) throw ValidationError("attempt file is missing metadata '" + key + "'");
  double v = 0.0;
  const auto& s = it->second;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError("attempt metadata '" + key + "' is not a number");
  }
  return v;
}

}  // namespace

std::vector<AttemptSegment> segment_attempts(const DriveLog& log, const TaskLayout& layout,
                                             const SegmentationConfig& cfg) {
  if (log.meta.task != layout.task) {
    throw ValidationError("log task " + std::string(to_string(log.meta.task)) + " does not match layout task " +
                          std::string(to_string(layout.task)));
  }
  const auto& samples = log.samples;
  std::vector<Span> active;
  bool on = false;
  double start = 0.0, last = 0.0;
  for (const auto& s : samples) {
    if (!on && s.speed >= cfg.speed_on) {
      on = true;
      start = s.t;
    } else if (on && s.speed < cfg.speed_off) {
      on = false;
      active.push_back({start, last});
    }
    last = s.t;
  }
  if (on) active.push_back({start, last});
  if (samples.empty()) return {};

  // Pad, clamp to the log and merge segments whose padding overlaps.
  const double t_first = samples.front().t, t_last = samples.back().t;
  std::vector<Span> padded;
  for (const auto& a : active) {
    Span p{std::max(t_first, a.t0 - cfg.pad), std::min(t_last, a.t1 + cfg.pad)};
    if (!padded.empty() && p.t0 <= padded.back().t1) {
      padded.back().t1 = std::max(padded.back().t1, p.t1);
    } else {
      padded.push_back(p);
    }
  }

  std::optional<std::vector<double>> hit_times;
  if (auto it = log.meta.extra.find(std::string(kConeHitEventsKey)); it != log.meta.extra.end()) {
    hit_times = decode_event_times(it->second);
  }

  std::vector<AttemptSegment> out;
  for (const auto& p : padded) {
    if (p.t1 - p.t0 < cfg.min_duration) continue;
    AttemptSegment seg;
    seg.source_meta = log.meta;
    seg.source_meta.extra = attempt_extras(log.meta);
    seg.attempt_index = static_cast<int>(out.size()) + 1;
    for (const auto& s : samples) {
      if (s.t >= p.t0 && s.t <= p.t1) seg.samples.push_back(s);
    }
    if (hit_times) {
      seg.cone_hits = static_cast<int>(
          std::count_if(hit_times->begin(), hit_times->end(), [&p](double t) { return t >= p.t0 && t <= p.t1; }));
    }
    out.push_back(std::move(seg));
  }
  return out;
}

std::vector<double> initial_frame_lateral(const AttemptSegment& seg) {
  const Pose2 ref = initial_mean_pose(seg.samples);
  const double c = std::cos(ref.heading), s = std::sin(ref.heading);
  std::vector<double> lateral;
  lateral.reserve(seg.samples.size());
  for (const auto& p : seg.samples) lateral.push_back(-s * (p.x - ref.x) + c * (p.y - ref.y));
  return lateral;
}

AnchorPose locate_anchor(const AttemptSegment& seg, const TaskLayout& layout, std::uint64_t seed,
                         const AnchorConfig& cfg) {
  if (seg.samples.empty()) throw ExtractionError("cannot locate an anchor in an empty segment");
  const TaskKind task = layout.task;
  AnchorPose anchor;
  anchor.method = anchor_method_for(task);

  if (task == TaskKind::Lct) {
    const Pose2 ref = initial_mean_pose(seg.samples);
    const auto lateral = initial_frame_lateral(seg);
    for (std::size_t i = 0; i < lateral.size(); ++i) {
      // The first-second mean lateral position is zero in this frame; rightward is negative.
      if (-lateral[i] > cfg.lateral_threshold) {
        anchor.t_anchor = seg.samples[i].t;
        anchor.x = seg.samples[i].x;
        anchor.y = seg.samples[i].y;
        anchor.heading = ref.heading;
        return anchor;
      }
    }
    throw ExtractionError("LATERAL_THRESHOLD anchor: no rightward lateral excursion beyond " +
                          format_number(cfg.lateral_threshold) + " m");
  }

  if (task == TaskKind::Slx) {
    const Pose2 ref = initial_mean_pose(seg.samples);
    const double rate = seg.source_meta.sample_rate;
    const auto smooth = moving_average(initial_frame_lateral(seg), half_window_samples(cfg.peak_smoothing, rate));
    const auto left = find_maxima(smooth, cfg.peak_prominence);
    const auto right = find_minima(smooth, cfg.peak_prominence);
    if (left.empty()) throw ExtractionError("PEAK_MIDPOINT anchor: no leftward lateral peak found");
    const std::size_t il = left.front().index;
    auto it = std::find_if(right.begin(), right.end(), [il](const Peak& p) { return p.index > il; });
    if (it == right.end()) throw ExtractionError("PEAK_MIDPOINT anchor: no rightward peak after the first leftward peak");
    const std::size_t ir = it->index;
    const auto& a = seg.samples[il];
    const auto& b = seg.samples[ir];
    anchor.t_anchor = 0.5 * (a.t + b.t);
    // Position at the time midpoint, interpolated between neighbouring samples.
    std::size_t k = il;
    while (k + 1 < ir && seg.samples[k + 1].t <= anchor.t_anchor) ++k;
    const auto& p = seg.samples[k];
    const auto& q = seg.samples[std::min(k + 1, ir)];
    const double f = q.t > p.t ? (anchor.t_anchor - p.t) / (q.t - p.t) : 0.0;
    anchor.x = p.x + f * (q.x - p.x);
    anchor.y = p.y + f * (q.y - p.y);
    anchor.heading = ref.heading;
    return anchor;
  }

  std::vector<Point2> points;
  for (const auto& s : seg.samples) {
    if (s.speed > cfg.circle_min_speed) points.push_back({s.x, s.y});
  }
  if (points.size() < 3) throw ExtractionError("CIRCLE_CENTRE anchor: fewer than 3 moving samples");
  CircleEstimate est;
  try {
    est = estimate_circle_centre(points, cfg.circle_triples, seed);
  } catch (const EstimationError& e) {
    throw ExtractionError(std::string("CIRCLE_CENTRE anchor: ") + e.what());
  }
  anchor.t_anchor = seg.samples.front().t;
  anchor.x = est.centre_x;
  anchor.y = est.centre_y;
  anchor.heading = 0.0;
  return anchor;
}

AttemptSegment to_task_frame(const AttemptSegment& seg, const AnchorPose& anchor, const TaskLayout& layout) {
  const Pose2& ref = layout.reference_pose;
  const double rot = ref.heading - anchor.heading;
  const double c = std::cos(rot), s = std::sin(rot);
  AttemptSegment out = seg;
  for (auto& p : out.samples) {
    const double dx = p.x - anchor.x, dy = p.y - anchor.y;
    p.x = ref.x + c * dx - s * dy;
    p.y = ref.y + s * dx + c * dy;
    p.heading = wrap_angle(p.heading + rot);
  }
  out.anchor = anchor;
  out.aligned = true;
  return out;
}

std::uint64_t attempt_seed(std::uint64_t root, const LogMeta& meta, int attempt_index) {
  return stream_seed(root, {hash_text(meta.driver_id), static_cast<std::uint64_t>(meta.environment),
                            static_cast<std::uint64_t>(meta.task), static_cast<std::uint64_t>(attempt_index)});
}

std::vector<AttemptSegment> extract_attempts(const DriveLog& log, const TaskLayout& layout, std::uint64_t seed,
                                             const SegmentationConfig& seg_cfg, const AnchorConfig& anchor_cfg) {
  auto segments = segment_attempts(log, layout, seg_cfg);
  std::vector<AttemptSegment> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) {
    const auto anchor = locate_anchor(seg, layout, attempt_seed(seed, seg.source_meta, seg.attempt_index), anchor_cfg);
    out.push_back(to_task_frame(seg, anchor, layout));
  }
  return out;
}

DriveLog attempt_to_log(const AttemptSegment& seg) {
  DriveLog log;
  log.meta = seg.source_meta;
  log.meta.extra["attempt_index"] = std::to_string(seg.attempt_index);
  log.meta.extra["frame"] = seg.aligned ? "task" : "world";
  if (seg.anchor) {
    log.meta.extra["anchor_t"] = format_number(seg.anchor->t_anchor);
    log.meta.extra["anchor_method"] = std::string(to_string(seg.anchor->method));
    log.meta.extra["anchor_x"] = format_number(seg.anchor->x);
    log.meta.extra["anchor_y"] = format_number(seg.anchor->y);
    log.meta.extra["anchor_heading"] = format_number(seg.anchor->heading);
  }
  if (seg.cone_hits) log.meta.extra["cone_hits"] = std::to_string(*seg.cone_hits);
  log.samples = seg.samples;
  return log;
}

AttemptSegment attempt_from_log(const DriveLog& log) {
  AttemptSegment seg;
  seg.source_meta = log.meta;
  auto& extra = seg.source_meta.extra;
  const double index = parse_extra_number(log.meta, "attempt_index");
  if (index < 1 || index != std::floor(index)) throw ValidationError("attempt_index must be an integer >= 1");
  seg.attempt_index = static_cast<int>(index);
  if (auto it = extra.find("frame"); it != extra.end()) seg.aligned = it->second == "task";
  if (auto it = extra.find("anchor_method"); it != extra.end()) {
    auto method = parse_anchor_method(it->second);
    if (!method) throw ValidationError("unknown anchor_method '" + it->second + "'");
    AnchorPose a;
    a.method = *method;
    a.t_anchor = parse_extra_number(log.meta, "anchor_t");
    a.x = parse_extra_number(log.meta, "anchor_x");
    a.y = parse_extra_number(log.meta, "anchor_y");
    a.heading = parse_extra_number(log.meta, "anchor_heading");
    seg.anchor = a;
  }
  if (extra.count("cone_hits")) {
    const double hits = parse_extra_number(log.meta, "cone_hits");
    if (hits < 0 || hits != std::floor(hits)) throw ValidationError("cone_hits must be a non-negative integer");
    seg.cone_hits = static_cast<int>(hits);
  }
  for (const char* key : {"attempt_index", "frame", "anchor_t", "anchor_method", "anchor_x", "anchor_y",
                          "anchor_heading", "cone_hits"}) {
    extra.erase(key);
  }
  seg.samples = log.samples;
  if (seg.samples.empty()) throw ValidationError("attempt file has no samples");
  return seg;
}

}  // namespace fidelity
