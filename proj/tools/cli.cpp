#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "fidelity/attempts.hpp"
#include "fidelity/cueing.hpp"
#include "fidelity/drive_log.hpp"
#include "fidelity/driver_model.hpp"
#include "fidelity/effect.hpp"
#include "fidelity/errors.hpp"
#include "fidelity/friction_grid.hpp"
#include "fidelity/layout.hpp"
#include "fidelity/metrics.hpp"
#include "fidelity/scenario.hpp"
#include "manifest.hpp"
#include "tables.hpp"

namespace fidelity::cli {

namespace fs = std::filesystem;

namespace {

enum class Verbosity { Quiet, Error, Warn, Info, Debug };

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(&err) {
    const char* env = std::getenv("FIDELITY_LOG");
    const std::string v = env ? env : "";
    if (v == "quiet") level_ = Verbosity::Quiet;
    else if (v == "error") level_ = Verbosity::Error;
    else if (v == "info") level_ = Verbosity::Info;
    else if (v == "debug") level_ = Verbosity::Debug;
  }
  void error(const std::string& msg) const { emit(Verbosity::Error, "error", msg); }
  void warn(const std::string& msg) const { emit(Verbosity::Warn, "warning", msg); }
  void info(const std::string& msg) const { emit(Verbosity::Info, "info", msg); }
  void debug(const std::string& msg) const { emit(Verbosity::Debug, "debug", msg); }

 private:
  void emit(Verbosity v, const char* tag, const std::string& msg) const {
    if (static_cast<int>(v) <= static_cast<int>(level_)) *err_ << "fidelity: " << tag << ": " << msg << '\n';
  }
  std::ostream* err_;
  Verbosity level_ = Verbosity::Warn;
};

TaskKind require_task(const std::string& text) {
  auto t = parse_task(text);
  if (!t) throw ValidationError("unknown task '" + text + "' (expected LCT, SLX or CLV)");
  return *t;
}

Environment require_environment(const std::string& text) {
  auto e = parse_environment(text);
  if (!e) throw ValidationError("unknown environment '" + text + "' (expected REAL, STD, NOTRQ or NOMOT)");
  return *e;
}

TaskLayout read_layout(const fs::path& file) {
  try {
    return parse_task_layout(read_text_file(file));
  } catch (const ParseError& e) {
    throw ParseError(0, file.string() + ": " + e.what());
  }
}

DriveLog read_log(const fs::path& file) {
  try {
    return parse_drive_log(read_text_file(file));
  } catch (const ParseError& e) {
    throw ParseError(0, file.string() + ": " + e.what());
  }
}

/// Layouts named by the manifest, at most one per task; bundled ones fill the gaps.
class LayoutSet {
 public:
  explicit LayoutSet(const std::vector<ManifestEntry>& entries) {
    for (const auto& e : entries) {
      if (e.role != ManifestRole::Layout) continue;
      TaskLayout layout = read_layout(e.path);
      if (explicit_.count(layout.task)) {
        throw ValidationError("manifest lists more than one " + std::string(to_string(layout.task)) + " layout");
      }
      explicit_.emplace(layout.task, std::move(layout));
      files_.push_back(e);
    }
  }
  const TaskLayout& get(TaskKind task) {
    if (auto it = explicit_.find(task); it != explicit_.end()) return it->second;
    auto [it, _] = bundled_.emplace(task, bundled_layout(task));
    return it->second;
  }
  const std::vector<ManifestEntry>& entries() const { return files_; }

 private:
  std::map<TaskKind, TaskLayout> explicit_;
  std::map<TaskKind, TaskLayout> bundled_;
  std::vector<ManifestEntry> files_;
};

std::vector<fs::path> paths_with_role(const std::vector<ManifestEntry>& entries, ManifestRole role) {
  std::vector<fs::path> out;
  for (const auto& e : entries) {
    if (e.role == role) out.push_back(e.path);
  }
  return out;
}

std::vector<AttemptSegment> read_attempts(const std::vector<ManifestEntry>& entries) {
  std::vector<AttemptSegment> attempts;
  for (const auto& p : paths_with_role(entries, ManifestRole::Attempt)) attempts.push_back(attempt_from_log(read_log(p)));
  return attempts;
}

std::string attempt_label(const AttemptSegment& a) {
  return a.source_meta.driver_id + "/" + std::string(to_string(a.source_meta.environment)) + "/" +
         std::string(to_string(a.source_meta.task)) + "#" + std::to_string(a.attempt_index);
}

// ---- stages -------------------------------------------------------------

struct ExtractOptions {
  std::uint64_t seed = 0;
  SegmentationConfig segmentation;
};

/// Writes one file per attempt plus `attempts.manifest` (attempts and layouts); returns the manifest path.
fs::path stage_extract(const std::vector<ManifestEntry>& entries, const ExtractOptions& opt, const fs::path& out_dir,
                       const Logger& log) {
  LayoutSet layouts(entries);
  const auto logs = paths_with_role(entries, ManifestRole::Log);
  if (logs.empty()) throw ValidationError("manifest lists no logs");
  fs::create_directories(out_dir);
  const fs::path base = fs::absolute(out_dir);
  std::vector<ManifestEntry> written;
  std::set<std::string> stems;
  for (const auto& p : logs) {
    const std::string stem = p.stem().string();
    if (!stems.insert(stem).second) throw ValidationError("two logs share the file name stem '" + stem + "'");
    const DriveLog drive = read_log(p);
    const auto attempts = extract_attempts(drive, layouts.get(drive.meta.task), opt.seed, opt.segmentation);
    log.info(p.string() + ": " + std::to_string(attempts.size()) + " attempts");
    for (const auto& a : attempts) {
      const fs::path file = base / (stem + "_a" + std::to_string(a.attempt_index) + ".csv");
      write_file_atomic(file, write_drive_log(attempt_to_log(a)));
      written.push_back({file, ManifestRole::Attempt});
    }
  }
  for (const auto& e : layouts.entries()) written.push_back({fs::absolute(e.path), ManifestRole::Layout});
  const fs::path manifest = base / "attempts.manifest";
  write_file_atomic(manifest, write_manifest(written, base));
  return manifest;
}

std::vector<MetricRow> stage_metrics(const std::vector<AttemptSegment>& attempts, LayoutSet& layouts,
                                     const Logger& log) {
  std::vector<MetricRow> rows;
  for (const auto& a : attempts) {
    try {
      const MetricSet set = attempt_metrics(a, layouts.get(a.source_meta.task));
      for (const auto& m : set.entries) {
        rows.push_back({a.source_meta.driver_id, a.source_meta.environment, a.source_meta.task, a.attempt_index, m});
      }
    } catch (const ProcessingError& e) {
      log.warn(attempt_label(a) + ": metrics skipped: " + e.what());
    }
  }
  return rows;
}

enum class ModelChoice { Auto, Dpyre, Idpyre };

struct FitOptions {
  ModelChoice model = ModelChoice::Auto;
  bool force = false;
  FitGrid grid;
};

std::vector<FitRow> stage_fit(const std::vector<AttemptSegment>& attempts, LayoutSet& layouts, const FitOptions& opt,
                              const Logger& log) {
  for (const auto& a : attempts) {
    if (opt.model == ModelChoice::Idpyre && a.source_meta.task != TaskKind::Clv && !opt.force) {
      throw ValidationError("IDPYRE applies to CLV attempts (" + attempt_label(a) + " is " +
                            std::string(to_string(a.source_meta.task)) + "); pass --force to fit it anyway");
    }
  }
  std::vector<FitRow> rows;
  for (const auto& a : attempts) {
    const TaskKind task = a.source_meta.task;
    const ModelKind model = opt.model == ModelChoice::Auto     ? report_model(task)
                            : opt.model == ModelChoice::Dpyre ? ModelKind::Dpyre
                                                              : ModelKind::Idpyre;
    try {
      const PathSpec path = fitting_path(a, layouts.get(task), opt.grid.min_speed);
      const ModelFit fit =
          model == ModelKind::Dpyre ? fit_dpyre(a, path, opt.grid) : fit_intermittent_dpyre(a, path, opt.grid);
      if (fit.degenerate) log.warn(attempt_label(a) + ": steering rate has zero variance, r_squared reported as 1");
      rows.push_back({a.source_meta.driver_id, a.source_meta.environment, task, a.attempt_index, fit});
    } catch (const ProcessingError& e) {
      log.warn(attempt_label(a) + ": fit skipped: " + e.what());
    }
  }
  return rows;
}

struct ReportOptions {
  ComparisonConfig comparison;
  ReportFormat format = ReportFormat::Markdown;
};

std::string stage_report(const std::vector<MetricRow>& metrics, const std::vector<FitRow>& fits,
                         const std::vector<AttemptSegment>& rated, const ReportOptions& opt) {
  const auto rows = measure_rows(metrics, fits);
  if (rows.empty()) throw ReportError("no measures to compare");
  const auto ratings = rating_rows(rated);
  return render_report(build_comparison(rows, ratings, opt.comparison), opt.format);
}

// ---- option helpers -----------------------------------------------------

struct GridFlags {
  std::optional<double> delay_min, delay_max, delay_step;
  std::optional<double> preview_min, preview_max, preview_step;
  std::optional<double> burst_min, burst_max, burst_step;

  void add(CLI::App* app) {
    app->add_option("--delay-min", delay_min, "Smallest response delay searched (s)");
    app->add_option("--delay-max", delay_max, "Largest response delay searched (s)");
    app->add_option("--delay-step", delay_step, "Response delay grid step (s)");
    app->add_option("--preview-min", preview_min, "Smallest preview time searched (s)");
    app->add_option("--preview-max", preview_max, "Largest preview time searched (s)");
    app->add_option("--preview-step", preview_step, "Preview time grid step (s)");
    app->add_option("--burst-min", burst_min, "Shortest adjustment duration searched (s)");
    app->add_option("--burst-max", burst_max, "Longest adjustment duration searched (s)");
    app->add_option("--burst-step", burst_step, "Adjustment duration grid step (s)");
  }
  FitGrid grid() const {
    FitGrid g;
    g.delay_min = delay_min.value_or(g.delay_min);
    g.delay_max = delay_max.value_or(g.delay_max);
    g.delay_step = delay_step.value_or(g.delay_step);
    g.preview_min = preview_min.value_or(g.preview_min);
    g.preview_max = preview_max.value_or(g.preview_max);
    g.preview_step = preview_step.value_or(g.preview_step);
    g.burst_min = burst_min.value_or(g.burst_min);
    g.burst_max = burst_max.value_or(g.burst_max);
    g.burst_step = burst_step.value_or(g.burst_step);
    g.validate();
    return g;
  }
};

struct SegmentFlags {
  std::optional<double> speed_on, speed_off, pad, min_duration;

  void add(CLI::App* app) {
    app->add_option("--speed-on", speed_on, "Speed that starts an attempt (m/s)");
    app->add_option("--speed-off", speed_off, "Speed that ends an attempt (m/s)");
    app->add_option("--pad", pad, "Padding on both sides of an attempt (s)");
    app->add_option("--min-duration", min_duration, "Shortest attempt kept (s)");
  }
  SegmentationConfig config() const {
    SegmentationConfig c;
    c.speed_on = speed_on.value_or(c.speed_on);
    c.speed_off = speed_off.value_or(c.speed_off);
    c.pad = pad.value_or(c.pad);
    c.min_duration = min_duration.value_or(c.min_duration);
    if (!(c.speed_on > c.speed_off) || c.speed_off < 0.0 || c.pad < 0.0 || c.min_duration < 0.0) {
      throw ValidationError("segmentation needs speed_on > speed_off >= 0 and non-negative pad and minimum duration");
    }
    return c;
  }
};

struct CompareFlags {
  std::string baseline = "REAL";
  std::string rating_baseline = "STD";
  std::string pooling = "attempt";

  void add(CLI::App* app) {
    app->add_option("--baseline", baseline, "Environment the measures are compared against")->capture_default_str();
    app->add_option("--rating-baseline", rating_baseline, "Environment the realism ratings are compared against")
        ->capture_default_str();
    app->add_option("--pooling", pooling, "attempt or driver")->capture_default_str();
  }
  ComparisonConfig config() const {
    ComparisonConfig c;
    c.baseline = require_environment(baseline);
    c.rating_baseline = require_environment(rating_baseline);
    if (pooling == "attempt") c.pooling = Pooling::PerAttempt;
    else if (pooling == "driver") c.pooling = Pooling::PerDriver;
    else throw ValidationError("unknown pooling '" + pooling + "' (expected attempt or driver)");
    return c;
  }
};

ReportFormat require_format(const std::string& text) {
  auto f = parse_report_format(text);
  if (!f) throw ValidationError("unknown report format '" + text + "' (expected markdown or csv)");
  return *f;
}

ModelChoice require_model(const std::string& text) {
  if (text == "auto") return ModelChoice::Auto;
  auto m = parse_model(text);
  if (!m) throw ValidationError("unknown model '" + text + "' (expected auto, dpyre or idpyre)");
  return *m == ModelKind::Dpyre ? ModelChoice::Dpyre : ModelChoice::Idpyre;
}

void emit(const std::string& content, const std::string& out_file, std::ostream& out) {
  if (out_file.empty() || out_file == "-") {
    out << content;
  } else {
    write_file_atomic(out_file, content);
  }
}

std::vector<MetricRow> read_metric_files(const std::vector<std::string>& files) {
  std::vector<MetricRow> rows;
  for (const auto& f : files) {
    auto part = parse_metric_rows(read_text_file(f));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::vector<FitRow> read_fit_files(const std::vector<std::string>& files) {
  std::vector<FitRow> rows;
  for (const auto& f : files) {
    auto part = parse_fit_rows(read_text_file(f));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::string log_file_name(const std::string& driver, Environment env, TaskKind task) {
  return driver + "_" + std::string(to_string(env)) + "_" + std::string(to_string(task)) + ".csv";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Logger log(err);
  CLI::App app{"Behavioural fidelity analysis of simulator and vehicle drive logs", "fidelity"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate drive logs with the closed-loop driver and vehicle model");
  std::string sim_task, sim_env = "STD", sim_driver = "sim01", sim_out = ".", sim_layout, sim_grid_dump;
  std::optional<std::uint64_t> sim_seed;
  int sim_attempts = 1;
  std::optional<double> sim_snow_mu, sim_ice_mu, sim_gain, sim_delay, sim_preview, sim_burst, sim_rating;
  double sim_noise = 0.0, sim_jitter = 0.0;
  bool sim_intermittent = false, sim_cueing = false;
  sim->add_option("--task", sim_task, "LCT, SLX or CLV")->required();
  sim->add_option("--seed", sim_seed, "Root seed of every random stream")->required();
  sim->add_option("--out", sim_out, "Output directory")->capture_default_str();
  sim->add_option("--env", sim_env, "Environment tag written to the log")->capture_default_str();
  sim->add_option("--driver", sim_driver, "Driver id; also selects the sampled driver parameters")->capture_default_str();
  sim->add_option("--attempts", sim_attempts, "Attempts in the log")->capture_default_str();
  sim->add_option("--layout", sim_layout, "Layout file instead of the bundled one");
  sim->add_option("--snow-mu", sim_snow_mu, "Mean friction of the default surface");
  sim->add_option("--ice-mu", sim_ice_mu, "Mean friction of the low-friction patches");
  sim->add_option("--gain", sim_gain, "Steering gain (K, or k with --intermittent)");
  sim->add_option("--delay", sim_delay, "Response delay (s)");
  sim->add_option("--preview", sim_preview, "Preview time (s)");
  sim->add_option("--burst-duration", sim_burst, "Adjustment duration with --intermittent (s)");
  sim->add_option("--noise", sim_noise, "SD of white noise on the steering-rate command (rad/s)");
  sim->add_option("--speed-jitter", sim_jitter, "Relative SD of the per-attempt speed target");
  sim->add_option("--rating", sim_rating, "Realism rating stored in the log metadata, in [0, 1]");
  sim->add_flag("--intermittent", sim_intermittent, "Steer with discrete minimum-jerk adjustments");
  sim->add_flag("--cueing", sim_cueing, "Also write the motion-platform pose series");
  sim->add_option("--grid-dump", sim_grid_dump, "Write the friction grid to this file");

  // extract
  auto* ext = app.add_subcommand("extract", "Split logs into aligned attempts");
  std::string ext_manifest, ext_out = "attempts";
  std::optional<std::uint64_t> ext_seed;
  SegmentFlags ext_seg;
  ext->add_option("--manifest", ext_manifest, "Manifest of logs and layouts")->required();
  ext->add_option("--seed", ext_seed, "Root seed of the anchor streams")->required();
  ext->add_option("--out", ext_out, "Output directory for attempt files")->capture_default_str();
  ext_seg.add(ext);

  // metrics
  auto* met = app.add_subcommand("metrics", "Per-attempt performance and steering measures");
  std::string met_manifest, met_out;
  met->add_option("--manifest", met_manifest, "Manifest of attempts and layouts")->required();
  met->add_option("--out", met_out, "Output file (stdout when omitted)");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the steering model to every attempt");
  std::string fit_manifest, fit_out, fit_model = "auto";
  bool fit_force = false;
  GridFlags fit_grid;
  fit->add_option("--manifest", fit_manifest, "Manifest of attempts and layouts")->required();
  fit->add_option("--out", fit_out, "Output file (stdout when omitted)");
  fit->add_option("--model", fit_model, "auto, dpyre or idpyre")->capture_default_str();
  fit->add_flag("--force", fit_force, "Allow the intermittent model on LCT and SLX attempts");
  fit_grid.add(fit);

  // compare and report share their inputs
  struct TableInputs {
    std::vector<std::string> metrics, fits;
    std::string manifest, out, format;
    CompareFlags flags;
  };
  TableInputs cmp_in{{}, {}, "", "", "csv", {}}, rep_in{{}, {}, "", "", "markdown", {}};
  auto add_table_inputs = [](CLI::App* sub, TableInputs& in) {
    sub->add_option("--metrics", in.metrics, "Metric table files");
    sub->add_option("--fits", in.fits, "Fit table files");
    sub->add_option("--manifest", in.manifest, "Attempt manifest supplying realism ratings");
    sub->add_option("--out", in.out, "Output file (stdout when omitted)");
    sub->add_option("--format", in.format, "markdown or csv")->capture_default_str();
    in.flags.add(sub);
  };
  auto* cmp = app.add_subcommand("compare", "Effect sizes of every environment against the baseline");
  add_table_inputs(cmp, cmp_in);
  auto* rep = app.add_subcommand("report", "Per-task effect-size tables");
  add_table_inputs(rep, rep_in);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "extract, metrics, fit and report in one run");
  std::string pipe_manifest, pipe_out = "results", pipe_format = "markdown";
  std::optional<std::uint64_t> pipe_seed;
  SegmentFlags pipe_seg;
  GridFlags pipe_grid;
  CompareFlags pipe_cmp;
  pipe->add_option("--manifest", pipe_manifest, "Manifest of logs and layouts")->required();
  pipe->add_option("--seed", pipe_seed, "Root seed of the anchor streams")->required();
  pipe->add_option("--out", pipe_out, "Output directory")->capture_default_str();
  pipe->add_option("--format", pipe_format, "Report format: markdown or csv")->capture_default_str();
  pipe_seg.add(pipe);
  pipe_grid.add(pipe);
  pipe_cmp.add(pipe);

  // plot
  auto* plot = app.add_subcommand("plot", "Plot-ready series from aligned attempts");
  std::string plot_manifest, plot_kind, plot_out;
  plot->add_option("--manifest", plot_manifest, "Manifest of attempts")->required();
  plot->add_option("--kind", plot_kind, "yawrate_vs_swa, trajectory or steering_timeseries")->required();
  plot->add_option("--out", plot_out, "Output file (stdout when omitted)");

  // layout
  auto* lay = app.add_subcommand("layout", "Print a bundled task layout");
  std::string lay_task, lay_out;
  lay->add_option("--task", lay_task, "LCT, SLX or CLV")->required();
  lay->add_option("--out", lay_out, "Output file (stdout when omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "fidelity: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kExitValidation;
  }

  try {
    if (sim->parsed()) {
      const TaskKind task = require_task(sim_task);
      const Environment env = require_environment(sim_env);
      TaskLayout layout = sim_layout.empty() ? bundled_layout(task) : read_layout(sim_layout);
      if (layout.task != task) throw ValidationError("layout file is not a " + sim_task + " layout");
      layout = with_friction(std::move(layout), sim_snow_mu, sim_ice_mu);
      validate_layout(layout);
      DriverProfile driver = sample_driver(*sim_seed, sim_driver);
      if (sim_delay) driver.steering.response_delay = *sim_delay;
      if (sim_preview) driver.steering.preview_time = *sim_preview;
      if (sim_intermittent) {
        driver.intermittent.enabled = true;
        if (sim_gain) driver.intermittent.gain = *sim_gain;
        if (sim_burst) driver.intermittent.burst_duration = *sim_burst;
      } else if (sim_gain) {
        driver.steering.gain = *sim_gain;
      }
      ScenarioConfig cfg;
      cfg.driver_id = sim_driver;
      cfg.environment = env;
      cfg.attempts = sim_attempts;
      cfg.steering_noise_sd = sim_noise;
      cfg.speed_jitter = sim_jitter;
      if (sim_noise < 0.0 || sim_jitter < 0.0) throw ValidationError("noise levels must be non-negative");
      if (sim_rating && !(*sim_rating >= 0.0 && *sim_rating <= 1.0)) throw ValidationError("rating must be in [0, 1]");

      const FrictionGrid grid = generate_friction_grid(layout, *sim_seed);
      DriveLog drive = run_scenario(layout, grid, VehicleParams{}, driver, *sim_seed, cfg);
      drive.meta.realism_rating = sim_rating;
      const fs::path dir(sim_out);
      const fs::path file = dir / log_file_name(sim_driver, env, task);
      write_file_atomic(file, write_drive_log(drive));
      log.info("wrote " + file.string() + " (" + std::to_string(drive.samples.size()) + " samples)");
      if (sim_cueing) {
        fs::path cue = file;
        cue.replace_extension();
        cue += "_cueing.csv";
        write_file_atomic(cue, write_cueing(motion_cueing(body_motion_from_log(drive))));
      }
      if (!sim_grid_dump.empty()) {
        std::ostringstream g;
        write_friction_grid(g, grid);
        write_file_atomic(sim_grid_dump, g.str());
      }
      return kExitOk;
    }

    if (ext->parsed()) {
      const auto entries = read_manifest(ext_manifest);
      const fs::path manifest = stage_extract(entries, {*ext_seed, ext_seg.config()}, ext_out, log);
      log.info("wrote " + manifest.string());
      return kExitOk;
    }

    if (met->parsed()) {
      const auto entries = read_manifest(met_manifest);
      LayoutSet layouts(entries);
      const auto attempts = read_attempts(entries);
      if (attempts.empty()) throw ValidationError("manifest lists no attempts");
      emit(write_metric_rows(stage_metrics(attempts, layouts, log)), met_out, out);
      return kExitOk;
    }

    if (fit->parsed()) {
      const auto entries = read_manifest(fit_manifest);
      LayoutSet layouts(entries);
      const auto attempts = read_attempts(entries);
      if (attempts.empty()) throw ValidationError("manifest lists no attempts");
      const FitOptions opt{require_model(fit_model), fit_force, fit_grid.grid()};
      emit(write_fit_rows(stage_fit(attempts, layouts, opt, log)), fit_out, out);
      return kExitOk;
    }

    for (auto [sub, in] : {std::pair{cmp, &cmp_in}, std::pair{rep, &rep_in}}) {
      if (!sub->parsed()) continue;
      if (in->metrics.empty() && in->fits.empty()) throw ValidationError("pass --metrics and/or --fits tables");
      const ReportOptions opt{in->flags.config(), require_format(in->format)};
      std::vector<AttemptSegment> rated;
      if (!in->manifest.empty()) rated = read_attempts(read_manifest(in->manifest));
      emit(stage_report(read_metric_files(in->metrics), read_fit_files(in->fits), rated, opt), in->out, out);
      return kExitOk;
    }

    if (pipe->parsed()) {
      const auto entries = read_manifest(pipe_manifest);
      const ReportOptions ropt{pipe_cmp.config(), require_format(pipe_format)};
      const FitOptions fopt{ModelChoice::Auto, false, pipe_grid.grid()};
      const fs::path dir(pipe_out);
      const fs::path manifest = stage_extract(entries, {*pipe_seed, pipe_seg.config()}, dir / "attempts", log);
      const auto attempt_entries = read_manifest(manifest);
      LayoutSet layouts(attempt_entries);
      const auto attempts = read_attempts(attempt_entries);
      if (attempts.empty()) throw ProcessingError("no attempts were extracted");
      const auto metrics = stage_metrics(attempts, layouts, log);
      write_file_atomic(dir / "metrics.csv", write_metric_rows(metrics));
      const auto fits = stage_fit(attempts, layouts, fopt, log);
      write_file_atomic(dir / "fits.csv", write_fit_rows(fits));
      const std::string report = stage_report(metrics, fits, attempts, ropt);
      write_file_atomic(dir / (ropt.format == ReportFormat::Markdown ? "report.md" : "report.csv"), report);
      log.info("pipeline: " + std::to_string(attempts.size()) + " attempts, " + std::to_string(fits.size()) + " fits");
      return kExitOk;
    }

    if (plot->parsed()) {
      auto kind = parse_plot_kind(plot_kind);
      if (!kind) throw ValidationError("unknown plot kind '" + plot_kind + "'");
      const auto attempts = read_attempts(read_manifest(plot_manifest));
      emit(plot_data(attempts, *kind), plot_out, out);
      return kExitOk;
    }

    if (lay->parsed()) {
      emit(write_task_layout(bundled_layout(require_task(lay_task))), lay_out, out);
      return kExitOk;
    }
  } catch (const ProcessingError& e) {
    log.error(e.what());
    return kExitProcessing;
  } catch (const Error& e) {
    log.error(e.what());
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    log.error(e.what());
    return kExitValidation;
  }
  return kExitValidation;
}

int dispatch(const std::vector<std::string>& args) { return dispatch(args, std::cout, std::cerr); }

}  // namespace fidelity::cli
