#include "fidelity/effect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "fidelity/errors.hpp"
#include "fidelity/metrics.hpp"
#include "fidelity/signal.hpp"

namespace fidelity {

std::string_view to_string(EffectClass c) {
  switch (c) {
    case EffectClass::Negligible: return "NEGLIGIBLE";
    case EffectClass::Small: return "SMALL";
    case EffectClass::Medium: return "MEDIUM";
    case EffectClass::Large: return "LARGE";
  }
  return "NEGLIGIBLE";
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ValidationError("Cohen's d needs at least two values per sample");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sa = sample_sd(a), sb = sample_sd(b);
  const double pooled = std::sqrt(((na - 1.0) * sa * sa + (nb - 1.0) * sb * sb) / (na + nb - 2.0));
  if (!(pooled > 0.0)) throw UndefinedEffectError("effect size undefined: pooled standard deviation is zero");
  return (mean(b) - mean(a)) / pooled;
}

EffectClass classify_effect(double d) {
  const double m = std::abs(d);
  if (m < 0.25) return EffectClass::Negligible;
  if (m < 0.5) return EffectClass::Small;
  if (m < 0.8) return EffectClass::Medium;
  return EffectClass::Large;
}

std::vector<std::string> model_measure_names(TaskKind task) {
  if (task == TaskKind::Clv) return {"T_R", "k", "rms_error", "avg_adjustment"};
  return {"T_R", "K", "rms_error"};
}

std::vector<std::string> report_measure_order(TaskKind task) {
  auto names = metric_names(task);
  for (auto& n : model_measure_names(task)) names.push_back(std::move(n));
  return names;
}

std::string measure_label(TaskKind task, std::string_view measure) {
  static const std::map<std::string_view, std::string_view> labels = {
      {"cones_hit", "Cones Hit"},         {"speed_var", "Speed Var."},
      {"max_lat_accel", "Max Lat Accel"}, {"initial_speed", "Initial Speed"},
      {"total_lat_travel", "Total Lat Travel"}, {"swrr_1", "SWRR 1 deg"},
      {"swrr_10", "SWRR 10 deg"},         {"peak_lat_amp", "Lateral Amp"},
      {"peak_lat_amp_var", "Lat Amp Var"}, {"radius_var", "Radius Var."},
      {"avg_radius", "Mean Radius"},      {"T_R", "Tr"},
      {"K", "K"},                         {"k", "k"},
      {"rms_error", "RMS"},               {"avg_adjustment", "Average Adj."},
  };
  if (measure == "avg_speed") return task == TaskKind::Clv ? "Mean Speed" : "Average Speed";
  if (auto it = labels.find(measure); it != labels.end()) return std::string(it->second);
  return std::string(measure);
}

namespace {

using GroupKey = std::tuple<TaskKind, std::string, Environment>;

/// Values per (task, measure, environment), optionally averaged per driver first.
std::map<GroupKey, std::vector<double>> group_rows(std::span<const MeasureRow> rows, Pooling pooling) {
  std::vector<MeasureRow> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const MeasureRow& a, const MeasureRow& b) {
    return std::tie(a.task, a.measure, a.environment, a.driver, a.attempt) <
           std::tie(b.task, b.measure, b.environment, b.driver, b.attempt);
  });
  std::map<GroupKey, std::vector<double>> groups;
  if (pooling == Pooling::PerAttempt) {
    for (const auto& r : sorted) groups[{r.task, r.measure, r.environment}].push_back(r.value);
    return groups;
  }
  std::map<std::tuple<TaskKind, std::string, Environment, std::string>, std::vector<double>> per_driver;
  for (const auto& r : sorted) per_driver[{r.task, r.measure, r.environment, r.driver}].push_back(r.value);
  for (const auto& [key, values] : per_driver) {
    groups[{std::get<0>(key), std::get<1>(key), std::get<2>(key)}].push_back(mean(values));
  }
  return groups;
}

std::size_t measure_rank(TaskKind task, const std::string& measure) {
  const auto order = report_measure_order(task);
  auto it = std::find(order.begin(), order.end(), measure);
  return static_cast<std::size_t>(std::distance(order.begin(), it));
}

void compare(const std::vector<double>& a, const std::vector<double>& b, std::optional<double>& d,
             std::optional<EffectClass>& magnitude) {
  if (a.size() < 2 || b.size() < 2) return;
  try {
    d = cohens_d(a, b);
    magnitude = classify_effect(*d);
  } catch (const UndefinedEffectError&) {
    d.reset();
    magnitude.reset();
  }
}

}  // namespace

EffectReport build_comparison(std::span<const MeasureRow> rows, std::span<const RatingRow> ratings,
                              const ComparisonConfig& cfg) {
  const auto groups = group_rows(rows, cfg.pooling);

  std::map<std::pair<TaskKind, std::string>, std::set<Environment>> present;
  for (const auto& [key, values] : groups) present[{std::get<0>(key), std::get<1>(key)}].insert(std::get<2>(key));

  std::vector<std::string> gaps;
  std::vector<std::pair<TaskKind, std::string>> measures;
  for (const auto& [tm, envs] : present) {
    const bool has_other = std::any_of(envs.begin(), envs.end(), [&](Environment e) { return e != cfg.baseline; });
    if (!has_other) continue;
    if (!envs.count(cfg.baseline)) {
      gaps.push_back(std::string(to_string(tm.first)) + "/" + tm.second);
      continue;
    }
    measures.push_back(tm);
  }
  if (!gaps.empty()) {
    std::string msg = "missing baseline " + std::string(to_string(cfg.baseline)) + " rows for:";
    for (const auto& g : gaps) msg += " " + g;
    throw ReportError(msg);
  }
  std::stable_sort(measures.begin(), measures.end(), [](const auto& a, const auto& b) {
    const auto ra = measure_rank(a.first, a.second), rb = measure_rank(b.first, b.second);
    return std::tie(a.first, ra, a.second) < std::tie(b.first, rb, b.second);
  });

  EffectReport report;
  report.rating_baseline = cfg.rating_baseline;
  for (const auto& [task, measure] : measures) {
    const auto& base = groups.at({task, measure, cfg.baseline});
    for (Environment env : present.at({task, measure})) {
      if (env == cfg.baseline) continue;
      const auto& other = groups.at({task, measure, env});
      EffectEntry e;
      e.task = task;
      e.measure = measure;
      e.env_a = cfg.baseline;
      e.env_b = env;
      e.mean_a = mean(base);
      e.mean_b = mean(other);
      e.sd_a = sample_sd(base);
      e.sd_b = sample_sd(other);
      e.n_a = base.size();
      e.n_b = other.size();
      compare(base, other, e.d, e.magnitude);
      report.entries.push_back(std::move(e));
    }
  }

  // Ratings: one value per (driver, task, environment) row, baseline as configured.
  std::map<std::pair<TaskKind, Environment>, std::vector<double>> by_env;
  std::vector<RatingRow> sorted_ratings(ratings.begin(), ratings.end());
  std::stable_sort(sorted_ratings.begin(), sorted_ratings.end(), [](const RatingRow& a, const RatingRow& b) {
    return std::tie(a.task, a.environment, a.driver) < std::tie(b.task, b.environment, b.driver);
  });
  for (const auto& r : sorted_ratings) by_env[{r.task, r.environment}].push_back(r.rating);
  for (const auto& [key, values] : by_env) {
    RatingSummary s;
    s.task = key.first;
    s.environment = key.second;
    s.mean = mean(values);
    s.n = values.size();
    if (key.second != cfg.rating_baseline) {
      if (auto it = by_env.find({key.first, cfg.rating_baseline}); it != by_env.end()) {
        compare(it->second, values, s.d, s.magnitude);
      }
    }
    report.ratings.push_back(s);
  }

  std::map<Environment, std::set<std::pair<std::string, int>>> attempts;
  for (const auto& r : rows) attempts[r.environment].insert({r.driver + "/" + std::string(to_string(r.task)), r.attempt});
  std::ostringstream prov;
  prov << "Baseline " << to_string(cfg.baseline) << ", pooling "
       << (cfg.pooling == Pooling::PerAttempt ? "per attempt" : "per driver") << ". Attempts:";
  for (const auto& [env, set] : attempts) prov << ' ' << to_string(env) << '=' << set.size();
  prov << '.';
  if (!report.ratings.empty()) prov << " Ratings baseline " << to_string(cfg.rating_baseline) << '.';
  report.provenance = prov.str();
  return report;
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  if (text == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string effect_cell(const std::optional<double>& d, const std::optional<EffectClass>& m) {
  if (!d) return "n/a";
  const std::string text = fixed2(*d);
  return m == EffectClass::Large ? "**" + text + "**" : text;
}

std::string percent(double fraction) {
  return std::to_string(static_cast<long>(std::lround(fraction * 100.0))) + "%";
}

void render_markdown(std::ostream& out, const EffectReport& report) {
  out << "# Behavioural fidelity report\n";
  if (report.entries.empty() && report.ratings.empty()) return;
  out << '\n' << report.provenance << "\n";
  for (TaskKind task : kAllTasks) {
    std::vector<const EffectEntry*> rows;
    std::set<Environment> envs;
    for (const auto& e : report.entries) {
      if (e.task != task) continue;
      rows.push_back(&e);
      envs.insert(e.env_b);
    }
    if (rows.empty()) continue;
    out << "\n## " << to_string(task) << "\n\n| Measure |";
    for (Environment env : envs) out << ' ' << to_string(env) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < envs.size(); ++i) out << "---|";
    out << '\n';
    for (std::size_t i = 0; i < rows.size();) {
      const std::string& measure = rows[i]->measure;
      out << "| " << measure_label(task, measure) << " |";
      std::map<Environment, const EffectEntry*> cells;
      for (; i < rows.size() && rows[i]->measure == measure; ++i) cells[rows[i]->env_b] = rows[i];
      for (Environment env : envs) {
        auto it = cells.find(env);
        out << ' ' << (it == cells.end() ? std::string() : effect_cell(it->second->d, it->second->magnitude)) << " |";
      }
      out << '\n';
    }
  }
  if (report.ratings.empty()) return;
  std::set<Environment> envs;
  for (const auto& r : report.ratings) envs.insert(r.environment);
  out << "\n## Realism ratings\n\n| Measure |";
  for (Environment env : envs) out << ' ' << to_string(env) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < envs.size(); ++i) out << "---|";
  out << '\n';
  for (TaskKind task : kAllTasks) {
    std::map<Environment, const RatingSummary*> cells;
    for (const auto& r : report.ratings) {
      if (r.task == task) cells[r.environment] = &r;
    }
    if (cells.empty()) continue;
    out << "| " << to_string(task) << " Avg. Real |";
    for (Environment env : envs) {
      auto it = cells.find(env);
      out << ' ' << (it == cells.end() ? std::string() : percent(it->second->mean)) << " |";
    }
    out << "\n| " << to_string(task) << " Cohen d |";
    for (Environment env : envs) {
      auto it = cells.find(env);
      std::string cell;
      if (it != cells.end() && it->second->d) cell = effect_cell(it->second->d, it->second->magnitude);
      out << ' ' << cell << " |";
    }
    out << '\n';
  }
}

void render_csv(std::ostream& out, const EffectReport& report) {
  out << "task,measure,env_a,env_b,mean_a,mean_b,sd_a,sd_b,n_a,n_b,d,magnitude\n";
  for (const auto& e : report.entries) {
    out << to_string(e.task) << ',' << e.measure << ',' << to_string(e.env_a) << ',' << to_string(e.env_b) << ','
        << format_number(e.mean_a) << ',' << format_number(e.mean_b) << ',' << format_number(e.sd_a) << ','
        << format_number(e.sd_b) << ',' << e.n_a << ',' << e.n_b << ',' << (e.d ? format_number(*e.d) : "") << ','
        << (e.magnitude ? to_string(*e.magnitude) : "") << '\n';
  }
  // Rating rows compare each environment's mean against the rating baseline.
  std::map<TaskKind, const RatingSummary*> baseline;
  for (const auto& r : report.ratings) {
    if (r.environment == report.rating_baseline) baseline[r.task] = &r;
  }
  for (const auto& r : report.ratings) {
    const RatingSummary* base = baseline.count(r.task) ? baseline.at(r.task) : nullptr;
    if (base == &r) continue;
    out << to_string(r.task) << ",realism_rating," << (base ? to_string(base->environment) : "") << ','
        << to_string(r.environment) << ',' << (base ? format_number(base->mean) : "") << ',' << format_number(r.mean)
        << ",,," << (base ? std::to_string(base->n) : "") << ',' << r.n << ',' << (r.d ? format_number(*r.d) : "")
        << ',' << (r.magnitude ? to_string(*r.magnitude) : "") << '\n';
  }
}

}  // namespace

void render_report(std::ostream& out, const EffectReport& report, ReportFormat format) {
  if (format == ReportFormat::Markdown) {
    render_markdown(out, report);
  } else {
    render_csv(out, report);
  }
}

std::string render_report(const EffectReport& report, ReportFormat format) {
  std::ostringstream out;
  render_report(out, report, format);
  return out.str();
}

}  // namespace fidelity
