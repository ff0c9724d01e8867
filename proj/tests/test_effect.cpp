#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fidelity/effect.hpp"
#include "fidelity/errors.hpp"

using namespace fidelity;

namespace {

/// Two-pass pooled-SD effect size.
double oracle_d(const std::vector<double>& a, const std::vector<double>& b) {
  auto moments = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, ss};
  };
  const auto [ma, ssa] = moments(a);
  const auto [mb, ssb] = moments(b);
  return (mb - ma) / std::sqrt((ssa + ssb) / static_cast<double>(a.size() + b.size() - 2));
}

std::vector<MeasureRow> rows_for(TaskKind task, const std::string& measure, Environment env,
                                 const std::vector<double>& values) {
  std::vector<MeasureRow> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back({"d" + std::to_string(i % 3), env, task, static_cast<int>(i / 3) + 1, measure, values[i]});
  }
  return out;
}

}  // namespace

TEST_CASE("hand-computed effect size") {
  const std::vector<double> a{1, 2, 3}, b{3, 4, 5};
  CHECK(cohens_d(a, b) == doctest::Approx(2.0));
  CHECK(cohens_d(b, a) == doctest::Approx(-2.0));
  const std::vector<double> one{1};
  CHECK_THROWS_AS(cohens_d(one, b), ValidationError);
  const std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(cohens_d(flat, flat), UndefinedEffectError);
}

TEST_CASE("effect size matches the two-pass oracle and its invariances") {
  std::mt19937 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 5 + trial; ++i) a.push_back(n(rng));
    for (int i = 0; i < 8 + trial % 4; ++i) b.push_back(0.5 + 2.0 * n(rng));
    const double d = cohens_d(a, b);
    CHECK(d == doctest::Approx(oracle_d(a, b)).epsilon(1e-12));
    CHECK(cohens_d(b, a) == doctest::Approx(-d).epsilon(1e-12));
    auto sa = a, sb = b;
    for (auto& x : sa) x = 3.0 * x + 11.0;
    for (auto& x : sb) x = 3.0 * x + 11.0;
    CHECK(cohens_d(sa, sb) == doctest::Approx(d).epsilon(1e-9));
    for (auto& x : sa) x = -x;
    for (auto& x : sb) x = -x;
    CHECK(cohens_d(sa, sb) == doctest::Approx(-d).epsilon(1e-9));
  }
}

TEST_CASE("effect classes have half-open boundaries") {
  CHECK(classify_effect(0.0) == EffectClass::Negligible);
  CHECK(classify_effect(0.2499) == EffectClass::Negligible);
  CHECK(classify_effect(0.25) == EffectClass::Small);
  CHECK(classify_effect(-0.49) == EffectClass::Small);
  CHECK(classify_effect(0.5) == EffectClass::Medium);
  CHECK(classify_effect(-0.79) == EffectClass::Medium);
  CHECK(classify_effect(0.8) == EffectClass::Large);
  CHECK(classify_effect(-3.0) == EffectClass::Large);
  CHECK(to_string(EffectClass::Large) == "LARGE");
}

TEST_CASE("comparison groups per environment against the baseline") {
  std::vector<MeasureRow> rows = rows_for(TaskKind::Lct, "cones_hit", Environment::Real, {0, 1, 0, 1, 0, 1});
  auto std_rows = rows_for(TaskKind::Lct, "cones_hit", Environment::Std, {1, 2, 1, 2, 1, 2});
  auto slx = rows_for(TaskKind::Lct, "speed_var", Environment::NoMot, {4, 4, 4});
  auto slx_base = rows_for(TaskKind::Lct, "speed_var", Environment::Real, {4, 4, 4});
  rows.insert(rows.end(), std_rows.begin(), std_rows.end());
  rows.insert(rows.end(), slx.begin(), slx.end());
  rows.insert(rows.end(), slx_base.begin(), slx_base.end());
  const std::vector<RatingRow> ratings{{"d0", Environment::Std, TaskKind::Lct, 0.5},
                                       {"d1", Environment::Std, TaskKind::Lct, 0.7},
                                       {"d0", Environment::NoMot, TaskKind::Lct, 0.8},
                                       {"d1", Environment::NoMot, TaskKind::Lct, 0.9}};
  const auto report = build_comparison(rows, ratings);
  REQUIRE(report.entries.size() == 2);
  CHECK(report.entries[0].measure == "cones_hit");
  CHECK(report.entries[0].d == doctest::Approx(oracle_d({0, 1, 0, 1, 0, 1}, {1, 2, 1, 2, 1, 2})));
  CHECK(report.entries[0].magnitude == EffectClass::Large);
  CHECK(report.entries[1].measure == "speed_var");
  CHECK_FALSE(report.entries[1].d.has_value());
  REQUIRE(report.ratings.size() == 2);
  CHECK(report.ratings[1].environment == Environment::NoMot);
  CHECK(report.ratings[1].mean == doctest::Approx(0.85));
  CHECK(report.ratings[1].d == doctest::Approx(oracle_d({0.5, 0.7}, {0.8, 0.9})));

  const auto md = render_report(report, ReportFormat::Markdown);
  CHECK(md.find("| Cones Hit | **") != std::string::npos);
  CHECK(md.find("| Speed Var. |  | n/a |") != std::string::npos);
  CHECK(md.find("| LCT Avg. Real | 60% | 85% |") != std::string::npos);
  const auto csv = render_report(report, ReportFormat::Csv);
  CHECK(csv.rfind("task,measure,env_a,env_b,mean_a,mean_b,sd_a,sd_b,n_a,n_b,d,magnitude\n", 0) == 0);
  CHECK(csv.find("LCT,cones_hit,REAL,STD,0.5,1.5,") != std::string::npos);
  CHECK(csv.find("LCT,realism_rating,STD,NOMOT,0.6,0.85") != std::string::npos);
}

TEST_CASE("per-driver pooling averages attempts first") {
  auto rows = rows_for(TaskKind::Clv, "avg_speed", Environment::Real, {1, 2, 3, 2, 3, 4});
  auto other = rows_for(TaskKind::Clv, "avg_speed", Environment::Std, {2, 4, 6, 3, 5, 7});
  rows.insert(rows.end(), other.begin(), other.end());
  const auto report = build_comparison(rows, {}, {Environment::Real, Environment::Std, Pooling::PerDriver});
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].n_a == 3);
  CHECK(report.entries[0].d == doctest::Approx(oracle_d({1.5, 2.5, 3.5}, {2.5, 4.5, 6.5})));
}

TEST_CASE("missing baseline rows are reported together") {
  auto rows = rows_for(TaskKind::Slx, "cones_hit", Environment::Std, {0, 1, 2});
  auto more = rows_for(TaskKind::Clv, "avg_speed", Environment::Std, {1, 2, 3});
  rows.insert(rows.end(), more.begin(), more.end());
  try {
    build_comparison(rows, {});
    FAIL("expected ReportError");
  } catch (const ReportError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("SLX/cones_hit") != std::string::npos);
    CHECK(msg.find("CLV/avg_speed") != std::string::npos);
  }
}

TEST_CASE("measure order follows the task tables") {
  const auto lct = report_measure_order(TaskKind::Lct);
  CHECK(lct.front() == "cones_hit");
  CHECK(lct.back() == "rms_error");
  const auto clv = report_measure_order(TaskKind::Clv);
  CHECK(clv.back() == "avg_adjustment");
  CHECK(measure_label(TaskKind::Clv, "avg_speed") == "Mean Speed");
  CHECK(measure_label(TaskKind::Slx, "avg_speed") == "Average Speed");
  CHECK(parse_report_format("md") == ReportFormat::Markdown);
  CHECK_FALSE(parse_report_format("html").has_value());
}
