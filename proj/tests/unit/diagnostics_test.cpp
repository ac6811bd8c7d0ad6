#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "benchdiag/diagnostics.hpp"
#include "benchdiag/error.hpp"
#include "test_support.hpp"

namespace benchdiag {
namespace {

using testing::load_grid;
using testing::instrumented_profile;
using testing::random_profile;
using testing::reference_series;
using testing::was_series;

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// ---- Little's law audit ----------------------------------------------------

TEST(AuditTest, ReproducesPrintedTable) {
  struct Printed {
    double n_run;
    double n_idle;
  };
  const std::vector<Printed> printed = {{0.96, 0.04},   {4.90, 0.10},    {9.90, 0.10},
                                        {116.75, 3.25}, {119.41, 80.59}, {119.70, 180.30},
                                        {123.94, 276.06}};
  const auto rows = audit_littles_law(was_series());
  ASSERT_EQ(rows.size(), printed.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].n_run, printed[i].n_run, 0.005) << "row " << i;
    EXPECT_NEAR(rows[i].n_idle, printed[i].n_idle, 0.005) << "row " << i;
  }
}

TEST(AuditTest, ZeroThroughputMeansEveryThreadIdle) {
  const auto row = make_audit_row({10, 0.0, 0.5});
  EXPECT_EQ(row.n_run, 0.0);
  EXPECT_EQ(row.n_idle, 10.0);
}

TEST(AuditProperty, RunPlusIdleIsOfferedLoad) {
  for (const auto& row : audit_littles_law(was_series())) {
    EXPECT_EQ(row.n_run + row.n_idle, static_cast<double>(row.n_was));
  }
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> load(1, 5000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = load(rng);
    // x * r spans [0, n]
    const double x = 1.0 + 999.0 * unit(rng);
    const double r = unit(rng) * n / x;
    const auto row = make_audit_row({n, x, r});
    ASSERT_EQ(row.n_run, x * r);
    ASSERT_EQ(row.n_run + row.n_idle, static_cast<double>(n));
  }
}

// ---- thread throttling -------------------------------------------------------

TEST(ThreadThrottlingTest, FiresOnPlateau) {
  const auto d = detect_thread_throttling(audit_littles_law(was_series()));
  ASSERT_TRUE(d.fired());
  const auto& f = *d.finding;
  EXPECT_EQ(f.detector, Detector::thread_throttling);
  EXPECT_EQ(f.severity, Severity::critical);
  EXPECT_GE(f.evidence.at("plateau_level"), 115.0);
  EXPECT_LE(f.evidence.at("plateau_level"), 125.0);
  EXPECT_LT(f.evidence.at("relative_spread"), 0.05);
  EXPECT_EQ(f.affected_points, (std::vector<int>{200, 300, 400}));
}

TEST(ThreadThrottlingTest, NoIdleThreadsNoFinding) {
  std::vector<AuditRow> rows;
  for (int n : {1, 2, 5, 10, 50, 100, 400}) rows.push_back(make_audit_row({n, 10.0, n / 10.0}));
  const auto d = detect_thread_throttling(rows);
  EXPECT_FALSE(d.fired());
  EXPECT_FALSE(d.note.has_value());
}

TEST(ThreadThrottlingTest, TooFewRowsIsNotApplicable) {
  const std::vector<AuditRow> rows = {make_audit_row({1, 24, 0.04}), make_audit_row({5, 48, 0.1})};
  const auto d = detect_thread_throttling(rows);
  EXPECT_FALSE(d.fired());
  ASSERT_TRUE(d.note.has_value());
}

TEST(ThreadThrottlingTest, LoadThatNeverSpansFactorIsNotApplicable) {
  std::vector<AuditRow> rows;
  for (int n : {100, 110, 120}) rows.push_back(make_audit_row({n, 100.0, 0.5}));
  const auto d = detect_thread_throttling(rows);
  EXPECT_FALSE(d.fired());
  EXPECT_TRUE(d.note.has_value());
}

// ---- think time ------------------------------------------------------------------

TEST(EffectiveThinkTimeTest, Values) {
  // 200 / 428 - 0.279 = 0.188289...
  EXPECT_NEAR(effective_think_time({200, 428, 0.279}), 0.1883, 0.0005);
  EXPECT_EQ(effective_think_time({1, 1, 1}), 0.0);
  EXPECT_LT(effective_think_time({400, 423, 0.293}), 1.0);
  EXPECT_THROW(effective_think_time({10, 0.0, 0.1}), InsufficientDataError);
}

TEST(ThinkTimeViolationTest, BatchModeAgainstConfiguredThinkTime) {
  const auto batch = ServiceProfile({{"a", 0.0035}, {"b", 0.005}, {"c", 0.002}}, 0.0);
  const auto series = reference_series(batch, {1, 2, 5, 10, 50, 100}, 10.0);
  const auto d = detect_think_time_violation(series);
  ASSERT_TRUE(d.fired());
  EXPECT_EQ(d.finding->severity, Severity::critical);
  EXPECT_NEAR(d.finding->evidence.at("median_effective_think_time"), 0.0, 1e-9);
  EXPECT_EQ(d.finding->evidence.at("configured_think_time"), 10.0);
}

TEST(ThinkTimeViolationTest, ConsistentSeriesPasses) {
  const auto series = reference_series(instrumented_profile(), load_grid(4000), 10.0);
  const auto d = detect_think_time_violation(series);
  EXPECT_FALSE(d.fired());
  EXPECT_FALSE(d.note.has_value());
}

TEST(ThinkTimeViolationTest, NoConfiguredThinkTimeIsNotApplicable) {
  const auto d = detect_think_time_violation(was_series());
  EXPECT_FALSE(d.fired());
  EXPECT_TRUE(d.note.has_value());
}

TEST(ThinkTimeViolationTest, ZeroThroughputPointsAreSkipped) {
  const LoadSeries series({{1, 0.0, 0.1}, {2, 0.0, 0.1}}, 10.0);
  const auto d = detect_think_time_violation(series);
  EXPECT_FALSE(d.fired());
  EXPECT_TRUE(d.note.has_value());
}

// ---- bound violation -------------------------------------------------------------

TEST(BoundViolationTest, ClaimedThreeHundredTps) {
  const auto f = detect_bound_violation(300.0, instrumented_profile());
  ASSERT_TRUE(f.has_value());
  EXPECT_EQ(f->severity, Severity::critical);
  EXPECT_EQ(f->evidence.at("x_max"), 200.0);
  EXPECT_NEAR(f->evidence.at("x_errors_estimate"), 100.0, 1e-9);
  EXPECT_TRUE(contains(f->message, "measurement is wrong"));
  EXPECT_TRUE(contains(f->message, "instrumentation data are wrong"));
}

TEST(BoundViolationTest, AtOrNearCeilingIsFine) {
  EXPECT_FALSE(detect_bound_violation(200.0, instrumented_profile()).has_value());
  EXPECT_FALSE(detect_bound_violation(203.0, instrumented_profile(), 0.02).has_value());
  EXPECT_TRUE(detect_bound_violation(204.5, instrumented_profile(), 0.02).has_value());
  EXPECT_THROW(detect_bound_violation(-1.0, instrumented_profile()), ValidationError);
}

TEST(BoundViolationProperty, SharpThreshold) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ratio(0.0, 2.0);
  std::uniform_real_distribution<double> tol(0.0, 0.2);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = random_profile(rng);
    const double observed = ratio(rng) * compute_x_max(p);
    const double t = tol(rng);
    ASSERT_EQ(detect_bound_violation(observed, p, t).has_value(),
              observed / compute_x_max(p) > 1.0 + t);
  }
}

// ---- knee ------------------------------------------------------------------------

TEST(KneeTest, FromProfile) {
  const auto k = estimate_knee(was_series(), instrumented_profile());
  EXPECT_EQ(k.basis, KneeBasis::profile);
  EXPECT_NEAR(k.n_opt_hat, 2002.1, 1e-9);
  EXPECT_EQ(k.s_max_hat, 0.005);
}

TEST(KneeTest, FromReferenceData) {
  const auto p = instrumented_profile();
  const int n_max = static_cast<int>(10 * compute_n_opt(p));
  const auto k = estimate_knee(reference_series(p, load_grid(n_max), 10.0));
  EXPECT_EQ(k.basis, KneeBasis::data);
  EXPECT_LT(std::abs(k.n_opt_hat - compute_n_opt(p)) / compute_n_opt(p), 0.10);
}

TEST(KneeTest, WasClientDataEstimate) {
  const auto k = estimate_knee(was_series());
  EXPECT_DOUBLE_EQ(k.s_max_hat, 1.0 / 428.0);
  EXPECT_EQ(k.r_min_hat, 0.040);
  EXPECT_NEAR(k.n_opt_hat, 0.040 * 428.0, 1e-12);
}

TEST(KneeTest, Errors) {
  EXPECT_THROW(estimate_knee(LoadSeries({{1, 0.0, 0.1}, {2, 0.0, 0.2}})), InsufficientDataError);
  EXPECT_THROW(estimate_knee(LoadSeries({{1, 5.0, 0.1}})), InsufficientDataError);
  EXPECT_THROW(estimate_knee(LoadSeries({{1, 5.0, 0.0}, {2, 6.0, 0.1}})), InsufficientDataError);
}

// ---- retrograde ----------------------------------------------------------------------

TEST(RetrogradeTest, DropBelowRunningMaximum) {
  const LoadSeries s({{1, 100, 0.1}, {2, 120, 0.1}, {3, 110, 0.1}});
  const auto findings = detect_retrograde(s);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].affected_points, std::vector<int>{3});
  EXPECT_EQ(findings[0].severity, Severity::warning);
  EXPECT_EQ(findings[0].evidence.at("drop"), 10.0);
  EXPECT_EQ(findings[0].evidence.at("running_max"), 120.0);
}

TEST(RetrogradeTest, MonotoneAndSmallDipsAreClean) {
  EXPECT_TRUE(detect_retrograde(LoadSeries({{1, 1, 1}, {2, 2, 1}, {3, 2, 1}})).empty());
  EXPECT_TRUE(detect_retrograde(LoadSeries({{1, 100, 1}, {2, 99, 1}})).empty());
  EXPECT_TRUE(detect_retrograde(was_series()).empty());
  EXPECT_TRUE(
      detect_retrograde(reference_series(instrumented_profile(), load_grid(20000), 10.0)).empty());
}

// ---- flattening ----------------------------------------------------------------------

TEST(FlatteningTest, WasClientHandleHasSnapped) {
  const auto series = was_series();
  const auto knee = estimate_knee(series);
  const auto d = detect_response_flattening(series, knee);
  ASSERT_TRUE(d.fired());
  const auto& f = *d.finding;
  EXPECT_EQ(f.severity, Severity::critical);
  // Hand least squares over n = 120..400: Sxy = 2.705 user*s, Sxx = 44300 user^2.
  EXPECT_NEAR(f.evidence.at("observed_slope"), 2.705 / 44300.0, 1e-12);
  EXPECT_NEAR(f.evidence.at("observed_slope"), 6.0e-5, 0.2e-5);
  EXPECT_DOUBLE_EQ(f.evidence.at("expected_slope"), 1.0 / 428.0);
  EXPECT_EQ(f.affected_points, (std::vector<int>{120, 200, 300, 400}));
}

TEST(FlatteningTest, ReferenceHandleIsIntact) {
  const auto p = instrumented_profile();
  const auto series = reference_series(p, load_grid(20021), 10.0);
  EXPECT_FALSE(detect_response_flattening(series, estimate_knee(series, p)).fired());
  EXPECT_FALSE(detect_response_flattening(series, estimate_knee(series)).fired());
}

TEST(FlatteningTest, OnePostKneePointIsNotApplicable) {
  const LoadSeries s({{1, 10, 0.1}, {2, 19, 0.105}, {50, 20, 2.5}});
  const auto d = detect_response_flattening(s, estimate_knee(s));
  EXPECT_FALSE(d.fired());
  EXPECT_TRUE(d.note.has_value());
}

// ---- growth ------------------------------------------------------------------------------

TEST(GrowthTest, ReferenceCurveIsLinear) {
  const auto p = instrumented_profile();
  std::vector<int> loads;
  for (int n = 2003; n <= 20021; n += 1000) loads.push_back(n);
  const auto series = reference_series(p, loads, 10.0);
  const auto fit = classify_growth(series, estimate_knee(series, p));
  EXPECT_EQ(fit.growth, GrowthClass::linear);
  EXPECT_NEAR(fit.linear_slope, 0.005, 0.0005);
}

TEST(GrowthTest, ExponentialGenerator) {
  std::vector<LoadPoint> points;
  for (int n = 30; n <= 60; ++n) points.push_back({n, 100.0, 0.01 * std::exp(0.05 * n)});
  const LoadSeries series(points);
  const KneeEstimate knee{0.01, 0.01, 0.0, 1.0, KneeBasis::data};
  const auto fit = classify_growth(series, knee);
  EXPECT_EQ(fit.growth, GrowthClass::exponential);
  ASSERT_TRUE(fit.exp_rate.has_value());
  EXPECT_NEAR(*fit.exp_rate, 0.05, 1e-9);
}

TEST(GrowthTest, TooFewPointsIsInconclusive) {
  const LoadSeries series({{10, 1, 1}, {20, 1, 2}, {30, 1, 3}});
  const KneeEstimate knee{1.0, 1.0, 0.0, 1.0, KneeBasis::data};
  const auto fit = classify_growth(series, knee, GrowthOptions{4, 0.5, 0.5});
  EXPECT_EQ(fit.growth, GrowthClass::inconclusive);
  EXPECT_EQ(fit.points_used, 3);
}

TEST(GrowthTest, WasClientIsSublinear) {
  const auto series = was_series();
  EXPECT_EQ(classify_growth(series, estimate_knee(series)).growth, GrowthClass::sublinear);
}

TEST(GrowthTest, NonpositiveResponseSkipsExponentialFit) {
  const LoadSeries series({{10, 1, 0.0}, {20, 1, 1.0}, {30, 1, 2.0}, {40, 1, 3.0}});
  const KneeEstimate knee{0.1, 0.1, 0.0, 1.0, KneeBasis::data};
  const auto fit = classify_growth(series, knee);
  EXPECT_FALSE(fit.exp_sse.has_value());
  EXPECT_FALSE(fit.note.empty());
  EXPECT_EQ(fit.growth, GrowthClass::linear);
}

// ---- suite -----------------------------------------------------------------------------------

bool has_alarm(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity != Severity::info; });
}

TEST(DiagnoseTest, WasClient) {
  const auto d = diagnose(was_series(), std::nullopt);
  const auto fired = [&d](Detector det) {
    return std::any_of(d.findings.begin(), d.findings.end(), [det](const Finding& f) {
      return f.detector == det && f.severity == Severity::critical;
    });
  };
  EXPECT_TRUE(fired(Detector::response_flattening));
  EXPECT_TRUE(fired(Detector::thread_throttling));
  EXPECT_FALSE(d.bounds.has_value());
  ASSERT_TRUE(d.growth.has_value());
  EXPECT_EQ(d.growth->growth, GrowthClass::sublinear);
}

TEST(DiagnoseTest, ClaimedThroughputAgainstProfile) {
  const auto d = diagnose(parse_series(testing::read_data("claimed_300tps.csv")), instrumented_profile());
  ASSERT_FALSE(d.findings.empty());
  const auto& f = d.findings.front();
  EXPECT_EQ(f.detector, Detector::bound_violation);
  EXPECT_NEAR(f.evidence.at("x_errors_estimate"), 100.0, 0.5);
  EXPECT_EQ(f.affected_points, (std::vector<int>{100, 200}));
}

TEST(DiagnoseProperty, ReferenceSeriesAreClean) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_profile(rng);
    const int n_max = static_cast<int>(std::ceil(10.0 * compute_n_opt(p)));
    const auto series = reference_series(p, load_grid(n_max), std::nullopt);
    const auto d = diagnose(series, p);
    for (const auto& f : d.findings) {
      EXPECT_EQ(f.severity, Severity::info) << to_string(f.detector) << ": " << f.message;
    }
    ASSERT_TRUE(d.growth.has_value());
    EXPECT_NE(d.growth->growth, GrowthClass::exponential);
    EXPECT_FALSE(has_alarm(d.findings));
  }
}

TEST(SortFindingsTest, DetectorThenLoad) {
  std::vector<Finding> findings(3);
  findings[0].detector = Detector::retrograde_throughput;
  findings[0].affected_points = {9};
  findings[1].detector = Detector::retrograde_throughput;
  findings[1].affected_points = {3};
  findings[2].detector = Detector::bound_violation;
  sort_findings(findings);
  EXPECT_EQ(findings[0].detector, Detector::bound_violation);
  EXPECT_EQ(findings[1].affected_points.front(), 3);
  EXPECT_EQ(findings[2].affected_points.front(), 9);
}

}  // namespace
}  // namespace benchdiag
