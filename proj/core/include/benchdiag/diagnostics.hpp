#pragma once

// Detectors for inconsistencies between load-test measurements and the
// operational laws every closed benchmark must obey.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "benchdiag/ingest.hpp"
#include "benchdiag/model.hpp"

namespace benchdiag {

// Declaration order is the report sort order.
enum class Detector {
  bound_violation,
  thread_throttling,
  think_time_violation,
  retrograde_throughput,
  response_flattening,
  growth_class,
};

enum class Severity { info, warning, critical };

std::string_view to_string(Detector detector) noexcept;  // "BOUND_VIOLATION", ...
std::string_view to_string(Severity severity) noexcept;  // "info", ...

struct Finding {
  Detector detector = Detector::bound_violation;
  Severity severity = Severity::info;
  std::string message;
  std::map<std::string, double> evidence;
  std::vector<int> affected_points;
};

// Result of a detector that may not apply to its input. When it does not
// apply, finding is empty and note says why.
struct Detection {
  std::optional<Finding> finding;
  std::optional<std::string> note;

  bool fired() const noexcept { return finding.has_value(); }
};

// ---- Little's law audit -------------------------------------------------

// One measured point re-read through Little's law: the number of client
// threads actually busy is x * r, the rest of the offered load sits idle.
struct AuditRow {
  int n_was = 0;
  double x_was = 0.0;
  double r_was = 0.0;
  double n_run = 0.0;
  double n_idle = 0.0;
};

AuditRow make_audit_row(const LoadPoint& point);
std::vector<AuditRow> audit_littles_law(const LoadSeries& series);

struct ThrottlingOptions {
  double plateau_tol = 0.05;
  double span_factor = 1.5;
};

// Critical when n_run stays flat (relative spread < plateau_tol) across the
// shortest top segment of rows over which n_was grows by span_factor.
// Evidence: plateau_level (median n_run), n_run_min, n_run_max,
// relative_spread, n_was_start, n_was_end.
Detection detect_thread_throttling(const std::vector<AuditRow>& rows,
                                   const ThrottlingOptions& options = {});

// ---- think time ---------------------------------------------------------

// Think time implied by N = X (R + Z). Negative results are returned as is.
// Throws InsufficientDataError when x is zero.
double effective_think_time(const LoadPoint& point);

// Critical when the median effective think time over points with x > 0
// deviates from the configured think time by more than rel_tol relative.
// Evidence: configured_think_time, median_effective_think_time,
// relative_deviation.
Detection detect_think_time_violation(const LoadSeries& series, double rel_tol = 0.5);

// ---- bottleneck bound -----------------------------------------------------

// Critical iff observed_x / X_max > 1 + rel_tol. Evidence: observed_x,
// x_max, x_errors_estimate (= observed_x - x_max), ratio.
std::optional<Finding> detect_bound_violation(double observed_x, const ServiceProfile& profile,
                                              double rel_tol = 0.02);

// ---- knee -----------------------------------------------------------------

enum class KneeBasis { profile, data };
std::string_view to_string(KneeBasis basis) noexcept;

struct KneeEstimate {
  double s_max_hat = 0.0;
  double r_min_hat = 0.0;
  double think_time = 0.0;
  double n_opt_hat = 0.0;
  KneeBasis basis = KneeBasis::data;
};

// From the profile when given; otherwise S_max ~ 1/max(x), R_min ~ r at the
// smallest n, and Z = the configured think time (0 if absent). Throws
// InsufficientDataError when the data cannot support an estimate.
KneeEstimate estimate_knee(const LoadSeries& series,
                           const std::optional<ServiceProfile>& profile = std::nullopt);

// ---- curve shape ------------------------------------------------------------

// One warning per point whose x drops below (1 - rel_tol) times the running
// maximum. Evidence: x, running_max, drop, drop_fraction.
std::vector<Finding> detect_retrograde(const LoadSeries& series, double rel_tol = 0.02);

// Critical when the least-squares slope of r over points with n > n_opt_hat
// is below slope_fraction * s_max_hat. Evidence: observed_slope,
// expected_slope, slope_ratio, n_opt_hat, points_used.
Detection detect_response_flattening(const LoadSeries& series, const KneeEstimate& knee,
                                     double slope_fraction = 0.5);

enum class GrowthClass { linear, exponential, sublinear, inconclusive };
std::string_view to_string(GrowthClass growth) noexcept;

struct GrowthFit {
  GrowthClass growth = GrowthClass::inconclusive;
  int points_used = 0;
  // r = linear_intercept + linear_slope * n
  double linear_intercept = 0.0;
  double linear_slope = 0.0;
  double linear_sse = 0.0;
  // r = exp_scale * exp(exp_rate * n), fitted on log r
  std::optional<double> exp_scale;
  std::optional<double> exp_rate;
  std::optional<double> exp_sse;
  std::string note;
};

struct GrowthOptions {
  int min_points = 4;
  double slope_fraction = 0.5;
  // Exponential needs residuals below this multiple of the linear fit's.
  double exponential_margin = 0.5;
};

// Classifies post-knee response-time growth. Residual sums for both model
// families are compared on the original r scale.
GrowthFit classify_growth(const LoadSeries& series, const KneeEstimate& knee,
                          const GrowthOptions& options = {});

Finding growth_finding(const GrowthFit& fit);

// ---- suite ------------------------------------------------------------------

struct DiagnosticOptions {
  double bound_tol = 0.02;
  double retrograde_tol = 0.02;
  double think_time_tol = 0.5;
  double slope_fraction = 0.5;
  ThrottlingOptions throttling;
  int growth_min_points = 4;
};

struct Diagnosis {
  std::optional<BoundsSummary> bounds;
  std::optional<KneeEstimate> knee;
  std::vector<AuditRow> audit;
  std::optional<GrowthFit> growth;
  std::vector<Finding> findings;  // sorted, see sort_findings
};

// Runs every applicable detector. A detector that does not apply contributes
// an info finding carrying its note. When the series has no configured think
// time, the profile's think time is used.
Diagnosis diagnose(const LoadSeries& series, const std::optional<ServiceProfile>& profile,
                   const DiagnosticOptions& options = {});

// Orders by detector, then by first affected n.
void sort_findings(std::vector<Finding>& findings);

}  // namespace benchdiag
