#include "benchdiag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "benchdiag/error.hpp"

namespace benchdiag {

namespace {

std::string num(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sse = 0.0;
};

// Ordinary least squares; xs must hold at least two distinct values.
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double count = static_cast<double>(xs.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= count;
  mean_y /= count;

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double residual = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.sse += residual * residual;
  }
  return fit;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<LoadPoint> beyond_knee(const LoadSeries& series, const KneeEstimate& knee) {
  std::vector<LoadPoint> out;
  for (const auto& p : series.points()) {
    if (p.n > knee.n_opt_hat) out.push_back(p);
  }
  return out;
}

Detection not_applicable(std::string why) { return Detection{std::nullopt, std::move(why)}; }

}  // namespace

std::string_view to_string(Detector detector) noexcept {
  switch (detector) {
    case Detector::bound_violation: return "BOUND_VIOLATION";
    case Detector::thread_throttling: return "THREAD_THROTTLING";
    case Detector::think_time_violation: return "THINK_TIME_VIOLATION";
    case Detector::retrograde_throughput: return "RETROGRADE_THROUGHPUT";
    case Detector::response_flattening: return "RESPONSE_FLATTENING";
    case Detector::growth_class: return "GROWTH_CLASS";
  }
  return "UNKNOWN";
}

std::string_view to_string(Severity severity) noexcept {
  switch (severity) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::critical: return "critical";
  }
  return "unknown";
}

std::string_view to_string(KneeBasis basis) noexcept {
  return basis == KneeBasis::profile ? "profile" : "data";
}

std::string_view to_string(GrowthClass growth) noexcept {
  switch (growth) {
    case GrowthClass::linear: return "linear";
    case GrowthClass::exponential: return "exponential";
    case GrowthClass::sublinear: return "sublinear";
    case GrowthClass::inconclusive: return "inconclusive";
  }
  return "unknown";
}

AuditRow make_audit_row(const LoadPoint& point) {
  AuditRow row{point.n, point.x, point.r, point.x * point.r, 0.0};
  row.n_idle = row.n_was - row.n_run;
  return row;
}

std::vector<AuditRow> audit_littles_law(const LoadSeries& series) {
  std::vector<AuditRow> rows;
  rows.reserve(series.points().size());
  for (const auto& p : series.points()) rows.push_back(make_audit_row(p));
  return rows;
}

Detection detect_thread_throttling(const std::vector<AuditRow>& rows,
                                   const ThrottlingOptions& options) {
  if (rows.size() < 3) {
    return not_applicable("thread-throttling check needs at least 3 load points, got " +
                          std::to_string(rows.size()));
  }
  const std::size_t last = rows.size() - 1;
  std::optional<std::size_t> start;
  for (std::size_t i = last; i-- > 0;) {
    if (rows[last].n_was >= options.span_factor * rows[i].n_was) {
      start = i;
      break;
    }
  }
  if (!start) {
    return not_applicable("offered load never grows by a factor of " + num(options.span_factor) +
                          "; thread-throttling check skipped");
  }

  std::vector<double> running;
  std::vector<int> affected;
  for (std::size_t i = *start; i <= last; ++i) {
    running.push_back(rows[i].n_run);
    affected.push_back(rows[i].n_was);
  }
  const auto [lo, hi] = std::minmax_element(running.begin(), running.end());
  if (*lo <= 0.0) return Detection{};
  const double spread = (*hi - *lo) / *lo;
  if (spread >= options.plateau_tol) return Detection{};

  const double plateau = median(running);
  Finding f;
  f.detector = Detector::thread_throttling;
  f.severity = Severity::critical;
  f.message = "Little's law shows only about " + num(plateau) +
              " client threads busy (N_run = X * R) while offered load grows from " +
              std::to_string(rows[*start].n_was) + " to " + std::to_string(rows[last].n_was) +
              "; the remaining threads sit idle, so the load generator is throttled by its "
              "thread pool and the measured curves above this load are not valid";
  f.evidence = {{"plateau_level", plateau},
                {"n_run_min", *lo},
                {"n_run_max", *hi},
                {"relative_spread", spread},
                {"n_was_start", static_cast<double>(rows[*start].n_was)},
                {"n_was_end", static_cast<double>(rows[last].n_was)}};
  f.affected_points = std::move(affected);
  return Detection{std::move(f), std::nullopt};
}

double effective_think_time(const LoadPoint& point) {
  if (point.x <= 0.0) {
    throw InsufficientDataError("effective think time is undefined at zero throughput (n=" +
                                std::to_string(point.n) + ")");
  }
  return point.n / point.x - point.r;
}

Detection detect_think_time_violation(const LoadSeries& series, double rel_tol) {
  const auto& configured = series.configured_think_time();
  if (!configured || *configured <= 0.0) {
    return not_applicable("no positive configured think time; think-time check skipped");
  }
  std::vector<double> implied;
  std::vector<int> affected;
  int skipped = 0;
  for (const auto& p : series.points()) {
    if (p.x <= 0.0) {
      ++skipped;
      continue;
    }
    implied.push_back(effective_think_time(p));
    affected.push_back(p.n);
  }
  if (implied.empty()) {
    return not_applicable("every load point has zero throughput; think time is undefined");
  }
  const double z_eff = median(implied);
  const double deviation = std::abs(z_eff - *configured) / *configured;
  if (deviation <= rel_tol) return Detection{};

  Finding f;
  f.detector = Detector::think_time_violation;
  f.severity = Severity::critical;
  f.message = "Measured N, X and R imply a median think time of " + num(z_eff) +
              " s (Z = N/X - R) against a configured " + num(*configured) +
              " s; the client scripts are not pacing requests as configured" +
              (z_eff < 0.0 ? ", and a negative value means the measurements are mutually "
                             "inconsistent"
                           : "");
  f.evidence = {{"configured_think_time", *configured},
                {"median_effective_think_time", z_eff},
                {"relative_deviation", deviation},
                {"points_skipped", static_cast<double>(skipped)}};
  f.affected_points = std::move(affected);
  return Detection{std::move(f), std::nullopt};
}

std::optional<Finding> detect_bound_violation(double observed_x, const ServiceProfile& profile,
                                              double rel_tol) {
  if (!std::isfinite(observed_x) || observed_x < 0.0) {
    throw ValidationError("observed throughput must be finite and nonnegative");
  }
  const double x_max = compute_x_max(profile);
  const double ratio = observed_x / x_max;
  if (!(ratio > 1.0 + rel_tol)) return std::nullopt;

  const double excess = observed_x - x_max;
  Finding f;
  f.detector = Detector::bound_violation;
  f.severity = Severity::critical;
  f.message = "Observed throughput " + num(observed_x) +
              " TPS exceeds the bottleneck ceiling X_max = 1/S_max = " + num(x_max) + " TPS (stage '" +
              profile.bottleneck().label +
              "'). Either the benchmark measurement is wrong or the instrumentation data are "
              "wrong. If the instrumentation holds, about " +
              num(excess) +
              " TPS of the measured rate are errored transactions counted as completions "
              "(X_client = X_actual + X_errors)";
  f.evidence = {{"observed_x", observed_x},
                {"x_max", x_max},
                {"x_errors_estimate", excess},
                {"ratio", ratio}};
  return f;
}

KneeEstimate estimate_knee(const LoadSeries& series, const std::optional<ServiceProfile>& profile) {
  if (profile) {
    return KneeEstimate{profile->max_service_time(), compute_r_min(*profile),
                        profile->think_time(), compute_n_opt(*profile), KneeBasis::profile};
  }
  const auto& points = series.points();
  if (points.size() < 2) {
    throw InsufficientDataError("knee estimation from data needs at least 2 load points");
  }
  const double x_peak =
      std::max_element(points.begin(), points.end(), [](const LoadPoint& a, const LoadPoint& b) {
        return a.x < b.x;
      })->x;
  if (x_peak <= 0.0) throw InsufficientDataError("every load point has zero throughput");
  const double r_min = points.front().r;
  if (r_min <= 0.0) {
    throw InsufficientDataError("response time at the lightest load is zero; no R_min estimate");
  }
  KneeEstimate knee;
  knee.s_max_hat = 1.0 / x_peak;
  knee.r_min_hat = r_min;
  knee.think_time = series.configured_think_time().value_or(0.0);
  knee.n_opt_hat = (knee.r_min_hat + knee.think_time) / knee.s_max_hat;
  knee.basis = KneeBasis::data;
  return knee;
}

std::vector<Finding> detect_retrograde(const LoadSeries& series, double rel_tol) {
  std::vector<Finding> findings;
  double running_max = -1.0;
  for (const auto& p : series.points()) {
    if (running_max >= 0.0 && p.x < (1.0 - rel_tol) * running_max) {
      Finding f;
      f.detector = Detector::retrograde_throughput;
      f.severity = Severity::warning;
      f.message = "Throughput falls to " + num(p.x) + " TPS at n=" + std::to_string(p.n) +
                  " after reaching " + num(running_max) +
                  " TPS; retrograde throughput means added load is degrading the system "
                  "and needs an explanation before the data are used";
      f.evidence = {{"x", p.x},
                    {"running_max", running_max},
                    {"drop", running_max - p.x},
                    {"drop_fraction", (running_max - p.x) / running_max}};
      f.affected_points = {p.n};
      findings.push_back(std::move(f));
    }
    running_max = std::max(running_max, p.x);
  }
  return findings;
}

Detection detect_response_flattening(const LoadSeries& series, const KneeEstimate& knee,
                                     double slope_fraction) {
  const auto post = beyond_knee(series, knee);
  if (post.size() < 2) {
    return not_applicable("fewer than 2 load points beyond the knee at n=" + num(knee.n_opt_hat) +
                          "; flattening check skipped");
  }
  std::vector<double> ns;
  std::vector<double> rs;
  std::vector<int> affected;
  for (const auto& p : post) {
    ns.push_back(p.n);
    rs.push_back(p.r);
    affected.push_back(p.n);
  }
  const LineFit fit = fit_line(ns, rs);
  const double expected = knee.s_max_hat;
  if (fit.slope >= slope_fraction * expected) return Detection{};

  Finding f;
  f.detector = Detector::response_flattening;
  f.severity = Severity::critical;
  f.message = "Above the knee (n > " + num(knee.n_opt_hat) + ") response time grows by " +
              num(fit.slope) + " s per user, far below the bottleneck slope S_max = " +
              num(expected) +
              " s per user that saturation forces; a flattened response curve signals a "
              "measurement problem, not good scalability";
  f.evidence = {{"observed_slope", fit.slope},
                {"expected_slope", expected},
                {"slope_ratio", fit.slope / expected},
                {"n_opt_hat", knee.n_opt_hat},
                {"points_used", static_cast<double>(post.size())}};
  f.affected_points = std::move(affected);
  return Detection{std::move(f), std::nullopt};
}

GrowthFit classify_growth(const LoadSeries& series, const KneeEstimate& knee,
                          const GrowthOptions& options) {
  GrowthFit fit;
  const auto post = beyond_knee(series, knee);
  fit.points_used = static_cast<int>(post.size());
  if (fit.points_used < std::max(options.min_points, 2)) {
    fit.note = std::to_string(fit.points_used) + " points beyond the knee, need " +
               std::to_string(options.min_points);
    return fit;
  }

  std::vector<double> ns;
  std::vector<double> rs;
  bool all_positive = true;
  for (const auto& p : post) {
    ns.push_back(p.n);
    rs.push_back(p.r);
    all_positive = all_positive && p.r > 0.0;
  }
  const LineFit line = fit_line(ns, rs);
  fit.linear_intercept = line.intercept;
  fit.linear_slope = line.slope;
  fit.linear_sse = line.sse;

  if (all_positive) {
    std::vector<double> logs;
    for (double r : rs) logs.push_back(std::log(r));
    const LineFit log_line = fit_line(ns, logs);
    const double scale = std::exp(log_line.intercept);
    double sse = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double residual = rs[i] - scale * std::exp(log_line.slope * ns[i]);
      sse += residual * residual;
    }
    fit.exp_scale = scale;
    fit.exp_rate = log_line.slope;
    fit.exp_sse = sse;
  } else {
    fit.note = "nonpositive response times; exponential fit skipped";
  }

  if (fit.exp_sse && *fit.exp_rate > 0.0 &&
      *fit.exp_sse < options.exponential_margin * fit.linear_sse) {
    fit.growth = GrowthClass::exponential;
  } else if (fit.linear_slope < options.slope_fraction * knee.s_max_hat) {
    fit.growth = GrowthClass::sublinear;
  } else {
    fit.growth = GrowthClass::linear;
  }
  return fit;
}

Finding growth_finding(const GrowthFit& fit) {
  Finding f;
  f.detector = Detector::growth_class;
  f.severity = Severity::info;
  switch (fit.growth) {
    case GrowthClass::linear:
      f.message = "Post-knee response time grows linearly, as expected once the bottleneck saturates";
      break;
    case GrowthClass::exponential:
      f.message = "Post-knee response time is fitted decisively better by an exponential than "
                  "by a line; saturation alone produces linear growth, so look for thrashing "
                  "or a measurement artifact";
      break;
    case GrowthClass::sublinear:
      f.message = "Post-knee response time grows slower than the bottleneck allows; this is a "
                  "symptom of a throttled or broken harness, not of good scalability";
      break;
    case GrowthClass::inconclusive:
      f.message = "Response-time growth class is inconclusive: " + fit.note;
      break;
  }
  f.evidence = {{"points_used", static_cast<double>(fit.points_used)}};
  if (fit.growth != GrowthClass::inconclusive) {
    f.evidence["linear_intercept"] = fit.linear_intercept;
    f.evidence["linear_slope"] = fit.linear_slope;
    f.evidence["linear_sse"] = fit.linear_sse;
    if (fit.exp_sse) {
      f.evidence["exp_scale"] = *fit.exp_scale;
      f.evidence["exp_rate"] = *fit.exp_rate;
      f.evidence["exp_sse"] = *fit.exp_sse;
    }
  }
  return f;
}

void sort_findings(std::vector<Finding>& findings) {
  std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    if (a.detector != b.detector) return a.detector < b.detector;
    const int an = a.affected_points.empty() ? 0 : a.affected_points.front();
    const int bn = b.affected_points.empty() ? 0 : b.affected_points.front();
    return an < bn;
  });
}

Diagnosis diagnose(const LoadSeries& input, const std::optional<ServiceProfile>& profile,
                   const DiagnosticOptions& options) {
  Diagnosis result;
  std::vector<Finding>& findings = result.findings;

  auto note = [&findings](Detector detector, std::string message) {
    Finding f;
    f.detector = detector;
    f.severity = Severity::info;
    f.message = std::move(message);
    findings.push_back(std::move(f));
  };
  auto take = [&](Detector detector, Detection detection) {
    if (detection.finding) findings.push_back(std::move(*detection.finding));
    if (detection.note) note(detector, std::move(*detection.note));
  };

  const LoadSeries series =
      (!input.configured_think_time() && profile) ? input.with_think_time(profile->think_time())
                                                  : input;

  if (profile) {
    result.bounds = compute_bounds(*profile);
    const auto& points = series.points();
    const double peak =
        std::max_element(points.begin(), points.end(), [](const LoadPoint& a, const LoadPoint& b) {
          return a.x < b.x;
        })->x;
    if (auto f = detect_bound_violation(peak, *profile, options.bound_tol)) {
      for (const auto& p : points) {
        if (p.x / result.bounds->x_max > 1.0 + options.bound_tol) f->affected_points.push_back(p.n);
      }
      findings.push_back(std::move(*f));
    }
  }

  result.audit = audit_littles_law(series);
  take(Detector::thread_throttling, detect_thread_throttling(result.audit, options.throttling));
  take(Detector::think_time_violation,
       detect_think_time_violation(series, options.think_time_tol));

  for (auto& f : detect_retrograde(series, options.retrograde_tol)) findings.push_back(std::move(f));

  try {
    result.knee = estimate_knee(series, profile);
  } catch (const InsufficientDataError& e) {
    note(Detector::response_flattening, std::string("knee not estimated: ") + e.what());
  }
  if (result.knee) {
    take(Detector::response_flattening,
         detect_response_flattening(series, *result.knee, options.slope_fraction));
    result.growth = classify_growth(
        series, *result.knee,
        GrowthOptions{options.growth_min_points, options.slope_fraction, 0.5});
    findings.push_back(growth_finding(*result.growth));
  }

  sort_findings(findings);
  return result;
}

}  // namespace benchdiag
