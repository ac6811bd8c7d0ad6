#include "benchdiag/report.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>

#include <json.hpp>

#include "benchdiag/reference.hpp"

namespace benchdiag {

namespace {

using Json = nlohmann::ordered_json;

Json bounds_json(const BoundsSummary& b) {
  return Json{{"x_max", b.x_max},
              {"r_min", b.r_min},
              {"n_opt", b.n_opt},
              {"bottleneck_label", b.bottleneck_label},
              {"bottleneck_tied", b.bottleneck_tied}};
}

Json knee_json(const KneeEstimate& k) {
  return Json{{"s_max_hat", k.s_max_hat},
              {"r_min_hat", k.r_min_hat},
              {"think_time", k.think_time},
              {"n_opt_hat", k.n_opt_hat},
              {"basis", std::string(to_string(k.basis))}};
}

Json audit_json(const std::vector<AuditRow>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    out.push_back(Json{{"n_was", row.n_was},
                       {"x_was", row.x_was},
                       {"r_was", row.r_was},
                       {"n_run", row.n_run},
                       {"n_idle", row.n_idle}});
  }
  return out;
}

Json growth_json(const GrowthFit& g) {
  Json out{{"class", std::string(to_string(g.growth))}, {"points_used", g.points_used}};
  if (g.growth != GrowthClass::inconclusive) {
    out["linear"] = Json{{"intercept", g.linear_intercept},
                         {"slope", g.linear_slope},
                         {"sse", g.linear_sse}};
    out["exponential"] = g.exp_sse ? Json{{"scale", *g.exp_scale},
                                          {"rate", *g.exp_rate},
                                          {"sse", *g.exp_sse}}
                                   : Json(nullptr);
  }
  if (!g.note.empty()) out["note"] = g.note;
  return out;
}

Json finding_json(const Finding& f) {
  Json evidence = Json::object();
  for (const auto& [key, value] : f.evidence) evidence[key] = value;
  return Json{{"detector", std::string(to_string(f.detector))},
              {"severity", std::string(to_string(f.severity))},
              {"message", f.message},
              {"evidence", evidence},
              {"affected_points", f.affected_points}};
}

template <typename T, typename F>
Json optional_json(const std::optional<T>& value, F&& convert) {
  return value ? convert(*value) : Json(nullptr);
}

struct BoundLines {
  double s_max;
  double r_min;
  double think;

  double x_bound(double n) const { return std::min(n / (r_min + think), 1.0 / s_max); }
  double r_bound(double n) const { return std::max(r_min, n * s_max - think); }
};

}  // namespace

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::clean: return "clean";
    case Verdict::suspect: return "suspect";
    case Verdict::broken: return "broken";
  }
  return "unknown";
}

Verdict verdict_of(const std::vector<Finding>& findings) noexcept {
  const auto has = [&findings](Severity s) {
    return std::any_of(findings.begin(), findings.end(),
                       [s](const Finding& f) { return f.severity == s; });
  };
  if (has(Severity::critical)) return Verdict::broken;
  if (has(Severity::warning)) return Verdict::suspect;
  return Verdict::clean;
}

Report make_report(Diagnosis diagnosis, ReportInputs inputs) {
  Report report;
  report.inputs = std::move(inputs);
  report.bounds = std::move(diagnosis.bounds);
  report.knee = diagnosis.knee;
  report.audit = std::move(diagnosis.audit);
  report.growth = std::move(diagnosis.growth);
  report.findings = std::move(diagnosis.findings);
  sort_findings(report.findings);
  report.verdict = verdict_of(report.findings);
  return report;
}

std::string to_json(const Report& report, int indent) {
  Json findings = Json::array();
  for (const auto& f : report.findings) findings.push_back(finding_json(f));

  Json doc;
  doc["version"] = report.tool_version;
  doc["inputs"] = Json{{"series", report.inputs.series},
                       {"profile", report.inputs.profile ? Json(*report.inputs.profile)
                                                         : Json(nullptr)}};
  doc["bounds"] = optional_json(report.bounds, bounds_json);
  doc["knee"] = optional_json(report.knee, knee_json);
  doc["audit"] = optional_json(report.audit, audit_json);
  doc["growth"] = optional_json(report.growth, growth_json);
  doc["findings"] = std::move(findings);
  doc["verdict"] = std::string(to_string(report.verdict));
  return doc.dump(indent);
}

std::string to_json(const BoundsSummary& bounds, int indent) {
  return bounds_json(bounds).dump(indent);
}

void write_text(std::ostream& out, const BoundsSummary& b) {
  out << "x_max:      " << b.x_max << " TPS\n"
      << "r_min:      " << b.r_min << " s\n"
      << "n_opt:      " << b.n_opt << " VUsers\n"
      << "bottleneck: " << b.bottleneck_label << (b.bottleneck_tied ? " (tied)" : "") << '\n';
}

void write_audit_table(std::ostream& out, const std::vector<AuditRow>& rows) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setw(8) << "n_was" << std::setw(12) << "x_was" << std::setw(12) << "r_was"
      << std::setw(12) << "n_run" << std::setw(12) << "n_idle" << '\n';
  out << std::fixed;
  for (const auto& row : rows) {
    out << std::setw(8) << row.n_was << std::setprecision(2) << std::setw(12) << row.x_was
        << std::setprecision(4) << std::setw(12) << row.r_was << std::setprecision(2)
        << std::setw(12) << row.n_run << std::setw(12) << row.n_idle << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_text(std::ostream& out, const Report& report) {
  out << "series:  " << report.inputs.series << '\n';
  if (report.inputs.profile) out << "profile: " << *report.inputs.profile << '\n';
  if (report.bounds) {
    out << "\nbounds\n";
    write_text(out, *report.bounds);
  }
  if (report.knee) {
    out << "\nknee (" << to_string(report.knee->basis) << ")\n"
        << "s_max_hat:  " << report.knee->s_max_hat << " s\n"
        << "r_min_hat:  " << report.knee->r_min_hat << " s\n"
        << "n_opt_hat:  " << report.knee->n_opt_hat << " VUsers\n";
  }
  if (report.growth) out << "growth:     " << to_string(report.growth->growth) << '\n';
  out << "\nfindings\n";
  if (report.findings.empty()) out << "  (none)\n";
  for (const auto& f : report.findings) {
    out << "  [" << to_string(f.severity) << "] " << to_string(f.detector) << ": " << f.message
        << '\n';
  }
  out << "\nverdict: " << to_string(report.verdict) << '\n';
}

void write_plot_data(std::ostream& out, const LoadSeries& series,
                     const std::optional<ServiceProfile>& profile,
                     const std::optional<KneeEstimate>& knee) {
  std::optional<BoundLines> lines;
  if (profile) {
    lines = BoundLines{profile->max_service_time(), compute_r_min(*profile), profile->think_time()};
  } else if (knee) {
    lines = BoundLines{knee->s_max_hat, knee->r_min_hat, knee->think_time};
  }
  std::optional<CanonicalCurves> reference;
  if (profile) reference = solve_reference(*profile, series.points().back().n);

  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "n,x,r";
  if (lines) out << ",x_bound,r_bound";
  if (reference) out << ",x_ref,r_ref";
  out << '\n';
  for (const auto& p : series.points()) {
    out << p.n << ',' << p.x << ',' << p.r;
    if (lines) out << ',' << lines->x_bound(p.n) << ',' << lines->r_bound(p.n);
    if (reference) {
      const auto& row = reference->rows[static_cast<std::size_t>(p.n - 1)];
      out << ',' << row.x << ',' << row.r;
    }
    out << '\n';
  }
  out.precision(precision);
}

void write_combined_plot_data(std::ostream& out, const LoadSeries& series) {
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# combined throughput-delay view; the optimal load N_opt cannot be located from it,\n"
      << "# use the separate X(N) and R(N) plot data for that\n"
      << "x,r,n\n";
  for (const auto& p : series.points()) out << p.x << ',' << p.r << ',' << p.n << '\n';
  out.precision(precision);
}

}  // namespace benchdiag
