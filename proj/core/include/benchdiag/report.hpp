#pragma once

// Report assembly and serialization: JSON reports, plain-text summaries and
// plot-ready CSV exports.

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "benchdiag/diagnostics.hpp"
#include "benchdiag/ingest.hpp"
#include "benchdiag/model.hpp"

namespace benchdiag {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Verdict { clean, suspect, broken };
std::string_view to_string(Verdict verdict) noexcept;

// broken iff any critical finding, suspect iff any warning, clean otherwise.
Verdict verdict_of(const std::vector<Finding>& findings) noexcept;

struct ReportInputs {
  std::string series;
  std::optional<std::string> profile;
};

struct Report {
  std::string tool_version{kToolVersion};
  ReportInputs inputs;
  std::optional<BoundsSummary> bounds;
  std::optional<KneeEstimate> knee;
  std::optional<std::vector<AuditRow>> audit;
  std::optional<GrowthFit> growth;
  std::vector<Finding> findings;
  Verdict verdict = Verdict::clean;
};

Report make_report(Diagnosis diagnosis, ReportInputs inputs);

// Keys in fixed order: version, inputs, bounds, knee, audit, growth,
// findings, verdict. Absent sections are null.
std::string to_json(const Report& report, int indent = 2);
std::string to_json(const BoundsSummary& bounds, int indent = 2);

void write_text(std::ostream& out, const Report& report);
void write_text(std::ostream& out, const BoundsSummary& bounds);
void write_audit_table(std::ostream& out, const std::vector<AuditRow>& rows);

// Per measured n: n,x,r,x_bound,r_bound, plus x_ref,r_ref from the
// reference curves when a profile is supplied. Bounding lines come from the
// profile when given, otherwise from the knee estimate.
void write_plot_data(std::ostream& out, const LoadSeries& series,
                     const std::optional<ServiceProfile>& profile,
                     const std::optional<KneeEstimate>& knee);

// Throughput-delay pairs (x, r) labeled by n. The optimal load cannot be
// located from this view; the export carries a comment saying so.
void write_combined_plot_data(std::ostream& out, const LoadSeries& series);

}  // namespace benchdiag
