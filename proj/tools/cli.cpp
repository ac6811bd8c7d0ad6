#include "cli.hpp"

#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "benchdiag/benchdiag.hpp"

namespace benchdiag::cli {

namespace {

// Raised for unreadable inputs; maps to kInputError.
class InputError : public Error {
 public:
  using Error::Error;
};

// Raised for unwritable outputs; maps to kOutputError.
class OutputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes through a callback to path, or to fallback when path is empty.
template <typename Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot write '" + path + "'");
  write(file);
  file.flush();
  if (!file) throw OutputError("error while writing '" + path + "'");
}

struct SeriesArgs {
  std::string path;
  std::optional<double> think_time;
  std::string r_unit;
};

void add_series_args(CLI::App& cmd, SeriesArgs& args) {
  cmd.add_option("series", args.path, "Load-test series CSV (n, x and r | r_ms | r_s)")->required();
  cmd.add_option("--z", args.think_time, "Configured think time in seconds")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--r-unit", args.r_unit, "Unit of a bare 'r' column")
      ->check(CLI::IsMember({"s", "ms"}));
}

LoadSeries load_series(const SeriesArgs& args) {
  SeriesFormat format;
  if (!args.r_unit.empty()) format.r_unit = parse_time_unit(args.r_unit);
  format.think_time = args.think_time;
  format.source_label = args.path;
  return parse_series(read_file(args.path), format);
}

void add_format(CLI::App& cmd, std::string& format) {
  cmd.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

void absorb(std::vector<Finding>& findings, Detector detector, Detection detection) {
  if (detection.finding) findings.push_back(std::move(*detection.finding));
  if (detection.note) {
    findings.push_back(Finding{detector, Severity::info, std::move(*detection.note), {}, {}});
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sanity checks for load-test data against operational performance laws"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // bounds
  std::string bounds_profile;
  std::string bounds_format = "text";
  auto* bounds = app.add_subcommand("bounds", "Throughput ceiling, response floor and optimal load");
  bounds->add_option("profile", bounds_profile, "Service profile JSON")->required();
  add_format(*bounds, bounds_format);

  // simulate
  std::string sim_profile;
  int sim_n_max = 0;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Canonical X(N), R(N) curves as CSV");
  simulate->add_option("profile", sim_profile, "Service profile JSON")->required();
  simulate->add_option("--n-max", sim_n_max, "Largest user load")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("-o,--out", sim_out, "Output CSV (stdout when omitted)");

  // audit
  SeriesArgs audit_series;
  std::string audit_format = "text";
  bool audit_no_fail = false;
  ThrottlingOptions throttling;
  double audit_think_tol = 0.5;
  auto* audit = app.add_subcommand("audit", "Little's-law audit of client threads");
  add_series_args(*audit, audit_series);
  add_format(*audit, audit_format);
  audit->add_flag("--no-fail", audit_no_fail, "Exit 0 even when findings are critical");
  audit->add_option("--plateau-tol", throttling.plateau_tol, "Relative n_run spread of a plateau")
      ->capture_default_str();
  audit->add_option("--span-factor", throttling.span_factor, "Load growth the plateau must span")
      ->capture_default_str();
  audit->add_option("--think-tol", audit_think_tol, "Relative think-time deviation")
      ->capture_default_str();

  // diagnose
  SeriesArgs diag_series;
  std::string diag_profile;
  std::string diag_format = "json";
  std::string diag_out;
  std::string diag_plot;
  std::string diag_combined;
  bool diag_no_fail = false;
  DiagnosticOptions options;
  auto* diag = app.add_subcommand("diagnose", "Run every detector and write a report");
  add_series_args(*diag, diag_series);
  add_format(*diag, diag_format);
  diag->add_option("--profile", diag_profile, "Service profile JSON");
  diag->add_option("-o,--out", diag_out, "Report path (stdout when omitted)");
  diag->add_option("--plot-data", diag_plot, "Write measured vs bounds vs reference CSV");
  diag->add_option("--combined-plot", diag_combined, "Write throughput-delay pairs CSV");
  diag->add_flag("--no-fail", diag_no_fail, "Exit 0 regardless of verdict");
  diag->add_option("--bound-tol", options.bound_tol, "Bound-violation tolerance")
      ->capture_default_str();
  diag->add_option("--retrograde-tol", options.retrograde_tol, "Retrograde drop tolerance")
      ->capture_default_str();
  diag->add_option("--think-tol", options.think_time_tol, "Relative think-time deviation")
      ->capture_default_str();
  diag->add_option("--slope-fraction", options.slope_fraction,
                   "Minimum post-knee slope as a fraction of S_max")
      ->capture_default_str();
  diag->add_option("--plateau-tol", options.throttling.plateau_tol,
                   "Relative n_run spread of a plateau")
      ->capture_default_str();
  diag->add_option("--span-factor", options.throttling.span_factor,
                   "Load growth the plateau must span")
      ->capture_default_str();
  diag->add_option("--min-growth-points", options.growth_min_points,
                   "Post-knee points needed to classify growth")
      ->capture_default_str();

  // steady
  std::string steady_trace;
  double warmup = kDefaultWarmupFraction;
  std::string steady_format = "text";
  auto* steady = app.add_subcommand("steady", "Steady-state average of a throughput trace");
  steady->add_option("trace", steady_trace, "Trace CSV (t, x_inst)")->required();
  steady->add_option("--warmup", warmup, "Fraction of the run discarded as warm-up")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_format(*steady, steady_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Prints help/version to out and real parse errors to err.
    const int code = app.exit(e, out, err);
    return code == 0 ? kClean : kUsage;
  }

  try {
    if (*bounds) {
      const auto summary = compute_bounds(parse_profile(read_file(bounds_profile)));
      if (bounds_format == "json") {
        out << to_json(summary) << '\n';
      } else {
        write_text(out, summary);
      }
      return kClean;
    }

    if (*simulate) {
      const auto curves = solve_reference(parse_profile(read_file(sim_profile)), sim_n_max);
      emit(sim_out, out, [&](std::ostream& os) { write_curves_csv(os, curves); });
      return kClean;
    }

    if (*audit) {
      const auto series = load_series(audit_series);
      Diagnosis d;
      d.audit = audit_littles_law(series);
      absorb(d.findings, Detector::thread_throttling, detect_thread_throttling(d.audit, throttling));
      absorb(d.findings, Detector::think_time_violation,
             detect_think_time_violation(series, audit_think_tol));
      const Report report = make_report(std::move(d), ReportInputs{audit_series.path, {}});
      if (audit_format == "json") {
        out << to_json(report) << '\n';
      } else {
        write_audit_table(out, *report.audit);
        out << '\n';
        for (const auto& f : report.findings) {
          out << '[' << to_string(f.severity) << "] " << to_string(f.detector) << ": " << f.message
              << '\n';
        }
        out << "verdict: " << to_string(report.verdict) << '\n';
      }
      return report.verdict == Verdict::broken && !audit_no_fail ? kDiagnosticFailure : kClean;
    }

    if (*diag) {
      const auto series = load_series(diag_series);
      std::optional<ServiceProfile> profile;
      if (!diag_profile.empty()) profile = parse_profile(read_file(diag_profile));

      ReportInputs inputs{diag_series.path, {}};
      if (profile) inputs.profile = diag_profile;
      const Report report = make_report(diagnose(series, profile, options), std::move(inputs));

      emit(diag_out, out, [&](std::ostream& os) {
        if (diag_format == "json") {
          os << to_json(report) << '\n';
        } else {
          write_text(os, report);
        }
      });
      if (!diag_plot.empty()) {
        const auto plot_series = series.configured_think_time() || !profile
                                     ? series
                                     : series.with_think_time(profile->think_time());
        emit(diag_plot, out,
             [&](std::ostream& os) { write_plot_data(os, plot_series, profile, report.knee); });
      }
      if (!diag_combined.empty()) {
        emit(diag_combined, out, [&](std::ostream& os) { write_combined_plot_data(os, series); });
      }
      return report.verdict != Verdict::clean && !diag_no_fail ? kDiagnosticFailure : kClean;
    }

    if (*steady) {
      const auto trace = parse_trace(read_file(steady_trace));
      SteadyStateAverage avg;
      try {
        avg = steady_state_average(trace, warmup);
      } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return kDiagnosticFailure;
      }
      if (steady_format == "json") {
        nlohmann::ordered_json doc{{"x_bar", avg.x_bar},
                                   {"t_start", avg.t_start},
                                   {"t_end", avg.t_end},
                                   {"warmup_fraction", warmup}};
        out << doc.dump(2) << '\n';
      } else {
        out << "x_bar:  " << avg.x_bar << " TPS\n"
            << "window: [" << avg.t_start << ", " << avg.t_end << "] s\n";
      }
      return kClean;
    }
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kOutputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kUsage;
}

}  // namespace benchdiag::cli
