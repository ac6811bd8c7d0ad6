#pragma once

// Readers for load-test series, instrumentation profiles and instantaneous
// throughput traces, plus steady-state averaging of a trace.
//
// Every time quantity is converted to seconds on the way in.

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "benchdiag/model.hpp"

namespace benchdiag {

enum class TimeUnit { seconds, milliseconds };

// Seconds per unit.
double seconds_per(TimeUnit unit) noexcept;
// Accepts "s" and "ms".
TimeUnit parse_time_unit(std::string_view text);

struct LoadPoint {
  int n = 0;
  double x = 0.0;
  double r = 0.0;

  friend bool operator==(const LoadPoint&, const LoadPoint&) = default;
};

// Measured (N, X, R) points, strictly increasing in n.
class LoadSeries {
 public:
  // Throws ValidationError on an empty, unsorted, duplicated or
  // non-finite series.
  explicit LoadSeries(std::vector<LoadPoint> points,
                      std::optional<double> configured_think_time = std::nullopt,
                      std::string source_label = {});

  const std::vector<LoadPoint>& points() const noexcept { return points_; }
  const std::optional<double>& configured_think_time() const noexcept { return think_time_; }
  const std::string& source_label() const noexcept { return source_label_; }

  LoadSeries with_think_time(std::optional<double> think_time) const;

  friend bool operator==(const LoadSeries&, const LoadSeries&) = default;

 private:
  std::vector<LoadPoint> points_;
  std::optional<double> think_time_;
  std::string source_label_;
};

// How to read a series CSV. The response column is "r_ms", "r_s" or a bare
// "r"; a suffixed header declares its own unit, a bare "r" takes r_unit
// (seconds when unset). A declared r_unit that contradicts a suffixed
// header is an error.
struct SeriesFormat {
  std::optional<TimeUnit> r_unit;
  std::optional<double> think_time;
  std::string source_label;
  std::string n_column = "n";
  std::string x_column = "x";
};

LoadSeries parse_series(std::string_view text, const SeriesFormat& format = {});

// Writes "n,x,r" with r in seconds at round-trip precision.
void serialize_series(std::ostream& out, const LoadSeries& series);

// JSON: {"stages":[{"label":..,"service_time":..}], "think_time":.., "time_unit":"s"|"ms"}.
// time_unit defaults to seconds when absent.
ServiceProfile parse_profile(std::string_view text);

struct TraceSample {
  double t = 0.0;
  double x_inst = 0.0;
};

class ThroughputTrace {
 public:
  // Throws ValidationError unless samples are nonempty, finite and strictly
  // increasing in t.
  explicit ThroughputTrace(std::vector<TraceSample> samples, int load_n = 0);

  const std::vector<TraceSample>& samples() const noexcept { return samples_; }
  int load_n() const noexcept { return load_n_; }

 private:
  std::vector<TraceSample> samples_;
  int load_n_;
};

// CSV with header t,x_inst.
ThroughputTrace parse_trace(std::string_view text, int load_n = 0);

struct SteadyStateAverage {
  double x_bar = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};

inline constexpr double kDefaultWarmupFraction = 0.25;

// Drops samples earlier than t_first + warmup_fraction * (t_last - t_first)
// and returns the trapezoidal time-weighted mean of what is left. Throws
// InsufficientDataError when fewer than two samples survive the cut.
SteadyStateAverage steady_state_average(const ThroughputTrace& trace,
                                        double warmup_fraction = kDefaultWarmupFraction);

}  // namespace benchdiag
