#include "benchdiag/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include <json.hpp>

#include "benchdiag/error.hpp"

namespace benchdiag {

namespace {

double to_seconds(double value, TimeUnit unit) {
  // Dividing keeps decimal millisecond values correctly rounded (40 ms -> 0.04).
  return unit == TimeUnit::milliseconds ? value / 1000.0 : value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Line {
  std::size_t number;
  std::vector<std::string_view> fields;
};

// Splits CSV text into non-blank, non-comment lines of trimmed fields.
std::vector<Line> read_csv(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto eol = text.find('\n');
    std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    raw = trim(raw);
    if (raw.empty() || raw.front() == '#') continue;

    Line line{number, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = raw.find(',', start);
      line.fields.push_back(trim(raw.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

double parse_double(std::string_view field, std::size_t line, std::string_view column) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError("column '" + std::string(column) + "': '" + std::string(field) +
                         "' is not a finite number",
                     line);
  }
  return value;
}

int parse_int(std::string_view field, std::size_t line, std::string_view column) {
  int value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError("column '" + std::string(column) + "': '" + std::string(field) +
                         "' is not an integer",
                     line);
  }
  return value;
}

std::size_t find_column(const Line& header, std::string_view name) {
  const auto it = std::find(header.fields.begin(), header.fields.end(), name);
  if (it == header.fields.end()) {
    throw ParseError("missing column '" + std::string(name) + "'", header.number);
  }
  return static_cast<std::size_t>(it - header.fields.begin());
}

}  // namespace

double seconds_per(TimeUnit unit) noexcept {
  return unit == TimeUnit::milliseconds ? 1e-3 : 1.0;
}

TimeUnit parse_time_unit(std::string_view text) {
  if (text == "s") return TimeUnit::seconds;
  if (text == "ms") return TimeUnit::milliseconds;
  throw ParseError("unknown time unit '" + std::string(text) + "' (expected s or ms)");
}

LoadSeries::LoadSeries(std::vector<LoadPoint> points, std::optional<double> configured_think_time,
                       std::string source_label)
    : points_(std::move(points)),
      think_time_(configured_think_time),
      source_label_(std::move(source_label)) {
  if (points_.empty()) throw ValidationError("load series has no points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.n < 1) throw ValidationError("load point n must be at least 1");
    if (!std::isfinite(p.x) || p.x < 0.0 || !std::isfinite(p.r) || p.r < 0.0) {
      throw ValidationError("load point at n=" + std::to_string(p.n) +
                            " needs finite, nonnegative x and r");
    }
    if (i > 0 && p.n <= points_[i - 1].n) {
      throw ValidationError(p.n == points_[i - 1].n
                                ? "duplicate load point n=" + std::to_string(p.n)
                                : "load points are not increasing in n");
    }
  }
  if (think_time_ && (!std::isfinite(*think_time_) || *think_time_ < 0.0)) {
    throw ValidationError("configured think time must be finite and nonnegative");
  }
}

LoadSeries LoadSeries::with_think_time(std::optional<double> think_time) const {
  return LoadSeries(points_, think_time, source_label_);
}

LoadSeries parse_series(std::string_view text, const SeriesFormat& format) {
  const auto lines = read_csv(text);
  if (lines.empty()) throw ParseError("series file is empty");
  if (lines.size() == 1) throw ParseError("series file has a header but no rows", lines[0].number);

  const Line& header = lines.front();
  const std::size_t n_col = find_column(header, format.n_column);
  const std::size_t x_col = find_column(header, format.x_column);

  std::optional<std::size_t> r_col;
  TimeUnit unit = format.r_unit.value_or(TimeUnit::seconds);
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    std::optional<TimeUnit> declared;
    const auto name = header.fields[i];
    if (name == "r_ms") {
      declared = TimeUnit::milliseconds;
    } else if (name == "r_s") {
      declared = TimeUnit::seconds;
    } else if (name != "r") {
      continue;
    }
    if (r_col) throw ParseError("more than one response-time column", header.number);
    if (declared) {
      if (format.r_unit && *format.r_unit != *declared) {
        throw ParseError("column '" + std::string(name) + "' contradicts the declared r unit",
                         header.number);
      }
      unit = *declared;
    }
    r_col = i;
  }
  if (!r_col) throw ParseError("missing response-time column (r, r_ms or r_s)", header.number);

  std::vector<LoadPoint> points;
  points.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    if (line.fields.size() != header.fields.size()) {
      throw ParseError("expected " + std::to_string(header.fields.size()) + " fields, got " +
                           std::to_string(line.fields.size()),
                       line.number);
    }
    LoadPoint p{
        parse_int(line.fields[n_col], line.number, format.n_column),
        parse_double(line.fields[x_col], line.number, format.x_column),
        to_seconds(parse_double(line.fields[*r_col], line.number, header.fields[*r_col]), unit),
    };
    if (p.n < 1) throw ParseError("n must be at least 1", line.number);
    if (p.x < 0.0 || p.r < 0.0) throw ParseError("x and r must be nonnegative", line.number);
    if (!points.empty()) {
      if (p.n == points.back().n) {
        throw ParseError("duplicate load point n=" + std::to_string(p.n), line.number);
      }
      if (p.n < points.back().n) throw ParseError("n is not increasing", line.number);
    }
    points.push_back(p);
  }
  return LoadSeries(std::move(points), format.think_time, format.source_label);
}

void serialize_series(std::ostream& out, const LoadSeries& series) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "n,x,r\n";
  for (const auto& p : series.points()) out << p.n << ',' << p.x << ',' << p.r << '\n';
  out.precision(old_precision);
}

ServiceProfile parse_profile(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid profile JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw ParseError("profile must be a JSON object");
    const TimeUnit unit =
        doc.contains("time_unit") ? parse_time_unit(doc.at("time_unit").get<std::string>())
                                  : TimeUnit::seconds;
    if (!doc.contains("stages") || !doc.at("stages").is_array()) {
      throw ParseError("profile needs a \"stages\" array");
    }
    std::vector<Stage> stages;
    for (const auto& entry : doc.at("stages")) {
      stages.push_back(Stage{entry.at("label").get<std::string>(),
                             to_seconds(entry.at("service_time").get<double>(), unit)});
    }
    const double think = doc.contains("think_time")
                             ? to_seconds(doc.at("think_time").get<double>(), unit)
                             : 0.0;
    return ServiceProfile(std::move(stages), think);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid profile: ") + e.what());
  }
}

ThroughputTrace::ThroughputTrace(std::vector<TraceSample> samples, int load_n)
    : samples_(std::move(samples)), load_n_(load_n) {
  if (samples_.empty()) throw ValidationError("throughput trace has no samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.x_inst)) {
      throw ValidationError("trace samples must be finite");
    }
    if (i > 0 && s.t <= samples_[i - 1].t) {
      throw ValidationError("trace times must be strictly increasing");
    }
  }
}

ThroughputTrace parse_trace(std::string_view text, int load_n) {
  const auto lines = read_csv(text);
  if (lines.empty()) throw ParseError("trace file is empty");
  const Line& header = lines.front();
  const std::size_t t_col = find_column(header, "t");
  const std::size_t x_col = find_column(header, "x_inst");

  std::vector<TraceSample> samples;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    if (line.fields.size() != header.fields.size()) {
      throw ParseError("expected " + std::to_string(header.fields.size()) + " fields, got " +
                           std::to_string(line.fields.size()),
                       line.number);
    }
    TraceSample s{parse_double(line.fields[t_col], line.number, "t"),
                  parse_double(line.fields[x_col], line.number, "x_inst")};
    if (!samples.empty() && s.t <= samples.back().t) {
      throw ParseError("t is not strictly increasing", line.number);
    }
    samples.push_back(s);
  }
  if (samples.empty()) throw ParseError("trace has a header but no samples", header.number);
  return ThroughputTrace(std::move(samples), load_n);
}

SteadyStateAverage steady_state_average(const ThroughputTrace& trace, double warmup_fraction) {
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw ValidationError("warm-up fraction must lie in [0, 1)");
  }
  const auto& samples = trace.samples();
  const double t_first = samples.front().t;
  const double t_last = samples.back().t;
  const double cut = t_first + warmup_fraction * (t_last - t_first);

  const auto first_kept = std::find_if(samples.begin(), samples.end(),
                                       [cut](const TraceSample& s) { return s.t >= cut; });
  if (std::distance(first_kept, samples.end()) < 2) {
    throw InsufficientDataError("fewer than two samples remain after the warm-up cut at t=" +
                                std::to_string(cut));
  }

  double area = 0.0;
  for (auto it = first_kept; std::next(it) != samples.end(); ++it) {
    const auto& a = *it;
    const auto& b = *std::next(it);
    area += 0.5 * (a.x_inst + b.x_inst) * (b.t - a.t);
  }
  const double span = t_last - first_kept->t;
  return SteadyStateAverage{area / span, first_kept->t, t_last};
}

}  // namespace benchdiag
