#pragma once

// Operational bounds for a closed system of queueing stages in series
// driven by users with a fixed mean think time.
//
// All times are seconds, all rates are transactions per second.

#include <cstddef>
#include <string>
#include <vector>

namespace benchdiag {

struct Stage {
  std::string label;
  double service_time = 0.0;

  friend bool operator==(const Stage&, const Stage&) = default;
};

// Per-stage service demands plus client think time. Immutable once built;
// the constructor throws ValidationError on an invalid profile.
class ServiceProfile {
 public:
  ServiceProfile(std::vector<Stage> stages, double think_time);

  const std::vector<Stage>& stages() const noexcept { return stages_; }
  double think_time() const noexcept { return think_time_; }

  // First stage (in stage order) holding the largest service time.
  std::size_t bottleneck_index() const noexcept { return bottleneck_; }
  const Stage& bottleneck() const noexcept { return stages_[bottleneck_]; }
  double max_service_time() const noexcept { return stages_[bottleneck_].service_time; }

  // True when more than one stage shares the largest service time.
  bool bottleneck_tied() const noexcept;

  // Copy with every time multiplied by factor (> 0).
  ServiceProfile scaled(double factor) const;

  friend bool operator==(const ServiceProfile&, const ServiceProfile&) = default;

 private:
  std::vector<Stage> stages_;
  double think_time_;
  std::size_t bottleneck_;
};

struct BoundsSummary {
  double x_max = 0.0;
  double r_min = 0.0;
  double n_opt = 0.0;
  std::string bottleneck_label;
  bool bottleneck_tied = false;
};

double compute_x_max(const ServiceProfile& profile);
double compute_r_min(const ServiceProfile& profile);
double compute_n_opt(const ServiceProfile& profile);
BoundsSummary compute_bounds(const ServiceProfile& profile);

// min(n / (R_min + Z), X_max). The two branches meet at n = N_opt.
double throughput_upper_bound(const ServiceProfile& profile, double n);

// max(R_min, n * S_max - Z). The sloped branch is the asymptote the
// response-time "hockey stick" approaches; it is a lower bound, even though
// it is often described as the worst case once saturation sets in.
double response_lower_bound(const ServiceProfile& profile, double n);

}  // namespace benchdiag
