#include "benchdiag/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "benchdiag/error.hpp"

namespace benchdiag {

namespace {

void require_load(double n) {
  if (!std::isfinite(n) || n < 0.0) {
    throw ValidationError("user load must be finite and nonnegative");
  }
}

}  // namespace

ServiceProfile::ServiceProfile(std::vector<Stage> stages, double think_time)
    : stages_(std::move(stages)), think_time_(think_time), bottleneck_(0) {
  if (stages_.empty()) {
    throw ValidationError("service profile has no stages");
  }
  for (const auto& stage : stages_) {
    if (!std::isfinite(stage.service_time) || stage.service_time <= 0.0) {
      throw ValidationError("stage '" + stage.label +
                            "' must have a finite, strictly positive service time");
    }
  }
  if (!std::isfinite(think_time_) || think_time_ < 0.0) {
    throw ValidationError("think time must be finite and nonnegative");
  }
  for (std::size_t i = 1; i < stages_.size(); ++i) {
    if (stages_[i].service_time > stages_[bottleneck_].service_time) bottleneck_ = i;
  }
}

bool ServiceProfile::bottleneck_tied() const noexcept {
  const double s_max = max_service_time();
  return std::count_if(stages_.begin(), stages_.end(),
                       [s_max](const Stage& s) { return s.service_time == s_max; }) > 1;
}

ServiceProfile ServiceProfile::scaled(double factor) const {
  if (!std::isfinite(factor) || factor <= 0.0) {
    throw ValidationError("scale factor must be finite and positive");
  }
  std::vector<Stage> stages = stages_;
  for (auto& stage : stages) stage.service_time *= factor;
  return ServiceProfile(std::move(stages), think_time_ * factor);
}

double compute_x_max(const ServiceProfile& profile) { return 1.0 / profile.max_service_time(); }

double compute_r_min(const ServiceProfile& profile) {
  double sum = 0.0;
  for (const auto& stage : profile.stages()) sum += stage.service_time;
  return sum;
}

double compute_n_opt(const ServiceProfile& profile) {
  return (compute_r_min(profile) + profile.think_time()) / profile.max_service_time();
}

BoundsSummary compute_bounds(const ServiceProfile& profile) {
  return BoundsSummary{
      .x_max = compute_x_max(profile),
      .r_min = compute_r_min(profile),
      .n_opt = compute_n_opt(profile),
      .bottleneck_label = profile.bottleneck().label,
      .bottleneck_tied = profile.bottleneck_tied(),
  };
}

double throughput_upper_bound(const ServiceProfile& profile, double n) {
  require_load(n);
  const double uncontended = n / (compute_r_min(profile) + profile.think_time());
  return std::min(uncontended, compute_x_max(profile));
}

double response_lower_bound(const ServiceProfile& profile, double n) {
  require_load(n);
  const double asymptote = n * profile.max_service_time() - profile.think_time();
  return std::max(compute_r_min(profile), asymptote);
}

}  // namespace benchdiag
