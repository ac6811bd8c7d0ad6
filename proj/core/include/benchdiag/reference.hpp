#pragma once

// Canonical steady-state throughput and response-time curves for a
// ServiceProfile, modeled as a closed product-form network: the profile's
// stages are load-independent FCFS queues in series and think time is a
// pure delay.

#include <cstddef>
#include <ostream>
#include <vector>

#include "benchdiag/model.hpp"

namespace benchdiag {

struct CurveRow {
  int n = 0;
  double x = 0.0;
  double r = 0.0;
  std::vector<double> queue_lengths;  // one per stage, stage order
};

struct CanonicalCurves {
  ServiceProfile profile;
  std::vector<CurveRow> rows;  // n = 1..n_max
};

// Exact mean value recursion. Throws ValidationError when n_max < 1.
CanonicalCurves solve_reference(const ServiceProfile& profile, int n_max);

struct OracleSolution {
  double x = 0.0;
  double r = 0.0;
  std::vector<double> queue_lengths;
};

inline constexpr int kOracleMaxUsers = 12;
inline constexpr std::size_t kOracleMaxStages = 4;

// Same steady state computed independently from the normalization constant,
// by enumerating every population vector. Small instances only: throws
// ValidationError when n is outside [1, kOracleMaxUsers] or the profile
// has more than kOracleMaxStages stages.
OracleSolution solve_oracle(const ServiceProfile& profile, int n);

// CSV with header n,x,r,q_<label>... and full round-trip precision.
void write_curves_csv(std::ostream& out, const CanonicalCurves& curves);

}  // namespace benchdiag
