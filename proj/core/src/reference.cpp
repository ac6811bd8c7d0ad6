#include "benchdiag/reference.hpp"

#include <cmath>
#include <limits>

#include "benchdiag/error.hpp"

namespace benchdiag {

CanonicalCurves solve_reference(const ServiceProfile& profile, int n_max) {
  if (n_max < 1) throw ValidationError("n_max must be at least 1");

  const auto& stages = profile.stages();
  const double think = profile.think_time();
  const std::size_t k = stages.size();

  CanonicalCurves curves{profile, {}};
  curves.rows.reserve(static_cast<std::size_t>(n_max));

  std::vector<double> queue(k, 0.0);
  std::vector<double> residence(k, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    double r = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      residence[i] = stages[i].service_time * (1.0 + queue[i]);
      r += residence[i];
    }
    const double x = n / (r + think);
    for (std::size_t i = 0; i < k; ++i) queue[i] = x * residence[i];
    curves.rows.push_back(CurveRow{n, x, r, queue});
  }
  return curves;
}

namespace {

// Walks every vector (m_0, m_1..m_k) of nonnegative counts summing to n,
// where m_0 is the population at the think-time delay and m_i at stage i.
// The unnormalized state weight is Z^m_0 / m_0! * prod S_i^m_i.
struct Enumerator {
  const std::vector<Stage>& stages;
  double think;
  std::vector<int> counts;

  double total = 0.0;
  std::vector<double> weighted_counts;

  void run(int n) {
    counts.assign(stages.size(), 0);
    weighted_counts.assign(stages.size(), 0.0);
    total = 0.0;
    place(0, n);
  }

  void place(std::size_t stage, int remaining) {
    if (stage == stages.size()) {
      // Remaining users are thinking.
      double weight = std::pow(think, remaining) / std::tgamma(remaining + 1.0);
      for (std::size_t i = 0; i < stages.size(); ++i) {
        weight *= std::pow(stages[i].service_time, counts[i]);
      }
      total += weight;
      for (std::size_t i = 0; i < stages.size(); ++i) weighted_counts[i] += weight * counts[i];
      return;
    }
    for (int m = 0; m <= remaining; ++m) {
      counts[stage] = m;
      place(stage + 1, remaining - m);
    }
    counts[stage] = 0;
  }
};

}  // namespace

OracleSolution solve_oracle(const ServiceProfile& profile, int n) {
  if (n < 1 || n > kOracleMaxUsers) {
    throw ValidationError("oracle population must lie in [1, " + std::to_string(kOracleMaxUsers) +
                          "]");
  }
  if (profile.stages().size() > kOracleMaxStages) {
    throw ValidationError("oracle supports at most " + std::to_string(kOracleMaxStages) +
                          " stages");
  }

  Enumerator current{profile.stages(), profile.think_time(), {}, 0.0, {}};
  current.run(n);
  Enumerator previous{profile.stages(), profile.think_time(), {}, 0.0, {}};
  previous.run(n - 1);

  OracleSolution solution;
  solution.x = previous.total / current.total;
  solution.queue_lengths.resize(profile.stages().size());
  double queued = 0.0;
  for (std::size_t i = 0; i < solution.queue_lengths.size(); ++i) {
    solution.queue_lengths[i] = current.weighted_counts[i] / current.total;
    queued += solution.queue_lengths[i];
  }
  solution.r = queued / solution.x;
  return solution;
}

void write_curves_csv(std::ostream& out, const CanonicalCurves& curves) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "n,x,r";
  for (const auto& stage : curves.profile.stages()) out << ",q_" << stage.label;
  out << '\n';
  for (const auto& row : curves.rows) {
    out << row.n << ',' << row.x << ',' << row.r;
    for (double q : row.queue_lengths) out << ',' << q;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace benchdiag
