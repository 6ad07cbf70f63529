#ifndef STOCHMATCH_ESTIMATORS_HPP_
#define STOCHMATCH_ESTIMATORS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochmatch/core_model.hpp"
#include "stochmatch/sampling.hpp"

namespace stochmatch {

struct EstimatorConfig {
  /// Target relative accuracy (> 0).
  double epsilon = 0.1;
  /// Failure probability in (0,1); drives the median amplification count.
  double delta = 0.25;
  /// Samples per run; defaults to ceil(n^4 / epsilon^2) when absent.
  std::optional<std::uint64_t> sample_override;
  /// Runs whose means are median-combined; defaults to ceil(18 ln(1/delta)).
  std::optional<int> runs_override;
  std::uint64_t seed = 0;
  /// Use the OpenMP sample kernel; the serial reference path otherwise.
  /// Both produce identical results (per-sample values are integers, so the
  /// reduction is exact regardless of scheduling).
  bool parallel = true;
  /// Emit a warning when the default sample count exceeds this.
  std::uint64_t warn_sample_budget = 10'000'000;
};

struct Estimate {
  double value = 0.0;
  std::uint64_t samples_used = 0;
  int runs = 0;
  /// True when the no-edge probability check fired and the estimator
  /// returned 0 without sampling.
  bool degenerate_zero = false;
  /// Probability that no edge of the most-likely matching materializes.
  double degenerate_q = 0.0;
  /// Largest per-run sample standard deviation observed.
  double max_run_stddev = 0.0;
  std::vector<std::string> warnings;
};

/// ceil(n^4 / epsilon^2), the sample count the accuracy analysis asks for.
std::uint64_t paper_sample_count(int n, double epsilon);
/// ceil(18 ln(1/delta)) runs boost a 3/4-confidence mean to 1 - delta.
int median_run_count(double delta);

/// Monte-Carlo estimate of the expected hindsight maximum-matching size.
/// Each sample draws an instantiation and computes its maximum matching;
/// per-run means are combined by median.  Before sampling, the degenerate
/// branch computes q = Pr[no edge of the most-likely matching appears]
/// (via a maximum-weight matching with weights -ln(1 - p_e)); if
/// q > 1 - 1/n the estimate is 0 with degenerate_zero set.
Estimate estimate_opt(const StochasticModel& m, const EstimatorConfig& cfg);

/// Estimate conditioned on matching edge e at timestep 1: both endpoints
/// must arrive at time 1; the value is 1 plus the estimate on the model
/// with both endpoints removed.
Estimate estimate_opt_given_edge(const StochasticModel& m, Edge e,
                                 const EstimatorConfig& cfg);

/// Estimate conditioned on matching nothing at timestep 1: every sampled
/// instantiation first drops the vertices that exist only on day 1
/// (arrival 1 and death 1) before matching.
Estimate estimate_opt_given_empty(const StochasticModel& m,
                                  const EstimatorConfig& cfg);

/// Exact counterparts by full enumeration (the estimators' oracles and the
/// engine behind the exact-oracle policy mode).
double exact_opt(const StochasticModel& m,
                 std::uint64_t cap = kDefaultEnumerationCap);
double exact_opt_given_edge(const StochasticModel& m, Edge e,
                            std::uint64_t cap = kDefaultEnumerationCap);
double exact_opt_given_empty(const StochasticModel& m,
                             std::uint64_t cap = kDefaultEnumerationCap);

Rational exact_opt_rational(const StochasticModel& m,
                            std::uint64_t cap = kDefaultEnumerationCap);
Rational exact_opt_given_edge_rational(
    const StochasticModel& m, Edge e,
    std::uint64_t cap = kDefaultEnumerationCap);
Rational exact_opt_given_empty_rational(
    const StochasticModel& m, std::uint64_t cap = kDefaultEnumerationCap);

/// Hindsight matching size of one instantiation, optionally applying the
/// drop-day-1 rule.  Shared by the Monte-Carlo kernel and the exact paths.
enum class SampleTransform { kNone, kDropDayOneOnly };
int hindsight_matching_size(const StochasticModel& m, const Instantiation& inst,
                            SampleTransform transform = SampleTransform::kNone);

struct DegenerateCheck {
  bool degenerate = false;
  double q = 0.0;
};
DegenerateCheck degenerate_zero_check(const StochasticModel& m);

}  // namespace stochmatch

#endif  // STOCHMATCH_ESTIMATORS_HPP_
