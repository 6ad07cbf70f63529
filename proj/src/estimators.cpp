#include "stochmatch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochmatch/matching.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stochmatch {

namespace {

constexpr std::uint64_t kMaxSamplesPerRun = 1'000'000'000'000'000ull;

void check_config(const EstimatorConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw ModelError("epsilon must be positive");
  if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0)) {
    throw ModelError("delta must lie in (0,1)");
  }
  if (cfg.sample_override && *cfg.sample_override < 1) {
    throw ModelError("sample override must be at least 1");
  }
  if (cfg.runs_override && *cfg.runs_override < 1) {
    throw ModelError("runs override must be at least 1");
  }
}

// Per-thread scratch for the sampling kernel: one matcher, one instantiation
// buffer, one edge buffer.
struct SampleWorker {
  GeneralMatcher matcher;
  Instantiation inst;
  std::vector<Edge> edges;

  int sample_value(const StochasticModel& m, std::uint64_t seed,
                   std::uint64_t index, SampleTransform transform) {
    sample_instantiation_into(m, seed, index, inst);
    edges.clear();
    for (Edge e : m.edges()) {
      const VertexSpec& u = m.vertex(e.first);
      const VertexSpec& v = m.vertex(e.second);
      const int du = inst.death_of(e.first);
      const int dv = inst.death_of(e.second);
      if (std::max(u.arrival, v.arrival) > std::min(du, dv)) continue;
      if (transform == SampleTransform::kDropDayOneOnly &&
          ((u.arrival == 1 && du == 1) || (v.arrival == 1 && dv == 1))) {
        continue;
      }
      edges.push_back(e);
    }
    return matcher.max_matching_size(m.id_bound(), edges);
  }
};

struct BatchStats {
  std::uint64_t sum = 0;
  std::uint64_t sum_squares = 0;
};

// The Monte-Carlo inner loop.  Matching sizes are small integers, so both
// accumulators are exact and the parallel reduction matches the serial
// reference bit for bit.
BatchStats run_batch(const StochasticModel& m, std::uint64_t batch_seed,
                     std::uint64_t k, SampleTransform transform,
                     bool parallel) {
  BatchStats stats;
  const long long count = static_cast<long long>(k);
#ifdef _OPENMP
  if (parallel) {
    std::uint64_t sum = 0;
    std::uint64_t sum_squares = 0;
#pragma omp parallel
    {
      SampleWorker worker;
#pragma omp for schedule(static) reduction(+ : sum, sum_squares)
      for (long long i = 0; i < count; ++i) {
        const std::uint64_t value = static_cast<std::uint64_t>(
            worker.sample_value(m, batch_seed, static_cast<std::uint64_t>(i),
                                transform));
        sum += value;
        sum_squares += value * value;
      }
    }
    stats.sum = sum;
    stats.sum_squares = sum_squares;
    return stats;
  }
#else
  (void)parallel;
#endif
  SampleWorker worker;
  for (long long i = 0; i < count; ++i) {
    const std::uint64_t value = static_cast<std::uint64_t>(worker.sample_value(
        m, batch_seed, static_cast<std::uint64_t>(i), transform));
    stats.sum += value;
    stats.sum_squares += value * value;
  }
  return stats;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t r = values.size();
  if (r == 0) return 0.0;
  if (r % 2 == 1) return values[r / 2];
  return 0.5 * (values[r / 2 - 1] + values[r / 2]);
}

Estimate estimate_impl(const StochasticModel& m, const EstimatorConfig& cfg,
                       SampleTransform transform) {
  check_config(cfg);
  Estimate est;

  const DegenerateCheck check = degenerate_zero_check(m);
  est.degenerate_q = check.q;
  if (check.degenerate) {
    est.degenerate_zero = true;
    return est;
  }

  const int n = m.vertex_count();
  std::uint64_t k;
  if (cfg.sample_override) {
    k = *cfg.sample_override;
  } else {
    k = paper_sample_count(n, cfg.epsilon);
    if (k > cfg.warn_sample_budget) {
      est.warnings.push_back(
          "default sample count " + std::to_string(k) +
          " exceeds the configured budget; consider an explicit override");
    }
  }
  if (k > kMaxSamplesPerRun) {
    throw CapExceeded("sample count " + std::to_string(k) +
                      " per run is beyond the supported range");
  }
  const int runs = cfg.runs_override ? *cfg.runs_override
                                     : median_run_count(cfg.delta);

  const double stddev_limit = static_cast<double>(n / 2 + 1);
  std::vector<double> means;
  means.reserve(static_cast<size_t>(runs));
  for (int run = 0; run < runs; ++run) {
    const BatchStats stats =
        run_batch(m, derive_seed(cfg.seed, static_cast<std::uint64_t>(run)), k,
                  transform, cfg.parallel);
    means.push_back(static_cast<double>(stats.sum) / static_cast<double>(k));
    double stddev = 0.0;
    if (k >= 2) {
      const double mean = means.back();
      const double centered =
          static_cast<double>(stats.sum_squares) -
          static_cast<double>(k) * mean * mean;
      stddev = std::sqrt(std::max(0.0, centered) / static_cast<double>(k - 1));
    }
    if (stddev > stddev_limit + 1e-9) {
      throw std::logic_error("sample standard deviation exceeded floor(n/2)+1");
    }
    est.max_run_stddev = std::max(est.max_run_stddev, stddev);
  }

  est.value = median_of(std::move(means));
  est.runs = runs;
  est.samples_used = static_cast<std::uint64_t>(runs) * k;
  return est;
}

template <typename P, typename OptFn>
P exact_opt_impl(const StochasticModel& m, std::uint64_t cap, OptFn value_of) {
  P total(0);
  GeneralMatcher matcher;
  std::vector<Edge> edge_buf;
  auto body = [&](const Instantiation& inst, const P& p) {
    total += p * P(value_of(inst, matcher, edge_buf));
  };
  if constexpr (std::is_same_v<P, Rational>) {
    enumerate_instantiations_rational(m, body, cap);
  } else {
    enumerate_instantiations(
        m, [&](const Instantiation& inst, double p) { body(inst, p); }, cap);
  }
  return total;
}

template <typename P>
P exact_value(const StochasticModel& m, std::uint64_t cap,
              SampleTransform transform) {
  return exact_opt_impl<P>(
      m, cap,
      [&](const Instantiation& inst, GeneralMatcher& matcher,
          std::vector<Edge>& edges) {
        edges.clear();
        for (Edge e : m.edges()) {
          const VertexSpec& u = m.vertex(e.first);
          const VertexSpec& v = m.vertex(e.second);
          const int du = inst.death_of(e.first);
          const int dv = inst.death_of(e.second);
          if (std::max(u.arrival, v.arrival) > std::min(du, dv)) continue;
          if (transform == SampleTransform::kDropDayOneOnly &&
              ((u.arrival == 1 && du == 1) || (v.arrival == 1 && dv == 1))) {
            continue;
          }
          edges.push_back(e);
        }
        return matcher.max_matching_size(m.id_bound(), edges);
      });
}

void check_day_one_edge(const StochasticModel& m, Edge e) {
  e = make_edge(e.first, e.second);
  if (!m.has_edge(e.first, e.second)) {
    throw ModelError("conditioning on an unknown edge");
  }
  if (m.vertex(e.first).arrival != 1 || m.vertex(e.second).arrival != 1) {
    throw ModelError(
        "conditioning edge must join two vertices arriving at timestep 1");
  }
}

}  // namespace

std::uint64_t paper_sample_count(int n, double epsilon) {
  if (!(epsilon > 0.0)) throw ModelError("epsilon must be positive");
  const long double raw =
      std::ceil(static_cast<long double>(n) * n * n * n /
                (static_cast<long double>(epsilon) * epsilon));
  if (raw < 1.0L) return 1;
  if (raw > static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) {
    throw CapExceeded("default sample count overflows a 64-bit counter");
  }
  return static_cast<std::uint64_t>(raw);
}

int median_run_count(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw ModelError("delta must lie in (0,1)");
  }
  const int runs = static_cast<int>(std::ceil(18.0 * std::log(1.0 / delta)));
  return std::max(runs, 1);
}

int hindsight_matching_size(const StochasticModel& m, const Instantiation& inst,
                            SampleTransform transform) {
  GeneralMatcher matcher;
  std::vector<Edge> edges;
  for (Edge e : m.edges()) {
    const VertexSpec& u = m.vertex(e.first);
    const VertexSpec& v = m.vertex(e.second);
    const int du = inst.death_of(e.first);
    const int dv = inst.death_of(e.second);
    if (std::max(u.arrival, v.arrival) > std::min(du, dv)) continue;
    if (transform == SampleTransform::kDropDayOneOnly &&
        ((u.arrival == 1 && du == 1) || (v.arrival == 1 && dv == 1))) {
      continue;
    }
    edges.push_back(e);
  }
  return matcher.max_matching_size(m.id_bound(), edges);
}

DegenerateCheck degenerate_zero_check(const StochasticModel& m) {
  const int n = m.vertex_count();
  if (n == 0 || m.edges().empty()) return {true, 1.0};

  std::vector<double> weights;
  weights.reserve(m.edges().size());
  for (Edge e : m.edges()) {
    const double p = edge_presence_probability(m, e);
    if (p >= 1.0) return {false, 0.0};  // a certain edge: q = 0
    weights.push_back(-std::log1p(-p));
  }
  const StaticGraph g(m.id_bound(), std::vector<Edge>(m.edges()));
  const WeightedMatchingResult best = max_weight_matching(g, weights);
  double q = 1.0;
  for (Edge e : best.matching) {
    q *= 1.0 - edge_presence_probability(m, e);
  }
  return {q > 1.0 - 1.0 / static_cast<double>(n), q};
}

Estimate estimate_opt(const StochasticModel& m, const EstimatorConfig& cfg) {
  return estimate_impl(m, cfg, SampleTransform::kNone);
}

Estimate estimate_opt_given_edge(const StochasticModel& m, Edge e,
                                 const EstimatorConfig& cfg) {
  check_day_one_edge(m, e);
  const VertexId endpoints[] = {e.first, e.second};
  const StochasticModel residual = remove_vertices(m, endpoints);
  Estimate est = estimate_impl(residual, cfg, SampleTransform::kNone);
  est.value += 1.0;
  est.degenerate_zero = false;  // the committed edge makes the value positive
  return est;
}

Estimate estimate_opt_given_empty(const StochasticModel& m,
                                  const EstimatorConfig& cfg) {
  return estimate_impl(m, cfg, SampleTransform::kDropDayOneOnly);
}

double exact_opt(const StochasticModel& m, std::uint64_t cap) {
  return exact_value<double>(m, cap, SampleTransform::kNone);
}

double exact_opt_given_edge(const StochasticModel& m, Edge e,
                            std::uint64_t cap) {
  check_day_one_edge(m, e);
  const VertexId endpoints[] = {e.first, e.second};
  return 1.0 + exact_opt(remove_vertices(m, endpoints), cap);
}

double exact_opt_given_empty(const StochasticModel& m, std::uint64_t cap) {
  return exact_value<double>(m, cap, SampleTransform::kDropDayOneOnly);
}

Rational exact_opt_rational(const StochasticModel& m, std::uint64_t cap) {
  return exact_value<Rational>(m, cap, SampleTransform::kNone);
}

Rational exact_opt_given_edge_rational(const StochasticModel& m, Edge e,
                                       std::uint64_t cap) {
  check_day_one_edge(m, e);
  const VertexId endpoints[] = {e.first, e.second};
  return Rational(1) + exact_opt_rational(remove_vertices(m, endpoints), cap);
}

Rational exact_opt_given_empty_rational(const StochasticModel& m,
                                        std::uint64_t cap) {
  return exact_value<Rational>(m, cap, SampleTransform::kDropDayOneOnly);
}

}  // namespace stochmatch
