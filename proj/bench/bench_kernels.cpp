// Times the OpenMP sampling kernels against their serial reference paths.
// Both paths accumulate integer matching sizes, so the values must agree
// exactly; the benchmark aborts if they do not.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "stochmatch/estimators.hpp"
#include "stochmatch/policies.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace stochmatch;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

struct Timed {
  double value;
  double seconds;
};

template <typename Fn>
Timed timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  const double value = fn();
  return {value, seconds_since(start)};
}

}  // namespace

int main(int argc, char** argv) {
  int n = 12;
  std::uint64_t samples = 200000;
  if (argc > 1) n = std::atoi(argv[1]);
  if (argc > 2) samples = std::strtoull(argv[2], nullptr, 10);

  const StochasticModel model = make_sn_family(n);
#ifdef _OPENMP
  std::printf("model: S_%d (%d vertices), %llu samples, %d threads\n", n,
              model.vertex_count(), static_cast<unsigned long long>(samples),
              omp_get_max_threads());
#else
  std::printf("model: S_%d (%d vertices), %llu samples, OpenMP disabled\n", n,
              model.vertex_count(), static_cast<unsigned long long>(samples));
#endif

  EstimatorConfig cfg;
  cfg.sample_override = samples;
  cfg.runs_override = 1;
  cfg.seed = 7;

  cfg.parallel = false;
  const Timed serial = timed([&] { return estimate_opt(model, cfg).value; });
  cfg.parallel = true;
  const Timed parallel = timed([&] { return estimate_opt(model, cfg).value; });

  std::printf("estimate_opt   serial   %10.3fs  (%.2fM samples/s)  value %.9f\n",
              serial.seconds, samples / serial.seconds / 1e6, serial.value);
  std::printf("estimate_opt   parallel %10.3fs  (%.2fM samples/s)  value %.9f\n",
              parallel.seconds, samples / parallel.seconds / 1e6,
              parallel.value);
  std::printf("estimate_opt   speedup  %10.2fx\n",
              serial.seconds / parallel.seconds);
  if (serial.value != parallel.value) {
    std::fprintf(stderr, "FATAL: kernel paths disagree\n");
    return 1;
  }

  const std::uint64_t policy_samples = samples / 10;
  const auto policy = make_greedy_policy();
  const Timed policy_serial = timed([&] {
    return evaluate_policy_mc(model, *policy, policy_samples, 7, false);
  });
  const Timed policy_parallel = timed([&] {
    return evaluate_policy_mc(model, *policy, policy_samples, 7, true);
  });
  std::printf("policy_mc      serial   %10.3fs  (%.2fM runs/s)     value %.9f\n",
              policy_serial.seconds, policy_samples / policy_serial.seconds / 1e6,
              policy_serial.value);
  std::printf("policy_mc      parallel %10.3fs  (%.2fM runs/s)     value %.9f\n",
              policy_parallel.seconds,
              policy_samples / policy_parallel.seconds / 1e6,
              policy_parallel.value);
  std::printf("policy_mc      speedup  %10.2fx\n",
              policy_serial.seconds / policy_parallel.seconds);
  if (policy_serial.value != policy_parallel.value) {
    std::fprintf(stderr, "FATAL: kernel paths disagree\n");
    return 1;
  }
  return 0;
}
