#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "szwalk/alloc_tracker.hpp"
#include "szwalk/error.hpp"
#include "szwalk/graph.hpp"
#include "szwalk/operators.hpp"
#include "szwalk/simulator.hpp"
#include "szwalk/state.hpp"
#include "szwalk/types.hpp"

// Scaling benchmark: runs the double walk W = S R S R on random dense
// column-stochastic matrices of growing size and fits
// log(metric) = log A + n log N by least squares. Peak memory is the
// interposed allocator's live high-water mark over the evolve call, so the
// bench asserts the algorithm's storage, not the process RSS.

namespace szwalk::bench {

enum class Metric { time, memory };

struct PowerLawFit {
  double amplitude = 0.0;        // A in metric = A * N^n
  double exponent = 0.0;         // n
  double stderr_exponent = 0.0;  // standard error of n from the fit
};

struct SizeSample {
  Index size = 0;
  double seconds = 0.0;
  long long peak_bytes = 0;
  std::uint64_t seed = 0;  // per-size seed derived from the run seed
};

/// Per-metric view of one benchmark run, fit over sizes >= min_fit_size.
struct ScalingFit {
  std::vector<Index> sizes;
  std::vector<double> times;          // seconds per run
  std::vector<long long> memories;    // peak live bytes per run
  double amplitude = 0.0;
  double exponent = 0.0;
  double stderr_n = 0.0;
  Metric metric = Metric::time;
};

struct BenchOptions {
  int steps = 100;
  std::uint64_t seed = 1;
  bool include_small = false;   // keep sizes below the asymptotic region
  Index min_fit_size = 1000;    // fit window start unless include_small
  int repeats = 1;              // timed repetitions per size; min is kept
  int warmup_steps = 1;         // untimed steps paging in the working set
};

/// Entries drawn uniform(0,1), then each column divided by its sum.
inline RealMatrix random_stochastic_entries(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> uniform(0.0, 1.0);
  RealMatrix m(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      m(i, j) = uniform(rng);
    }
    m.col(j) /= m.col(j).sum();
  }
  return m;
}

inline TransitionMatrix random_transition_matrix(Index n, std::uint64_t seed) {
  return TransitionMatrix::validated(random_stochastic_entries(n, seed),
                                     StochasticPolicy::strict);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Least-squares fit of log(value) = log A + n log size; needs >= 3 points.
inline PowerLawFit fit_power_law(std::span<const double> sizes,
                                 std::span<const double> values) {
  const std::size_t m = sizes.size();
  if (m < 3 || values.size() != m) {
    throw Error(ErrorCode::InsufficientSizes,
                "power-law fit needs at least 3 samples, got " +
                    std::to_string(m));
  }
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(sizes[i] > 0.0) || !(values[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "power-law fit needs positive sizes and values");
    }
    sx += std::log(sizes[i]);
    sy += std::log(values[i]);
  }
  const double mx = sx / static_cast<double>(m);
  const double my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(sizes[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.amplitude = std::exp(my - fit.exponent * mx);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double predicted = std::log(fit.amplitude) +
                             fit.exponent * std::log(sizes[i]);
    const double r = std::log(values[i]) - predicted;
    ss_res += r * r;
  }
  fit.stderr_exponent =
      std::sqrt(ss_res / static_cast<double>(m - 2) / sxx);
  return fit;
}

/// One measured evolve of W = S R S R from the equal superposition,
/// measuring the second register each step. Probabilities are folded into a
/// running accumulator instead of being stored, so live memory is
/// independent of the step count; `sink`, when given, receives the
/// accumulated total as a side effect the optimizer cannot discard.
///
/// Engine setup and an optional warmup run untimed; with repeats > 1 the
/// minimum wall time over the repetitions is reported.
inline SizeSample run_size_sample(Index n, int steps, std::uint64_t seed,
                                  double* sink = nullptr, int repeats = 1,
                                  int warmup_steps = 1) {
  SizeSample sample;
  sample.size = n;
  sample.seed = seed;

  // The transition matrix is only needed to build Psi; freeing it before the
  // measured region keeps the evolve working set at Phi + Psi (+ Psi^T).
  std::shared_ptr<const PsiMatrix<Real>> psi;
  {
    const TransitionMatrix g = random_transition_matrix(n, seed);
    psi = std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  }
  std::vector<UnitaryPipeline<Real>::Op> ops;
  ops.emplace_back(SwapOperator{});
  ops.emplace_back(ReflectionOperator<Real>(psi));
  ops.emplace_back(SwapOperator{});
  ops.emplace_back(ReflectionOperator<Real>(psi));
  const UnitaryPipeline<Real> w{std::move(ops)};
  const WalkEngine<Real> engine(w);

  MatrixState<Real> phi = initial_superposition(*psi);
  RealVector accumulator = RealVector::Zero(n);
  const auto observer = [&accumulator](int, const ProbabilityVector*,
                                       const ProbabilityVector* p2) {
    accumulator += p2->values();
  };

  if (warmup_steps > 0) {
    evolve_observe(engine, phi, warmup_steps, Register::second, observer);
  }

  sample.seconds = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < std::max(1, repeats); ++rep) {
    phi = initial_superposition(*psi);
    accumulator.setZero();
    alloc_tracker::reset_peak();
    const auto start = std::chrono::steady_clock::now();
    evolve_observe(engine, phi, steps, Register::second, observer);
    const auto stop = std::chrono::steady_clock::now();
    sample.peak_bytes = alloc_tracker::peak_bytes();
    sample.seconds = std::min(
        sample.seconds, std::chrono::duration<double>(stop - start).count());
    if (sink) *sink += accumulator.sum();
  }
  return sample;
}

inline std::vector<SizeSample> run_scaling_samples(
    std::span<const Index> sizes, const BenchOptions& opts) {
  if (sizes.size() < 3) {
    throw Error(ErrorCode::InsufficientSizes,
                "benchmark needs at least 3 sizes");
  }
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] >= sizes[i + 1]) {
      throw Error(ErrorCode::InvalidArgument,
                  "benchmark sizes must be strictly increasing");
    }
  }
  if (sizes.front() < 1) {
    throw Error(ErrorCode::InvalidArgument, "sizes must be positive");
  }
  std::vector<SizeSample> samples;
  samples.reserve(sizes.size());
  double sink = 0.0;
  for (Index n : sizes) {
    samples.push_back(run_size_sample(
        n, opts.steps, mix_seed(opts.seed, static_cast<std::uint64_t>(n)),
        &sink, opts.repeats, opts.warmup_steps));
  }
  return samples;
}

inline ScalingFit fit_samples(const std::vector<SizeSample>& samples,
                              Metric metric, const BenchOptions& opts) {
  ScalingFit result;
  result.metric = metric;
  std::vector<double> xs, ys;
  for (const SizeSample& s : samples) {
    result.sizes.push_back(s.size);
    result.times.push_back(s.seconds);
    result.memories.push_back(s.peak_bytes);
    if (opts.include_small || s.size >= opts.min_fit_size) {
      xs.push_back(static_cast<double>(s.size));
      ys.push_back(metric == Metric::time
                       ? s.seconds
                       : static_cast<double>(s.peak_bytes));
    }
  }
  if (metric == Metric::memory && !alloc_tracker::active()) {
    throw Error(ErrorCode::InvalidArgument,
                "memory metric requires a binary linked with the allocation "
                "tracker");
  }
  const PowerLawFit fit = fit_power_law(xs, ys);
  result.amplitude = fit.amplitude;
  result.exponent = fit.exponent;
  result.stderr_n = fit.stderr_exponent;
  return result;
}

/// Runs the benchmark and fits the chosen metric. Sizes below 1000 are
/// excluded from the fit window by default, mirroring the asymptotic-region
/// convention; opts.include_small keeps them.
inline ScalingFit run_scaling_bench(std::span<const Index> sizes, int steps,
                                    Metric metric, std::uint64_t seed,
                                    bool include_small = false) {
  BenchOptions opts;
  opts.steps = steps;
  opts.seed = seed;
  opts.include_small = include_small;
  return fit_samples(run_scaling_samples(sizes, opts), metric, opts);
}

}  // namespace szwalk::bench
