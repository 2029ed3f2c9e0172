#pragma once

// Monte Carlo sweeps: for every grid value, draw the model, run the
// algorithm over repetitions and aggregate the error metrics.

#include "dfm/datasets.hpp"
#include "dfm/evaluation.hpp"
#include "dfm/experiment.hpp"
#include "dfm/model.hpp"
#include "dfm/random.hpp"
#include "dfm/results_csv.hpp"
#include "dfm/sampling.hpp"
#include "dfm/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace dfm {

struct SweepOptions {
  unsigned threads = 0;  // 0 = use DFM_THREADS, else hardware concurrency
  bool timing = false;   // fill elapsed_ms; off keeps the CSV reproducible
};

/// Mean or standard deviation of each metric over repetitions.
struct MetricSummary {
  double hamming = 0.0;
  double hamming_raw_l0 = 0.0;
  double fhat = 0.0;
  double spectral_deviation = 0.0;
  double delta = 0.0;
  double elapsed_ms = 0.0;
};

struct SweepRecord {
  double value = 0.0;  // grid value of the swept parameter
  double rho = 0.0;
  double sigma2a = 0.0;
  long long m = 0;
  double sigma2w = 0.0;
  std::vector<ErrorReport> reps;
  std::vector<double> elapsed_ms;
  MetricSummary mean;
  MetricSummary sd;
};

/// Worker count: `requested` if nonzero, else $DFM_THREADS, else the
/// hardware concurrency. Never more than `tasks`.
inline unsigned resolve_threads(unsigned requested, std::size_t tasks) {
  unsigned t = requested;
  if (t == 0) {
    if (const char* env = std::getenv("DFM_THREADS"); env && *env) {
      t = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }
  }
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(t, tasks)));
}

/// Runs fn(i) for i in [0, count). Results must be written to per-index
/// slots; the first exception (lowest index) is rethrown after all workers
/// stop.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  const unsigned workers = resolve_threads(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr error;
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Sample mean and standard deviation; summation runs over sorted values so
/// the result does not depend on repetition order.
inline std::pair<double, double> mean_and_sd(std::vector<double> values) {
  if (values.empty()) return {0.0, 0.0};
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

inline void summarize(SweepRecord& rec) {
  auto column = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : rec.reps) v.push_back(field(r));
    return mean_and_sd(std::move(v));
  };
  auto fill = [&](double MetricSummary::*slot, std::pair<double, double> ms) {
    rec.mean.*slot = ms.first;
    rec.sd.*slot = ms.second;
  };
  fill(&MetricSummary::hamming, column([](const ErrorReport& r) { return r.hamming; }));
  fill(&MetricSummary::hamming_raw_l0,
       column([](const ErrorReport& r) { return r.hamming_raw_l0; }));
  fill(&MetricSummary::fhat, column([](const ErrorReport& r) { return r.fhat; }));
  fill(&MetricSummary::spectral_deviation,
       column([](const ErrorReport& r) { return r.spectral_deviation; }));
  fill(&MetricSummary::delta, column([](const ErrorReport& r) { return r.delta; }));
  fill(&MetricSummary::elapsed_ms, mean_and_sd(rec.elapsed_ms));
}

namespace detail {

enum StreamTag : std::uint64_t { kLabelsTag = 1, kAdjacencyTag = 2, kNoiseTag = 3, kKMeansTag = 4 };

/// Independent stream for one (purpose, grid index, repetition) cell.
inline RandomStream cell_stream(std::uint64_t seed, StreamTag tag, std::size_t g,
                                std::size_t r) {
  return RandomStream{seed, 0}.substream(tag).substream(g).substream(r);
}

inline double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace detail

/// Runs every grid point of `spec`.
///
/// One labeling is drawn for the whole sweep and shared by all grid points
/// and repetitions; with `resample_labels`, repetition r draws its own
/// labeling (shared across grid points). A, W and the k-means seeds use an
/// independent stream per (grid index, repetition). With `fixed_adjacency`
/// (the default for noise sweeps) A is drawn once per labeling and model,
/// and only W changes across repetitions.
inline std::vector<SweepRecord> run_sweep(const ExperimentSpec& spec,
                                          const SweepOptions& options = {}) {
  spec.validate();
  const std::size_t grid = spec.grid.size();
  const auto reps = static_cast<std::size_t>(spec.reps);
  const bool noise_sweep = spec.sweep == SweepVariable::Sigma2W;
  const auto pc = spec.connectivity();

  struct Labeling {
    CommunityLabels labels;
    double delta = 0.0;  // depends on labels and P only, not on rho
  };
  auto make_labeling = [&](std::size_t r) {
    Labeling l;
    l.labels = sample_labels(spec.n, spec.k,
                             detail::cell_stream(spec.seed, detail::kLabelsTag, 0, r));
    l.delta = delta_separation(build_omega(ModelSpec(pc, l.labels, 1.0)).omega, l.labels,
                               spec.k0)
                  .delta;
    return l;
  };
  std::vector<Labeling> labelings(spec.resample_labels ? reps : 1);
  parallel_for(labelings.size(), options.threads,
               [&](std::size_t r) { labelings[r] = make_labeling(r); });

  auto omega_for = [&](const Labeling& l, double rho) {
    return build_omega(ModelSpec(pc, l.labels, rho)).omega;
  };

  // Shared adjacency matrices: one per model when labels are fixed. A noise
  // sweep has the same model at every grid point, so it uses one A.
  const bool shared_a = spec.fixed_adjacency && !spec.resample_labels;
  std::vector<std::shared_ptr<const Matrix>> fixed_a(grid);
  if (shared_a) {
    const std::size_t models = noise_sweep ? 1 : grid;
    parallel_for(models, options.threads, [&](std::size_t g) {
      const auto pt = spec.at(g);
      fixed_a[g] = std::make_shared<const Matrix>(sample_adjacency(
          omega_for(labelings[0], pt.rho), pt.distribution,
          detail::cell_stream(spec.seed, detail::kAdjacencyTag, g, 0)));
    });
    if (noise_sweep) std::fill(fixed_a.begin(), fixed_a.end(), fixed_a[0]);
  }

  std::vector<SweepRecord> out(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    const auto pt = spec.at(g);
    auto& rec = out[g];
    rec.value = spec.grid[g];
    rec.rho = pt.rho;
    rec.sigma2a = spec.sweep == SweepVariable::Sigma2A ? spec.grid[g] : spec.sigma2a;
    rec.m = spec.sweep == SweepVariable::Trials ? std::llround(spec.grid[g]) : spec.m;
    rec.sigma2w = pt.noise.variance;
    rec.reps.resize(reps);
    rec.elapsed_ms.assign(reps, 0.0);
  }

  parallel_for(grid * reps, options.threads, [&](std::size_t task) {
    const std::size_t g = task / reps;
    const std::size_t r = task % reps;
    const auto start = std::chrono::steady_clock::now();
    const auto pt = spec.at(g);
    const Labeling& l = labelings[spec.resample_labels ? r : 0];
    const Matrix omega = omega_for(l, pt.rho);
    const Matrix a = fixed_a[g] ? *fixed_a[g]
                                : sample_adjacency(omega, pt.distribution,
                                                   detail::cell_stream(spec.seed, detail::kAdjacencyTag,
                                                                       g, r + 1));
    const Matrix w = sample_noise(spec.n, pt.noise,
                                  detail::cell_stream(spec.seed, detail::kNoiseTag, g, r));
    const Matrix ahat = a + w;
    KMeansConfig cfg = spec.kmeans;
    cfg.rng = detail::cell_stream(spec.seed, detail::kKMeansTag, g, r);
    const auto est = dfa(ahat, spec.k, spec.k0, cfg);
    out[g].reps[r] = evaluate(l.labels, est, ahat, omega, l.delta);
    if (options.timing) out[g].elapsed_ms[r] = detail::elapsed_since(start);
  });

  for (auto& rec : out) summarize(rec);
  return out;
}

/// Noise sweep on an observed network: for each sigma2W, reps draws of
/// Ahat = A + W are clustered with K0 = K. The spectral deviation column is
/// ||Ahat - A|| and delta is not defined (NaN).
inline std::vector<SweepRecord> run_realdata(const Dataset& data,
                                             const std::vector<double>& sigma2w_grid,
                                             int reps, std::uint64_t seed,
                                             const SweepOptions& options = {},
                                             KMeansConfig kmeans_cfg = {}) {
  if (reps < 1) throw ValidationError("reps must be >= 1");
  for (double v : sigma2w_grid) {
    if (!(v >= 0.0)) throw ValidationError("sigma2W grid values must be >= 0");
  }
  kmeans_cfg.validate();
  const std::size_t grid = sigma2w_grid.size();
  const auto nreps = static_cast<std::size_t>(reps);
  const Index n = data.adjacency.rows();
  std::vector<SweepRecord> out(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    out[g].value = sigma2w_grid[g];
    out[g].sigma2w = sigma2w_grid[g];
    out[g].reps.resize(nreps);
    out[g].elapsed_ms.assign(nreps, 0.0);
  }
  parallel_for(grid * nreps, options.threads, [&](std::size_t task) {
    const std::size_t g = task / nreps;
    const std::size_t r = task % nreps;
    const auto start = std::chrono::steady_clock::now();
    const Matrix w = sample_noise(n, NoiseSpec{sigma2w_grid[g]},
                                  detail::cell_stream(seed, detail::kNoiseTag, g, r));
    const Matrix ahat = data.adjacency + w;
    KMeansConfig cfg = kmeans_cfg;
    cfg.rng = detail::cell_stream(seed, detail::kKMeansTag, g, r);
    const auto est = dfa(ahat, data.k, data.k, cfg);
    out[g].reps[r] = evaluate(data.truth, est, ahat, data.adjacency,
                              std::numeric_limits<double>::quiet_NaN());
    if (options.timing) out[g].elapsed_ms[r] = detail::elapsed_since(start);
  });
  for (auto& rec : out) summarize(rec);
  return out;
}

/// Identifying columns shared by every row of one sweep.
struct RowContext {
  std::string experiment;
  std::string distribution;
  long long n = 0;
  int k = 0;
  int k0 = 0;
  std::uint64_t seed = 0;
};

inline RowContext row_context(const ExperimentSpec& spec) {
  return {spec.id, spec.distribution, static_cast<long long>(spec.n), spec.k, spec.k0,
          spec.seed};
}

inline RowContext row_context(const Dataset& data, std::uint64_t seed) {
  return {data.name, "observed", static_cast<long long>(data.adjacency.rows()), data.k,
          data.k, seed};
}

/// Per-repetition rows followed by `mean` and `sd` rows, per grid point.
inline std::vector<ResultRow> to_rows(const RowContext& ctx,
                                      const std::vector<SweepRecord>& records) {
  std::vector<ResultRow> rows;
  for (const auto& rec : records) {
    ResultRow base;
    base.experiment = ctx.experiment;
    base.distribution = ctx.distribution;
    base.n = ctx.n;
    base.k = ctx.k;
    base.k0 = ctx.k0;
    base.rho = rec.rho;
    base.sigma2a = rec.sigma2a;
    base.m = rec.m;
    base.sigma2w = rec.sigma2w;
    base.seed = ctx.seed;
    for (std::size_t r = 0; r < rec.reps.size(); ++r) {
      ResultRow row = base;
      const auto& e = rec.reps[r];
      row.rep = std::to_string(r);
      row.hamming = e.hamming;
      row.hamming_raw_l0 = e.hamming_raw_l0;
      row.fhat = e.fhat;
      row.spectral_deviation = e.spectral_deviation;
      row.delta = e.delta;
      row.elapsed_ms = rec.elapsed_ms[r];
      rows.push_back(std::move(row));
    }
    for (const auto& [name, s] : {std::pair{"mean", rec.mean}, std::pair{"sd", rec.sd}}) {
      ResultRow row = base;
      row.rep = name;
      row.hamming = s.hamming;
      row.hamming_raw_l0 = s.hamming_raw_l0;
      row.fhat = s.fhat;
      row.spectral_deviation = s.spectral_deviation;
      row.delta = s.delta;
      row.elapsed_ms = s.elapsed_ms;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

/// Spearman rank correlation with average ranks for ties. NaN if either
/// input is constant.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("spearman: need two equal-length samples of size >= 2");
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const auto [mx, sx] = mean_and_sd(rx);
  const auto [my, sy] = mean_and_sd(ry);
  if (sx == 0.0 || sy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  double cov = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) cov += (rx[i] - mx) * (ry[i] - my);
  cov /= static_cast<double>(rx.size() - 1);
  return cov / (sx * sy);
}

/// Mean Hamming error per grid point.
inline std::vector<double> mean_hamming(const std::vector<SweepRecord>& records) {
  std::vector<double> out;
  for (const auto& r : records) out.push_back(r.mean.hamming);
  return out;
}

inline std::vector<double> grid_values(const std::vector<SweepRecord>& records) {
  std::vector<double> out;
  for (const auto& r : records) out.push_back(r.value);
  return out;
}

}  // namespace dfm
