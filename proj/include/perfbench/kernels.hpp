#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace perfbench::kernels {

// --- container growth -------------------------------------------------------

/// [1^2, ..., n^2], growing the result one element at a time.
std::vector<double> squares_naive(std::size_t n);
/// Same values, result sized up front.
std::vector<double> squares_prealloc(std::size_t n);

// --- loop hoisting / vectorization ------------------------------------------

/// [2*pi*sin(1), ..., 2*pi*sin(n)] with the scale applied inside the loop.
std::vector<double> scaled_sine_naive(std::size_t n);
/// Same values: sin pass first, one scaling pass after.
std::vector<double> scaled_sine_vectorized(std::size_t n);

// --- prefix rank counts -----------------------------------------------------

/// W[i] = #{ j < i : y[j] < y[i] } by the quadratic double loop.
std::vector<std::int64_t> rank_count_naive(const std::vector<double>& y);
/// Same counts in O(n log n) via value ranks and a binary indexed tree.
std::vector<std::int64_t> rank_count_fast(const std::vector<double>& y);

// --- kernel density estimation ----------------------------------------------

struct KdeParams {
  std::vector<double> data;  // observations, nonempty
  std::vector<double> xpts;  // evaluation grid
  double h = 1.0;            // bandwidth, > 0
};

/// Gaussian-kernel density estimate at each grid point, full double loop.
std::vector<double> kde_naive(const KdeParams& p);
/// Same estimate on sorted data with the kernel tail truncated where a
/// single point's contribution falls below 1e-17/h (aggregate error under
/// 1e-12 absolute for the bandwidths this workbench exercises).
std::vector<double> kde_fast(const KdeParams& p);

// --- Kendall pseudo-observations --------------------------------------------

struct BivariateSample {
  std::vector<std::pair<double, double>> points;  // nonempty
};

struct PseudoObservations {
  std::vector<double> w;  // each in {0, 1/(n+1), ..., (n-1)/(n+1)}
};

/// w[j] = (strict dominance count of point j) / (n+1), quadratic double loop.
PseudoObservations pseudo_obs_naive(const BivariateSample& s);
/// Same values by offline 2-D dominance counting: sort on the first
/// coordinate, binary indexed tree over ranks of the second.
PseudoObservations pseudo_obs_fast(const BivariateSample& s);

/// Empirical Kendall CDF: fraction of pseudo-observations <= t.
double kendall_cdf(const PseudoObservations& w, double t);

// --- Monte Carlo CLT experiment ---------------------------------------------

struct CltConfig {
  std::int64_t n = 100000;   // sample size per replicate
  std::int64_t reps = 9000;  // number of replicates
  double lambda = 1.0;       // Poisson mean
  std::uint64_t seed = 42;
};

/// Mean of one replicate's n Poisson(lambda) draws. Replicate indices are
/// 1-based; each uses its own random stream, so values do not depend on
/// which process computes them or in what order.
double clt_replicate_mean(const CltConfig& c, std::int64_t replicate);

/// All replicate means, in replicate order.
std::vector<double> clt_sample_means(const CltConfig& c);

// --- histogram ----------------------------------------------------------------

struct HistogramBins {
  std::vector<double> edges;        // k+1, strictly increasing
  std::vector<std::int64_t> counts; // k
  std::vector<double> densities;    // k, integrates to 1
};

/// Equal-width density histogram over [min, max]; bins left-closed, the
/// last bin right-closed. All-identical data degenerates to one unit-width
/// bin centered on the value (density 1).
HistogramBins histogram(const std::vector<double>& data, int breaks);

// --- registry ----------------------------------------------------------------

struct BenchInput {
  std::size_t n = 0;
  std::uint64_t seed = 42;
  double h = 0.75;  // kde bandwidth
};

struct ReplicateParams {
  std::uint64_t seed = 42;
  std::int64_t n = 100000;  // per-replicate workload size
  double lambda = 1.0;
};

/// One addressable workload. `run` produces a vector from a size+seed
/// (bench/kernel CLIs); `replicate` maps a replicate index to one value
/// (worker/master/foreach); `profiled` executes an instrumented variant.
struct KernelInfo {
  std::string id;
  std::string summary;
  std::function<std::vector<double>(const BenchInput&)> run;
  std::function<double(std::int64_t, const ReplicateParams&)> replicate;
  std::function<void(bool line_mode)> profiled;
};

const std::vector<KernelInfo>& registry();
const KernelInfo* find_kernel(const std::string& id);
std::vector<std::string> kernel_ids();

}  // namespace perfbench::kernels
