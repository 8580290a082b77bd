#include "perfbench/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "perfbench/fenwick.hpp"
#include "perfbench/profiler.hpp"
#include "perfbench/rng.hpp"

namespace perfbench::kernels {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvSqrtTwoPi = 0.3989422804014327;

// Kernel tail is cut where one point's contribution drops below 1e-17:
// phi(8.75) < 1e-17, so the aggregate truncation error is under 1e-17/h.
constexpr double kKdeCutoffZ = 8.75;

inline double gauss_kernel(double z) {
  return kInvSqrtTwoPi * std::exp(-0.5 * z * z);
}

// Stream-id layout: high byte selects the consumer, low bits the index.
// Keeps replicate streams, demo-loop streams and input-data streams of one
// seed disjoint.
enum StreamTag : std::uint64_t {
  kStreamClt = 0,
  kStreamForeach = 1,
  kStreamInput = 2,
};

inline std::uint64_t stream_id(StreamTag tag, std::uint64_t index) {
  return (static_cast<std::uint64_t>(tag) << 56) | index;
}

std::vector<double> uniform_vector(std::size_t n, std::uint64_t seed,
                                   double scale = 1.0) {
  rng::Stream s(seed, stream_id(kStreamInput, 0));
  std::vector<double> out(n);
  for (auto& x : out) x = scale * s.next_uniform();
  return out;
}

std::vector<std::pair<double, double>> uniform_pairs(std::size_t n,
                                                     std::uint64_t seed) {
  rng::Stream s(seed, stream_id(kStreamInput, 0));
  std::vector<std::pair<double, double>> out(n);
  for (auto& p : out) {
    p.first = s.next_uniform();
    p.second = s.next_uniform();
  }
  return out;
}

// Value -> 1-based rank among sorted unique values.
std::vector<std::size_t> dense_ranks(const std::vector<double>& values,
                                     std::size_t& num_ranks) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  num_ranks = sorted.size();
  std::vector<std::size_t> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ranks[i] = static_cast<std::size_t>(
                   std::lower_bound(sorted.begin(), sorted.end(), values[i]) -
                   sorted.begin()) +
               1;
  }
  return ranks;
}

}  // namespace

std::vector<double> squares_naive(std::size_t n) {
  std::vector<double> a;
  for (std::size_t i = 1; i <= n; ++i) {
    a.push_back(static_cast<double>(i) * static_cast<double>(i));
  }
  return a;
}

std::vector<double> squares_prealloc(std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 1; i <= n; ++i) {
    a[i - 1] = static_cast<double>(i) * static_cast<double>(i);
  }
  return a;
}

std::vector<double> scaled_sine_naive(std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 1; i <= n; ++i) {
    a[i - 1] = kTwoPi * std::sin(static_cast<double>(i));
  }
  return a;
}

std::vector<double> scaled_sine_vectorized(std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 1; i <= n; ++i) {
    a[i - 1] = std::sin(static_cast<double>(i));
  }
  for (auto& x : a) x *= kTwoPi;
  return a;
}

std::vector<std::int64_t> rank_count_naive(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<std::int64_t> w(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t c = 0;
    for (std::size_t j = 0; j < i; ++j) {
      if (y[j] < y[i]) ++c;
    }
    w[i] = c;
  }
  return w;
}

std::vector<std::int64_t> rank_count_fast(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<std::int64_t> w(n, 0);
  if (n == 0) return w;
  std::size_t num_ranks = 0;
  std::vector<std::size_t> ranks;
  {
    profiler::ScopedSpan span("compress_ranks");
    ranks = dense_ranks(y, num_ranks);
  }
  profiler::ScopedSpan span("count");
  FenwickTree bit(num_ranks);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = bit.prefix_sum(ranks[i] - 1);
    bit.add(ranks[i], 1);
  }
  return w;
}

namespace {

void check_kde_params(const KdeParams& p) {
  if (!(p.h > 0.0)) throw std::invalid_argument("kde: bandwidth h must be positive");
  if (p.data.empty()) throw std::invalid_argument("kde: data must be nonempty");
}

}  // namespace

std::vector<double> kde_naive(const KdeParams& p) {
  check_kde_params(p);
  const std::size_t n = p.data.size();
  const double norm = 1.0 / (static_cast<double>(n) * p.h);
  std::vector<double> dens(p.xpts.size());
  for (std::size_t i = 0; i < p.xpts.size(); ++i) {
    double ksum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      ksum += gauss_kernel((p.xpts[i] - p.data[j]) / p.h);
    }
    dens[i] = ksum * norm;
  }
  return dens;
}

std::vector<double> kde_fast(const KdeParams& p) {
  check_kde_params(p);
  const std::size_t n = p.data.size();
  const double norm = 1.0 / (static_cast<double>(n) * p.h);
  const double radius = kKdeCutoffZ * p.h;

  std::vector<double> sorted;
  {
    profiler::ScopedSpan span("sort_data");
    sorted = p.data;
    std::sort(sorted.begin(), sorted.end());
  }

  profiler::ScopedSpan span("evaluate");
  std::vector<double> dens(p.xpts.size());
  for (std::size_t i = 0; i < p.xpts.size(); ++i) {
    const double x = p.xpts[i];
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - radius);
    const auto hi = std::upper_bound(lo, sorted.end(), x + radius);
    double ksum = 0.0;
    for (auto it = lo; it != hi; ++it) {
      ksum += gauss_kernel((x - *it) / p.h);
    }
    dens[i] = ksum * norm;
  }
  return dens;
}

PseudoObservations pseudo_obs_naive(const BivariateSample& s) {
  const std::size_t n = s.points.size();
  if (n == 0) throw std::invalid_argument("pseudo_obs: sample must be nonempty");
  const double denom = static_cast<double>(n) + 1.0;
  PseudoObservations out;
  out.w.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::int64_t c = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (s.points[k].first < s.points[j].first &&
          s.points[k].second < s.points[j].second) {
        ++c;
      }
    }
    out.w[j] = static_cast<double>(c) / denom;
  }
  return out;
}

PseudoObservations pseudo_obs_fast(const BivariateSample& s) {
  const std::size_t n = s.points.size();
  if (n == 0) throw std::invalid_argument("pseudo_obs: sample must be nonempty");
  const double denom = static_cast<double>(n) + 1.0;

  std::vector<std::size_t> order(n);
  std::vector<double> ys(n);
  std::size_t num_ranks = 0;
  std::vector<std::size_t> yranks;
  {
    profiler::ScopedSpan span("sort_points");
    for (std::size_t i = 0; i < n; ++i) {
      order[i] = i;
      ys[i] = s.points[i].second;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return s.points[a].first < s.points[b].first;
    });
    yranks = dense_ranks(ys, num_ranks);
  }

  // Walk groups of equal x: query every member against the tree of points
  // with strictly smaller x, then insert the whole group.
  profiler::ScopedSpan span("count_dominance");
  PseudoObservations out;
  out.w.resize(n);
  FenwickTree bit(num_ranks);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    const double x = s.points[order[i]].first;
    while (j < n && s.points[order[j]].first == x) ++j;
    for (std::size_t k = i; k < j; ++k) {
      const std::size_t idx = order[k];
      out.w[idx] =
          static_cast<double>(bit.prefix_sum(yranks[idx] - 1)) / denom;
    }
    for (std::size_t k = i; k < j; ++k) {
      bit.add(yranks[order[k]], 1);
    }
    i = j;
  }
  return out;
}

double kendall_cdf(const PseudoObservations& w, double t) {
  if (w.w.empty()) throw std::invalid_argument("kendall_cdf: empty pseudo-observations");
  std::size_t c = 0;
  for (double x : w.w) {
    if (x <= t) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(w.w.size());
}

namespace {

void check_clt_config(const CltConfig& c) {
  if (c.n < 1) throw std::invalid_argument("clt: n must be >= 1");
  if (c.reps < 1) throw std::invalid_argument("clt: reps must be >= 1");
  if (!(c.lambda > 0.0)) throw std::invalid_argument("clt: lambda must be positive");
}

}  // namespace

double clt_replicate_mean(const CltConfig& c, std::int64_t replicate) {
  check_clt_config(c);
  if (replicate < 1) throw std::invalid_argument("clt: replicate index must be >= 1");
  rng::Stream s(c.seed, stream_id(kStreamClt,
                                  static_cast<std::uint64_t>(replicate - 1)));
  std::int64_t sum = 0;
  for (std::int64_t i = 0; i < c.n; ++i) sum += s.next_poisson(c.lambda);
  return static_cast<double>(sum) / static_cast<double>(c.n);
}

std::vector<double> clt_sample_means(const CltConfig& c) {
  check_clt_config(c);
  std::vector<double> xbar(static_cast<std::size_t>(c.reps));
  for (std::int64_t r = 1; r <= c.reps; ++r) {
    xbar[static_cast<std::size_t>(r - 1)] = clt_replicate_mean(c, r);
  }
  return xbar;
}

HistogramBins histogram(const std::vector<double>& data, int breaks) {
  if (data.empty()) throw std::invalid_argument("histogram: data must be nonempty");
  if (breaks < 1) throw std::invalid_argument("histogram: breaks must be >= 1");
  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double total = static_cast<double>(data.size());

  HistogramBins bins;
  if (lo == hi) {
    bins.edges = {lo - 0.5, lo + 0.5};
    bins.counts = {static_cast<std::int64_t>(data.size())};
    bins.densities = {1.0};
    return bins;
  }

  const std::size_t k = static_cast<std::size_t>(breaks);
  const double width = (hi - lo) / static_cast<double>(k);
  bins.edges.resize(k + 1);
  for (std::size_t i = 0; i <= k; ++i) {
    bins.edges[i] = lo + static_cast<double>(i) * width;
  }
  bins.edges[k] = hi;

  bins.counts.assign(k, 0);
  for (double x : data) {
    auto idx = static_cast<std::size_t>((x - lo) / width);
    if (idx >= k) idx = k - 1;  // x == hi lands in the last (closed) bin
    ++bins.counts[idx];
  }
  bins.densities.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double w = bins.edges[i + 1] - bins.edges[i];
    bins.densities[i] = static_cast<double>(bins.counts[i]) / (total * w);
  }
  return bins;
}

// --- demo workloads -----------------------------------------------------------

namespace {

double foreach_demo_value(std::int64_t i, const ReplicateParams& p) {
  rng::Stream s(p.seed, stream_id(kStreamForeach,
                                  static_cast<std::uint64_t>(i - 1)));
  double sum = 0.0;
  for (std::int64_t k = 0; k < p.n; ++k) sum += s.next_normal();
  const double si = std::sin(static_cast<double>(i));
  return std::sqrt(1.0 / (si * si)) - sum;
}

// Deterministic multi-phase task for the profile subcommand. The line
// variant tags the same phases with #<line> labels as a line profiler would.
void profile_demo(bool line_mode) {
  constexpr std::size_t kN = 400000;
  rng::Stream s(7, stream_id(kStreamInput, 1));
  std::vector<double> a;
  std::vector<double> b;
  double sink = 0.0;
  {
    profiler::ScopedSpan span(line_mode ? "#2" : "generate_a");
    a.resize(kN);
    for (auto& x : a) x = s.next_normal();
  }
  {
    profiler::ScopedSpan span(line_mode ? "#3" : "transform");
    for (std::size_t i = 0; i + 1 < kN; ++i) {
      a[i] = std::exp(-std::abs(a[i] + a[i + 1]));
    }
  }
  {
    profiler::ScopedSpan span(line_mode ? "#8" : "generate_b");
    b.resize(kN);
    for (auto& x : b) x = s.next_normal();
  }
  {
    profiler::ScopedSpan span(line_mode ? "#9" : "multiply");
    for (std::size_t i = 0; i < kN; ++i) a[i] *= b[i];
  }
  {
    profiler::ScopedSpan span(line_mode ? "#11" : "reduce");
    for (double x : a) sink += x;
  }
  // keep the result alive
  volatile double keep = sink;
  (void)keep;
}

std::vector<double> to_doubles(const std::vector<std::int64_t>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
  return out;
}

std::vector<KernelInfo> build_registry() {
  std::vector<KernelInfo> r;

  r.push_back({"squares.naive", "squared integers, container grown per element",
               [](const BenchInput& in) { return squares_naive(in.n); },
               nullptr, nullptr});
  r.push_back({"squares.prealloc", "squared integers, container preallocated",
               [](const BenchInput& in) { return squares_prealloc(in.n); },
               nullptr, nullptr});
  r.push_back({"sine.naive", "2*pi*sin(i) with the scale inside the loop",
               [](const BenchInput& in) { return scaled_sine_naive(in.n); },
               nullptr, nullptr});
  r.push_back({"sine.vectorized", "2*pi*sin(i) with the scale hoisted",
               [](const BenchInput& in) { return scaled_sine_vectorized(in.n); },
               nullptr, nullptr});
  r.push_back({"rank.naive", "prefix rank counts, quadratic loop",
               [](const BenchInput& in) {
                 return to_doubles(rank_count_naive(uniform_vector(in.n, in.seed)));
               },
               nullptr, nullptr});
  r.push_back({"rank.fast", "prefix rank counts, binary indexed tree",
               [](const BenchInput& in) {
                 return to_doubles(rank_count_fast(uniform_vector(in.n, in.seed)));
               },
               nullptr,
               [](bool) {
                 rank_count_fast(uniform_vector(200000, 42));
               }});
  r.push_back({"kde.naive", "Gaussian KDE, full double loop",
               [](const BenchInput& in) {
                 KdeParams p{uniform_vector(in.n, in.seed, 10.0), {}, in.h};
                 p.xpts.resize(10000);
                 for (std::size_t i = 0; i < p.xpts.size(); ++i) {
                   p.xpts[i] = 10.0 * static_cast<double>(i) / 9999.0;
                 }
                 return kde_naive(p);
               },
               nullptr, nullptr});
  r.push_back({"kde.fast", "Gaussian KDE, sorted data with tail cutoff",
               [](const BenchInput& in) {
                 KdeParams p{uniform_vector(in.n, in.seed, 10.0), {}, in.h};
                 p.xpts.resize(10000);
                 for (std::size_t i = 0; i < p.xpts.size(); ++i) {
                   p.xpts[i] = 10.0 * static_cast<double>(i) / 9999.0;
                 }
                 return kde_fast(p);
               },
               nullptr,
               [](bool) {
                 KdeParams p{uniform_vector(2000, 42, 10.0), {}, 0.75};
                 p.xpts.resize(10000);
                 for (std::size_t i = 0; i < p.xpts.size(); ++i) {
                   p.xpts[i] = 10.0 * static_cast<double>(i) / 9999.0;
                 }
                 kde_fast(p);
               }});
  r.push_back({"pseudo.naive", "Kendall pseudo-observations, quadratic loop",
               [](const BenchInput& in) {
                 return pseudo_obs_naive({uniform_pairs(in.n, in.seed)}).w;
               },
               nullptr, nullptr});
  r.push_back({"pseudo.fast", "Kendall pseudo-observations, dominance counting",
               [](const BenchInput& in) {
                 return pseudo_obs_fast({uniform_pairs(in.n, in.seed)}).w;
               },
               nullptr,
               [](bool) {
                 pseudo_obs_fast({uniform_pairs(100000, 42)});
               }});
  r.push_back({"clt", "mean of n Poisson(lambda) draws per replicate",
               nullptr,
               [](std::int64_t i, const ReplicateParams& p) {
                 return clt_replicate_mean({p.n, 1, p.lambda, p.seed}, i);
               },
               nullptr});
  r.push_back({"foreach.demo", "sqrt(1/sin(i)^2) minus a sum of n normals",
               nullptr, foreach_demo_value, nullptr});
  r.push_back({"profile.demo", "multi-phase instrumented demo task",
               nullptr, nullptr, profile_demo});
  return r;
}

}  // namespace

const std::vector<KernelInfo>& registry() {
  static const std::vector<KernelInfo> r = build_registry();
  return r;
}

const KernelInfo* find_kernel(const std::string& id) {
  for (const auto& k : registry()) {
    if (k.id == id) return &k;
  }
  return nullptr;
}

std::vector<std::string> kernel_ids() {
  std::vector<std::string> ids;
  for (const auto& k : registry()) ids.push_back(k.id);
  return ids;
}

}  // namespace perfbench::kernels
