#include "perfbench/bench.hpp"

#include <chrono>

#include "perfbench/stats.hpp"

namespace perfbench::bench {

TimingSamples measure(const std::string& label,
                      const std::function<void()>& task, int reps,
                      int warmup) {
  if (reps < 1) throw std::invalid_argument("measure: reps must be >= 1");
  if (warmup < 0) throw std::invalid_argument("measure: warmup must be >= 0");
  if (label.empty()) throw std::invalid_argument("measure: label must be nonempty");

  using clock = std::chrono::steady_clock;
  TimingSamples out;
  out.label = label;
  out.reps = reps;
  out.seconds.reserve(static_cast<std::size_t>(reps));

  int completed = 0;
  try {
    for (int i = 0; i < warmup; ++i) task();
    for (int i = 0; i < reps; ++i) {
      const auto t0 = clock::now();
      task();
      const auto t1 = clock::now();
      out.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
      ++completed;
    }
  } catch (const std::exception& e) {
    throw MeasureError("measure: task '" + label + "' failed after " +
                           std::to_string(completed) + " completed reps: " +
                           e.what(),
                       completed);
  }
  return out;
}

ComparisonVerdict compare(const TimingSamples& a, const TimingSamples& b,
                          Method method, double alpha) {
  if (a.seconds.size() < 2 || b.seconds.size() < 2) {
    throw std::invalid_argument("compare: need >= 2 samples per variant");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("compare: alpha must be in (0, 1)");
  }

  ComparisonVerdict v{};
  v.method = method;
  v.mean_a = stats::mean(a.seconds);
  v.mean_b = stats::mean(b.seconds);

  if (method == Method::welch_t) {
    const auto r = stats::welch_t_test(a.seconds, b.seconds);
    v.statistic = r.t;
    v.p_value = r.p_value;
  } else {
    const auto r = stats::mann_whitney_test(a.seconds, b.seconds);
    v.statistic = r.u_a;
    v.p_value = r.p_value;
  }

  if (v.p_value > alpha) {
    v.faster = Faster::inconclusive;
  } else if (v.mean_a < v.mean_b) {
    v.faster = Faster::A;
  } else if (v.mean_b < v.mean_a) {
    v.faster = Faster::B;
  } else {
    // Conclusive p with identical means can only come from rank structure;
    // fall back to the statistic's direction.
    v.faster = v.statistic <= 0.0 ? Faster::A : Faster::B;
  }
  return v;
}

MemoryEstimate estimate_vector_memory(std::uint64_t element_count) {
  return {element_count, 8 * element_count};
}

std::string method_name(Method m) {
  return m == Method::welch_t ? "welch_t" : "mann_whitney";
}

std::string faster_name(Faster f) {
  switch (f) {
    case Faster::A:
      return "A";
    case Faster::B:
      return "B";
    default:
      return "inconclusive";
  }
}

}  // namespace perfbench::bench
