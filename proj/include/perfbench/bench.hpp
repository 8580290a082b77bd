#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perfbench::bench {

/// Repeated wall-clock measurements of one task variant, in seconds.
struct TimingSamples {
  std::string label;
  std::vector<double> seconds;
  int reps = 0;
};

enum class Method { welch_t, mann_whitney };
enum class Faster { A, B, inconclusive };

struct ComparisonVerdict {
  Method method;
  double statistic;  // Welch t, or the Mann-Whitney U of sample A
  double p_value;
  Faster faster;
  double mean_a;
  double mean_b;
};

struct MemoryEstimate {
  std::uint64_t element_count;
  std::uint64_t bytes;
};

/// Raised when the measured task itself throws; carries how many reps had
/// completed by then.
class MeasureError : public std::runtime_error {
 public:
  MeasureError(const std::string& what, int completed_reps)
      : std::runtime_error(what), completed_reps(completed_reps) {}
  int completed_reps;
};

/// Times `task` reps times on the monotonic clock, after `warmup` untimed
/// runs. Only the task invocation is inside the timed window.
TimingSamples measure(const std::string& label,
                      const std::function<void()>& task, int reps,
                      int warmup = 1);

/// Decides which variant is faster. Welch's two-sided unequal-variance t
/// test, or Mann-Whitney U with midranks, tie-corrected variance and a
/// continuity-corrected normal approximation. `faster` is set only when
/// p_value <= alpha.
ComparisonVerdict compare(const TimingSamples& a, const TimingSamples& b,
                          Method method, double alpha = 0.05);

/// RAM locked by a dense double vector: 8 bytes per element.
MemoryEstimate estimate_vector_memory(std::uint64_t element_count);

std::string method_name(Method m);
std::string faster_name(Faster f);

}  // namespace perfbench::bench
