#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace perfbench::profiler {

/// Ordered enter/exit events of labeled spans on one thread. Times are
/// monotonic seconds; spans must close LIFO. Labels are free text without
/// whitespace; line-level spans use "#<n>" labels.
class SpanLog {
 public:
  struct Event {
    bool enter;
    std::uint32_t label;
    double t;
  };

  explicit SpanLog(double sample_interval = 0.02);

  double sample_interval() const { return sample_interval_; }
  const std::vector<Event>& events() const { return events_; }
  const std::string& label_text(std::uint32_t id) const { return labels_[id]; }
  bool empty() const { return events_.empty(); }

  /// Event cap; a run that outgrows it fails loudly instead of exhausting
  /// memory.
  void set_max_events(std::size_t n) { max_events_ = n; }

  void enter(std::string_view label, double t);
  void exit(std::string_view label, double t);

  /// Record a span against the wall clock (seconds since log creation).
  double now() const;

  /// Line-oriented persistence: "ENTER <label> <t>" / "EXIT <label> <t>".
  void save(std::ostream& out) const;
  static SpanLog load(std::istream& in, double sample_interval);

 private:
  std::uint32_t intern(std::string_view label);

  double sample_interval_;
  double epoch_;
  std::size_t max_events_ = 1 << 22;
  std::vector<std::string> labels_;
  std::map<std::string, std::uint32_t, std::less<>> label_ids_;
  std::vector<Event> events_;
  std::vector<std::uint32_t> open_;  // current stack, for validation
};

/// Installs `log` as the calling thread's active span log, restoring the
/// previous one on destruction.
SpanLog* set_active_log(SpanLog* log);
SpanLog* active_log();

/// RAII span against the thread's active log; no-op when none is installed.
class ScopedSpan {
 public:
  explicit ScopedSpan(const char* label);
  ~ScopedSpan();
  ScopedSpan(const ScopedSpan&) = delete;
  ScopedSpan& operator=(const ScopedSpan&) = delete;

 private:
  SpanLog* log_;
  std::string label_;
};

/// Runs `task` with a fresh active span log and returns the captured log.
/// line_mode is passed through to the task so it can pick its span labels.
SpanLog profile(const std::function<void(bool line_mode)>& task,
                double sample_interval, bool line_mode);

enum class ReportMode { by_self, by_total, by_line };

struct ReportRow {
  std::string label;
  double self_time;
  double self_pct;
  double total_time;
  double total_pct;
};

struct ProfileReport {
  std::vector<ReportRow> rows;
  double sample_interval = 0.02;
  double sampling_time = 0.0;
  ReportMode mode = ReportMode::by_self;
};

/// Aggregates the log the way a sampling profiler would: ticks fall every
/// sample_interval; each tick charges the innermost open span (self) and
/// every distinct label on the stack (total). Ticks with no open span are
/// not counted. by_line keeps only "#<n>" labels.
ProfileReport summarize(const SpanLog& log, ReportMode mode);

/// Exact (unsampled) per-label attribution, for cross-checking the sampled
/// report.
struct ExactAttribution {
  std::map<std::string, std::pair<double, double>> per_label;  // self, total
  double sampling_time = 0.0;
};
ExactAttribution exact_attribution(const SpanLog& log);

/// summaryRprof-shaped text: $by.self / $by.total ($by.line in line mode),
/// $sample.interval, $sampling.time.
std::string render_report(const ProfileReport& report);

/// Merge per-worker reports with disjoint label sets.
ProfileReport merge_reports(const ProfileReport& a, const ProfileReport& b);

}  // namespace perfbench::profiler
