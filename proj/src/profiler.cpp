#include "perfbench/profiler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace perfbench::profiler {

namespace {

double steady_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool is_line_label(const std::string& label, long& line_no) {
  if (label.size() < 2 || label[0] != '#') return false;
  char* end = nullptr;
  line_no = std::strtol(label.c_str() + 1, &end, 10);
  return end != nullptr && *end == '\0';
}

thread_local SpanLog* t_active_log = nullptr;

}  // namespace

SpanLog::SpanLog(double sample_interval)
    : sample_interval_(sample_interval), epoch_(steady_seconds()) {
  if (!(sample_interval > 0.0)) {
    throw std::invalid_argument("profiler: sample_interval must be positive");
  }
}

double SpanLog::now() const { return steady_seconds() - epoch_; }

std::uint32_t SpanLog::intern(std::string_view label) {
  if (label.empty()) throw std::invalid_argument("profiler: empty span label");
  for (char c : label) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw std::invalid_argument("profiler: span label contains whitespace: '" +
                                  std::string(label) + "'");
    }
  }
  auto it = label_ids_.find(label);
  if (it != label_ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(labels_.size());
  labels_.emplace_back(label);
  label_ids_.emplace(labels_.back(), id);
  return id;
}

void SpanLog::enter(std::string_view label, double t) {
  if (events_.size() >= max_events_) {
    throw std::runtime_error("profiler: span log exceeds " +
                             std::to_string(max_events_) + " events");
  }
  if (!events_.empty() && t < events_.back().t) {
    throw std::invalid_argument("profiler: span times must be nondecreasing");
  }
  const auto id = intern(label);
  events_.push_back({true, id, t});
  open_.push_back(id);
}

void SpanLog::exit(std::string_view label, double t) {
  if (events_.size() >= max_events_) {
    throw std::runtime_error("profiler: span log exceeds " +
                             std::to_string(max_events_) + " events");
  }
  if (open_.empty()) {
    throw std::runtime_error("profiler: exit of '" + std::string(label) +
                             "' with no open span");
  }
  const auto id = intern(label);
  if (open_.back() != id) {
    throw std::runtime_error("profiler: unbalanced span: expected exit of '" +
                             labels_[open_.back()] + "', got '" +
                             std::string(label) + "'");
  }
  if (!events_.empty() && t < events_.back().t) {
    throw std::invalid_argument("profiler: span times must be nondecreasing");
  }
  events_.push_back({false, id, t});
  open_.pop_back();
}

void SpanLog::save(std::ostream& out) const {
  char buf[64];
  for (const auto& e : events_) {
    std::snprintf(buf, sizeof(buf), "%.9f", e.t);
    out << (e.enter ? "ENTER " : "EXIT ") << labels_[e.label] << ' ' << buf
        << '\n';
  }
}

SpanLog SpanLog::load(std::istream& in, double sample_interval) {
  SpanLog log(sample_interval);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind, label;
    double t = 0.0;
    if (!(ls >> kind >> label >> t) || (kind != "ENTER" && kind != "EXIT")) {
      throw std::runtime_error("profiler: malformed span log line " +
                               std::to_string(line_no) + ": '" + line + "'");
    }
    if (kind == "ENTER") {
      log.enter(label, t);
    } else {
      log.exit(label, t);
    }
  }
  return log;
}

SpanLog* set_active_log(SpanLog* log) {
  SpanLog* prev = t_active_log;
  t_active_log = log;
  return prev;
}

SpanLog* active_log() { return t_active_log; }

ScopedSpan::ScopedSpan(const char* label) : log_(t_active_log), label_(label) {
  if (log_ != nullptr) log_->enter(label_, log_->now());
}

ScopedSpan::~ScopedSpan() {
  if (log_ != nullptr) log_->exit(label_, log_->now());
}

SpanLog profile(const std::function<void(bool line_mode)>& task,
                double sample_interval, bool line_mode) {
  SpanLog log(sample_interval);
  SpanLog* prev = set_active_log(&log);
  try {
    task(line_mode);
  } catch (...) {
    set_active_log(prev);
    throw;
  }
  set_active_log(prev);
  if (!log.events().empty()) {
    // Validate full balance; SpanLog::exit already enforced LIFO order.
    std::vector<std::uint32_t> stack;
    for (const auto& e : log.events()) {
      if (e.enter) {
        stack.push_back(e.label);
      } else {
        stack.pop_back();
      }
    }
    if (!stack.empty()) {
      throw std::runtime_error("profiler: span '" +
                               log.label_text(stack.back()) +
                               "' still open at end of task");
    }
  }
  return log;
}

namespace {

// Visits every constant-stack segment of the log in time order.
// Throws on stack-discipline violations.
template <typename Fn>
void sweep_segments(const SpanLog& log, Fn&& fn) {
  std::vector<std::uint32_t> stack;
  const auto& evts = log.events();
  for (std::size_t i = 0; i < evts.size(); ++i) {
    if (i > 0) {
      const double t0 = evts[i - 1].t;
      const double t1 = evts[i].t;
      if (t1 < t0) throw std::runtime_error("profiler: span times not ordered");
      if (t1 > t0 && !stack.empty()) fn(t0, t1, stack);
    }
    const auto& e = evts[i];
    if (e.enter) {
      stack.push_back(e.label);
    } else {
      if (stack.empty() || stack.back() != e.label) {
        throw std::runtime_error("profiler: unbalanced span log at '" +
                                 log.label_text(e.label) + "'");
      }
      stack.pop_back();
    }
  }
  if (!stack.empty()) {
    throw std::runtime_error("profiler: span '" +
                             log.label_text(stack.back()) +
                             "' never exited");
  }
}

struct Ticks {
  std::map<std::uint32_t, std::int64_t> self;
  std::map<std::uint32_t, std::int64_t> total;
  std::int64_t sampled = 0;
};

// Sampling simulation: ticks at t0 + k*interval, k >= 1. A tick inside a
// segment (t_prev, t_cur] charges the top label's self count and each
// distinct stacked label's total count.
Ticks count_ticks(const SpanLog& log) {
  Ticks ticks;
  if (log.events().empty()) return ticks;
  const double t0 = log.events().front().t;
  const double iv = log.sample_interval();
  const double eps = iv * 1e-9;
  auto ticks_before = [&](double t) {
    return static_cast<std::int64_t>(std::floor((t - t0 + eps) / iv));
  };
  sweep_segments(log, [&](double a, double b,
                          const std::vector<std::uint32_t>& stack) {
    const std::int64_t c = ticks_before(b) - ticks_before(a);
    if (c <= 0) return;
    ticks.sampled += c;
    ticks.self[stack.back()] += c;
    std::set<std::uint32_t> distinct(stack.begin(), stack.end());
    for (auto id : distinct) ticks.total[id] += c;
  });
  return ticks;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

}  // namespace

ExactAttribution exact_attribution(const SpanLog& log) {
  ExactAttribution out;
  std::map<std::uint32_t, double> self;
  std::map<std::uint32_t, double> total;
  sweep_segments(log, [&](double a, double b,
                          const std::vector<std::uint32_t>& stack) {
    const double dt = b - a;
    out.sampling_time += dt;
    self[stack.back()] += dt;
    std::set<std::uint32_t> distinct(stack.begin(), stack.end());
    for (auto id : distinct) total[id] += dt;
  });
  for (const auto& [id, t] : total) {
    out.per_label[log.label_text(id)] = {self.count(id) ? self[id] : 0.0, t};
  }
  return out;
}

ProfileReport summarize(const SpanLog& log, ReportMode mode) {
  const Ticks ticks = count_ticks(log);
  const double iv = log.sample_interval();

  ProfileReport report;
  report.sample_interval = iv;
  report.sampling_time = static_cast<double>(ticks.sampled) * iv;
  report.mode = mode;

  for (const auto& [id, total_c] : ticks.total) {
    const std::string& label = log.label_text(id);
    long line_no = 0;
    const bool is_line = is_line_label(label, line_no);
    if (mode == ReportMode::by_line && !is_line) continue;
    const std::int64_t self_c = ticks.self.count(id) ? ticks.self.at(id) : 0;
    ReportRow row;
    row.label = label;
    row.self_time = static_cast<double>(self_c) * iv;
    row.total_time = static_cast<double>(total_c) * iv;
    if (ticks.sampled > 0) {
      row.self_pct = round2(100.0 * static_cast<double>(self_c) /
                            static_cast<double>(ticks.sampled));
      row.total_pct = round2(100.0 * static_cast<double>(total_c) /
                             static_cast<double>(ticks.sampled));
    } else {
      row.self_pct = 0.0;
      row.total_pct = 0.0;
    }
    report.rows.push_back(std::move(row));
  }

  auto line_of = [](const ReportRow& r) {
    long n = 0;
    is_line_label(r.label, n);
    return n;
  };
  switch (mode) {
    case ReportMode::by_self:
      std::sort(report.rows.begin(), report.rows.end(),
                [](const ReportRow& a, const ReportRow& b) {
                  if (a.self_time != b.self_time) return a.self_time > b.self_time;
                  return a.label < b.label;
                });
      break;
    case ReportMode::by_total:
      std::sort(report.rows.begin(), report.rows.end(),
                [](const ReportRow& a, const ReportRow& b) {
                  if (a.total_time != b.total_time) return a.total_time > b.total_time;
                  return a.label < b.label;
                });
      break;
    case ReportMode::by_line:
      std::sort(report.rows.begin(), report.rows.end(),
                [&](const ReportRow& a, const ReportRow& b) {
                  return line_of(a) < line_of(b);
                });
      break;
  }
  return report;
}

namespace {

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", t);
  return buf;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t w) {
  if (s.size() >= w) return s;
  return std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t w) {
  if (s.size() >= w) return s;
  return s + std::string(w - s.size(), ' ');
}

std::string display_label(const std::string& label) {
  long n = 0;
  if (is_line_label(label, n)) return label;
  return '"' + label + '"';
}

void render_section(std::string& out, const std::string& title,
                    const std::vector<const ReportRow*>& rows,
                    bool total_first) {
  std::size_t label_w = 0;
  for (const auto* r : rows) {
    label_w = std::max(label_w, display_label(r->label).size());
  }
  label_w += 1;

  const char* h1 = total_first ? "total.time" : "self.time";
  const char* h2 = total_first ? "total.pct" : "self.pct";
  const char* h3 = total_first ? "self.time" : "total.time";
  const char* h4 = total_first ? "self.pct" : "total.pct";

  out += title;
  out += '\n';
  out += std::string(label_w, ' ');
  out += pad_left(h1, total_first ? 10 : 9);
  out += ' ';
  out += pad_left(h2, total_first ? 9 : 8);
  out += ' ';
  out += pad_left(h3, total_first ? 9 : 10);
  out += ' ';
  out += pad_left(h4, total_first ? 8 : 9);
  out += '\n';
  for (const auto* r : rows) {
    double v1 = total_first ? r->total_time : r->self_time;
    double v2 = total_first ? r->total_pct : r->self_pct;
    double v3 = total_first ? r->self_time : r->total_time;
    double v4 = total_first ? r->self_pct : r->total_pct;
    out += pad_right(display_label(r->label), label_w);
    out += pad_left(format_time(v1), total_first ? 10 : 9);
    out += ' ';
    out += pad_left(format_time(v2), total_first ? 9 : 8);
    out += ' ';
    out += pad_left(format_time(v3), total_first ? 9 : 10);
    out += ' ';
    out += pad_left(format_time(v4), total_first ? 8 : 9);
    out += '\n';
  }
  out += '\n';
}

}  // namespace

std::string render_report(const ProfileReport& report) {
  std::vector<const ReportRow*> by_self;
  for (const auto& r : report.rows) by_self.push_back(&r);
  std::sort(by_self.begin(), by_self.end(),
            [](const ReportRow* a, const ReportRow* b) {
              if (a->self_time != b->self_time) return a->self_time > b->self_time;
              return a->label < b->label;
            });

  std::string out;
  render_section(out, "$by.self", by_self, false);

  if (report.mode == ReportMode::by_line) {
    std::vector<const ReportRow*> by_line = by_self;
    std::sort(by_line.begin(), by_line.end(),
              [](const ReportRow* a, const ReportRow* b) {
                long na = 0, nb = 0;
                is_line_label(a->label, na);
                is_line_label(b->label, nb);
                return na < nb;
              });
    render_section(out, "$by.line", by_line, false);
  } else {
    std::vector<const ReportRow*> by_total = by_self;
    std::sort(by_total.begin(), by_total.end(),
              [](const ReportRow* a, const ReportRow* b) {
                if (a->total_time != b->total_time) return a->total_time > b->total_time;
                return a->label < b->label;
              });
    render_section(out, "$by.total", by_total, true);
  }

  out += "$sample.interval\n[1] ";
  out += format_value(report.sample_interval);
  out += "\n\n$sampling.time\n[1] ";
  out += format_value(report.sampling_time);
  out += '\n';
  return out;
}

ProfileReport merge_reports(const ProfileReport& a, const ProfileReport& b) {
  if (a.sample_interval != b.sample_interval) {
    throw std::invalid_argument("merge_reports: sample intervals differ");
  }
  for (const auto& ra : a.rows) {
    for (const auto& rb : b.rows) {
      if (ra.label == rb.label) {
        throw std::invalid_argument("merge_reports: label namespaces overlap at '" +
                                    ra.label + "'");
      }
    }
  }
  ProfileReport out;
  out.sample_interval = a.sample_interval;
  out.sampling_time = a.sampling_time + b.sampling_time;
  out.mode = a.mode;
  out.rows = a.rows;
  out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
  for (auto& r : out.rows) {
    if (out.sampling_time > 0.0) {
      r.self_pct = round2(100.0 * r.self_time / out.sampling_time);
      r.total_pct = round2(100.0 * r.total_time / out.sampling_time);
    }
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const ReportRow& x, const ReportRow& y) {
              if (x.self_time != y.self_time) return x.self_time > y.self_time;
              return x.label < y.label;
            });
  return out;
}

}  // namespace perfbench::profiler
