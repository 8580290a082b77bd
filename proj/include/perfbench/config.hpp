#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace perfbench::cli {

/// Workbench defaults. Resolution order: flags > PERFBENCH_* environment >
/// config file > these built-ins.
struct Defaults {
  int reps = 30;
  double alpha = 0.05;
  double poll = 10.0;  // seconds
  std::string method = "welch";
  std::uint64_t seed = 42;
  int warmup = 1;
  int breaks = 100;
  double lambda = 1.0;
  std::string out = "perfbench.out";
};

/// Line-oriented key=value file; '#' starts a comment. Throws on an
/// unreadable path.
std::map<std::string, std::string> read_kv_file(const std::string& path);

/// Applies a config file's known keys over the built-ins. `path` empty
/// means the default ./perfbench.conf, which may be absent; an explicit
/// path must exist.
Defaults load_defaults(const std::string& path);

/// Machine-readable trace of one CLI invocation, written as line-delimited
/// key=value text. Always written, whatever the outcome.
struct RunRecord {
  std::string subcommand;
  std::string started_at;  // ISO 8601 UTC
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::pair<std::string, std::string>> config;
  double duration = 0.0;  // seconds
  bool ok = true;
  std::string error;
  std::vector<std::pair<std::string, std::string>> payload;

  void write(const std::string& path) const;
};

std::string iso8601_now();

}  // namespace perfbench::cli
