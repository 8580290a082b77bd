#pragma once

#include <sys/types.h>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace perfbench::parcoord {

/// Replicate indices are 1-based; a chunk covers [begin, end).
struct Chunk {
  std::int64_t begin = 1;
  std::int64_t end = 1;
  std::int64_t size() const { return end - begin; }
};

struct TaskPartition {
  std::int64_t total_reps = 0;
  int num_workers = 0;  // includes the master's own chunk (the first)
  std::vector<Chunk> chunks;
};

/// Splits [1, total_reps] into num_workers contiguous chunks whose sizes
/// differ by at most one; earlier chunks take the remainder.
TaskPartition partition(std::int64_t total_reps, int num_workers);

/// Job parameters shared by every process of one run.
struct JobConfig {
  std::string kernel_id = "clt";
  std::uint64_t seed = 42;
  std::int64_t n = 100000;  // per-replicate workload size
  double lambda = 1.0;
};

struct WorkerOutput {
  int worker_id = 0;
  std::vector<double> values;
  std::filesystem::path path;
};

std::filesystem::path status_path(const std::filesystem::path& workdir, int worker_id);
std::filesystem::path result_path(const std::filesystem::path& workdir, int worker_id);

/// Runs one worker's chunk: writes `status<k>.txt` = running, computes the
/// chunk values with per-replicate streams, writes `xbar<k>.txt` (one value
/// per line, 17 significant digits), then flips the status file to
/// terminated. Every file write is temp-then-rename, so the master can
/// never observe a half-written file. On failure the status file stays
/// `running`.
WorkerOutput worker_run(int worker_id, Chunk chunk, const JobConfig& job,
                        const std::filesystem::path& workdir);

struct MasterOptions {
  double poll_interval = 10.0;  // seconds
  double timeout = -1.0;        // < 0: 10x the master's own chunk duration
  bool keep_files = false;      // delete worker files on success by default
  std::ostream* log = nullptr;  // wait messages
};

/// Computes the first chunk itself, then polls the workers' status files,
/// sleeping poll_interval while any is missing or `running`. When all have
/// terminated, concatenates the result files in worker order after its own
/// values. Errors on timeout (listing unfinished ids) and on malformed
/// result lines (naming file and line).
std::vector<double> master_run(const TaskPartition& part, const JobConfig& job,
                               const std::filesystem::path& workdir,
                               const MasterOptions& opts = {});

enum class Combine { concat };

/// Chunked parallel map over [begin, end): semantically the sequential
/// loop, with results in index order regardless of completion order. A
/// task failure at index i fails the whole call, reporting i.
std::vector<double> parallel_foreach(
    std::int64_t begin, std::int64_t end,
    const std::function<double(std::int64_t)>& task, int num_workers,
    Combine combine = Combine::concat);

/// Detected cores minus one (at least 1): leave one core free.
int recommended_workers();

// Process helpers for launching worker processes of the same executable.
pid_t spawn_process(const std::string& exe, const std::vector<std::string>& args);
int wait_process(pid_t pid);      // exit code, or -signal
void kill_process(pid_t pid);

}  // namespace perfbench::parcoord
