#include "perfbench/parcoord.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "perfbench/kernels.hpp"
#include "perfbench/textio.hpp"

namespace perfbench::parcoord {

namespace {

constexpr const char* kRunning = "running";
constexpr const char* kTerminated = "terminated";

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::function<double(std::int64_t)> replicate_fn(const JobConfig& job) {
  const kernels::KernelInfo* k = kernels::find_kernel(job.kernel_id);
  if (k == nullptr || !k->replicate) {
    throw std::invalid_argument("no replicated kernel with id '" +
                                job.kernel_id + "'");
  }
  kernels::ReplicateParams params{job.seed, job.n, job.lambda};
  auto fn = k->replicate;
  return [fn, params](std::int64_t i) { return fn(i, params); };
}

std::vector<double> compute_chunk(const Chunk& chunk, const JobConfig& job) {
  const auto fn = replicate_fn(job);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(chunk.size()));
  for (std::int64_t i = chunk.begin; i < chunk.end; ++i) {
    values.push_back(fn(i));
  }
  return values;
}

}  // namespace

TaskPartition partition(std::int64_t total_reps, int num_workers) {
  if (num_workers < 1) throw std::invalid_argument("partition: num_workers must be >= 1");
  if (total_reps < num_workers) {
    throw std::invalid_argument("partition: num_workers exceeds total_reps");
  }
  TaskPartition part;
  part.total_reps = total_reps;
  part.num_workers = num_workers;
  const std::int64_t base = total_reps / num_workers;
  const std::int64_t remainder = total_reps % num_workers;
  std::int64_t begin = 1;
  for (int i = 0; i < num_workers; ++i) {
    const std::int64_t size = base + (i < remainder ? 1 : 0);
    part.chunks.push_back({begin, begin + size});
    begin += size;
  }
  return part;
}

std::filesystem::path status_path(const std::filesystem::path& workdir,
                                  int worker_id) {
  return workdir / ("status" + std::to_string(worker_id) + ".txt");
}

std::filesystem::path result_path(const std::filesystem::path& workdir,
                                  int worker_id) {
  return workdir / ("xbar" + std::to_string(worker_id) + ".txt");
}

WorkerOutput worker_run(int worker_id, Chunk chunk, const JobConfig& job,
                        const std::filesystem::path& workdir) {
  if (worker_id < 1) throw std::invalid_argument("worker_run: worker id must be >= 1");
  if (chunk.size() < 1) throw std::invalid_argument("worker_run: empty chunk");

  textio::write_file_atomic(status_path(workdir, worker_id),
                            std::string(kRunning) + "\n");

  WorkerOutput out;
  out.worker_id = worker_id;
  out.values = compute_chunk(chunk, job);
  out.path = result_path(workdir, worker_id);

  // Result first, fully durable, then the status flip that publishes it.
  textio::write_values(out.path, out.values);
  textio::write_file_atomic(status_path(workdir, worker_id),
                            std::string(kTerminated) + "\n");
  return out;
}

std::vector<double> master_run(const TaskPartition& part, const JobConfig& job,
                               const std::filesystem::path& workdir,
                               const MasterOptions& opts) {
  if (part.chunks.empty()) throw std::invalid_argument("master_run: empty partition");
  if (!(opts.poll_interval > 0.0)) {
    throw std::invalid_argument("master_run: poll interval must be positive");
  }

  // The master is worker 1 and computes its own chunk before polling.
  const double own_start = now_seconds();
  std::vector<double> all = compute_chunk(part.chunks[0], job);
  const double own_duration = now_seconds() - own_start;

  const double timeout = opts.timeout >= 0.0
                             ? opts.timeout
                             : std::max({10.0 * own_duration,
                                         10.0 * opts.poll_interval, 1.0});

  const int nworkers = static_cast<int>(part.chunks.size());
  const double wait_start = now_seconds();
  while (true) {
    std::vector<int> unfinished;
    for (int id = 2; id <= nworkers; ++id) {
      const auto path = status_path(workdir, id);
      std::error_code ec;
      if (!std::filesystem::exists(path, ec) || ec) {
        unfinished.push_back(id);
        continue;
      }
      const std::string status = textio::trim(textio::read_file(path));
      if (status == kTerminated) continue;
      if (status == kRunning) {
        unfinished.push_back(id);
      } else {
        throw std::runtime_error("master_run: unexpected status '" + status +
                                 "' in " + path.string());
      }
    }
    if (unfinished.empty()) break;
    if (now_seconds() - wait_start > timeout) {
      std::string ids;
      for (int id : unfinished) ids += " " + std::to_string(id);
      throw std::runtime_error("master_run: timed out waiting for workers:" + ids);
    }
    if (opts.log != nullptr) {
      *opts.log << "waiting for";
      for (int id : unfinished) *opts.log << " worker" << id;
      *opts.log << "; sleeping " << opts.poll_interval << " s\n";
      opts.log->flush();
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(opts.poll_interval));
  }

  for (int id = 2; id <= nworkers; ++id) {
    const auto values = textio::read_values(result_path(workdir, id));
    const auto expected = part.chunks[static_cast<std::size_t>(id - 1)].size();
    if (static_cast<std::int64_t>(values.size()) != expected) {
      throw std::runtime_error("master_run: " + result_path(workdir, id).string() +
                               " holds " + std::to_string(values.size()) +
                               " values, expected " + std::to_string(expected));
    }
    all.insert(all.end(), values.begin(), values.end());
  }

  if (!opts.keep_files) {
    for (int id = 2; id <= nworkers; ++id) {
      std::error_code ec;
      std::filesystem::remove(status_path(workdir, id), ec);
      std::filesystem::remove(result_path(workdir, id), ec);
    }
  }
  return all;
}

std::vector<double> parallel_foreach(
    std::int64_t begin, std::int64_t end,
    const std::function<double(std::int64_t)>& task, int num_workers,
    Combine combine) {
  (void)combine;  // concat is the only combine
  if (num_workers < 1) {
    throw std::invalid_argument("parallel_foreach: num_workers must be >= 1");
  }
  if (end < begin) throw std::invalid_argument("parallel_foreach: end < begin");
  const std::size_t count = static_cast<std::size_t>(end - begin);
  std::vector<double> results(count);

  if (num_workers == 1) {
    for (std::int64_t i = begin; i < end; ++i) {
      results[static_cast<std::size_t>(i - begin)] = task(i);
    }
    return results;
  }

  std::atomic<std::int64_t> next{begin};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::int64_t error_index = 0;
  std::string error_message;

  auto body = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= end) return;
      try {
        results[static_cast<std::size_t>(i - begin)] = task(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.load() || i < error_index) {
          error_index = i;
          error_message = e.what();
        }
        failed.store(true);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(num_workers));
  for (int w = 0; w < num_workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();

  if (failed.load()) {
    throw std::runtime_error("parallel_foreach: task failed at index " +
                             std::to_string(error_index) + ": " + error_message);
  }
  return results;
}

int recommended_workers() {
  const unsigned cores = std::thread::hardware_concurrency();
  return cores > 1 ? static_cast<int>(cores) - 1 : 1;
}

pid_t spawn_process(const std::string& exe,
                    const std::vector<std::string>& args) {
  std::vector<char*> argv;
  argv.push_back(const_cast<char*>(exe.c_str()));
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    throw std::runtime_error(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::execv(exe.c_str(), argv.data());
    std::fprintf(stderr, "execv %s failed: %s\n", exe.c_str(), std::strerror(errno));
    ::_exit(127);
  }
  return pid;
}

int wait_process(pid_t pid) {
  int status = 0;
  if (::waitpid(pid, &status, 0) < 0) {
    throw std::runtime_error(std::string("waitpid failed: ") + std::strerror(errno));
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return -WTERMSIG(status);
  return -1;
}

void kill_process(pid_t pid) { ::kill(pid, SIGKILL); }

}  // namespace perfbench::parcoord
