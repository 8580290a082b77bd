#pragma once

#include <cstdint>
#include <string>

namespace perfbench::cluster {

/// Wall-time request. `original` is the text as written in the script;
/// `seconds` its canonical value.
struct TimeSpec {
  std::int64_t seconds = 0;
  std::string original;
};

/// Parses the six scheduler time formats: "minutes", "minutes:seconds",
/// "hours:minutes:seconds", "days-hours", "days-hours:minutes",
/// "days-hours:minutes:seconds". A bare number is minutes (sbatch(1)).
TimeSpec parse_time(const std::string& text);

struct MemSpec {
  std::string text;          // e.g. "512M", "1G"
  std::uint64_t bytes = 0;   // M = 2^20, G = 2^30
};

/// Accepts ^[0-9]+[MG]$ and nothing else.
MemSpec validate_mem(const std::string& text);

struct SlurmJobSpec {
  std::string job_name;  // may be empty, rendered as-is
  std::string mail_user;
  std::string mail_type = "ALL";
  std::string output;    // may be empty
  TimeSpec time;
  int ntasks = 1;
  int nodes = 1;
  int cpus_per_task = 1;
  int mem_per_cpu_mb = 1024;
  std::string command;
};

/// Parallel environment request: mpich with 1 slot, snode with k slots, or
/// snode8 with 8 slots.
struct SgeParallelEnv {
  std::string env = "mpich";
  int slots = 1;
};

constexpr std::int64_t kSgeMaxRuntimeSeconds = 432000;  // 5 days

struct SgeJobSpec {
  std::string name;
  SgeParallelEnv parallel_env;
  MemSpec h_vmem;
  MemSpec mem_free;
  std::int64_t h_rt_seconds = 60;
  std::string mail;  // empty omits the notification lines
  bool workdir_current = true;
  bool join_output = true;
  std::string command;
};

/// #SBATCH submission script; deterministic, LF-terminated, no trailing
/// whitespace.
std::string render_slurm(const SlurmJobSpec& spec);

/// #$ submission script for SGE, same encoding guarantees.
std::string render_sge(const SgeJobSpec& spec);

/// Directive parse-back of a rendered script (inverse of render on the
/// supported field subset).
SlurmJobSpec parse_slurm(const std::string& script);
SgeJobSpec parse_sge(const std::string& script);

}  // namespace perfbench::cluster
