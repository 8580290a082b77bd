#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "perfbench/bench.hpp"
#include "perfbench/cluster.hpp"
#include "perfbench/config.hpp"
#include "perfbench/kernels.hpp"
#include "perfbench/parcoord.hpp"
#include "perfbench/profiler.hpp"
#include "perfbench/stats.hpp"
#include "perfbench/textio.hpp"

namespace {

using namespace perfbench;

inline void do_not_optimize(const void* p) {
  asm volatile("" : : "g"(p) : "memory");
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string self_exe_path() {
  char buf[4096];
  const ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) throw std::runtime_error("cannot resolve /proc/self/exe");
  buf[n] = '\0';
  return buf;
}

// --- env / config layering ---------------------------------------------------

const char* env_get(const char* name) { return std::getenv(name); }

void overlay_env(cli::Defaults& d) {
  auto set_int = [](const char* name, auto& field) {
    if (const char* v = env_get(name)) field = std::stoll(v);
  };
  auto set_double = [](const char* name, double& field) {
    if (const char* v = env_get(name)) field = std::stod(v);
  };
  auto set_string = [](const char* name, std::string& field) {
    if (const char* v = env_get(name)) field = v;
  };
  set_int("PERFBENCH_REPS", d.reps);
  set_double("PERFBENCH_ALPHA", d.alpha);
  set_double("PERFBENCH_POLL", d.poll);
  set_string("PERFBENCH_METHOD", d.method);
  if (const char* v = env_get("PERFBENCH_SEED")) d.seed = std::stoull(v);
  set_int("PERFBENCH_WARMUP", d.warmup);
  set_int("PERFBENCH_BREAKS", d.breaks);
  set_double("PERFBENCH_LAMBDA", d.lambda);
  set_string("PERFBENCH_OUT", d.out);
}

std::string scan_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  if (const char* v = env_get("PERFBENCH_CONFIG")) return v;
  return "";
}

// --- shared option state -------------------------------------------------------

struct Options {
  // bench
  std::string variant_a, variant_b;
  // kernel / bench / profile inputs
  std::string kernel_id;
  std::int64_t n = 0;
  double h = 0.75;
  int reps = 30;
  std::string method = "welch";
  double alpha = 0.05;
  int warmup = 1;
  std::uint64_t seed = 42;
  // profile
  double interval = 0.02;
  bool lines = false;
  std::string log_path;
  // worker / master
  int worker_id = 1;
  std::string chunk;
  std::string dir = ".";
  double delay = 0.0;
  int workers = 0;
  double poll = 10.0;
  double timeout = -1.0;
  bool keep = false;
  bool no_spawn = false;
  double lambda = 1.0;
  std::int64_t clt_n = 100000;
  // clt
  int breaks = 100;
  std::string csv_path;
  // jobscript
  std::string job_name;
  std::string time_text;
  std::string mem_text;
  int cpus = 1;
  int ntasks = 1;
  int nodes = 1;
  std::string command;
  std::string mail;
  std::string script_out;
  // record
  std::string out = "perfbench.out";
  std::string config_path;
};

void record_param(cli::RunRecord& rec, const std::string& key,
                  const std::string& value) {
  rec.params.emplace_back(key, value);
}

void echo_config(cli::RunRecord& rec, const cli::Defaults& d) {
  rec.config.emplace_back("reps", std::to_string(d.reps));
  rec.config.emplace_back("alpha", textio::format_shortest(d.alpha));
  rec.config.emplace_back("poll", textio::format_shortest(d.poll));
  rec.config.emplace_back("method", d.method);
  rec.config.emplace_back("seed", std::to_string(d.seed));
  rec.config.emplace_back("warmup", std::to_string(d.warmup));
  rec.config.emplace_back("breaks", std::to_string(d.breaks));
  rec.config.emplace_back("lambda", textio::format_shortest(d.lambda));
  rec.config.emplace_back("out", d.out);
}

// --- subcommand bodies ---------------------------------------------------------

const kernels::KernelInfo& need_kernel(const std::string& id) {
  const auto* k = kernels::find_kernel(id);
  if (k == nullptr) {
    throw std::runtime_error("unknown kernel id '" + id + "'; known ids: " +
                             [] {
                               std::string s;
                               for (const auto& i : kernels::kernel_ids()) {
                                 if (!s.empty()) s += ", ";
                                 s += i;
                               }
                               return s;
                             }());
  }
  return *k;
}

void run_kernel_cmd(const Options& opt, cli::RunRecord& rec) {
  const auto& k = need_kernel(opt.kernel_id);
  if (!k.run) {
    throw std::runtime_error("kernel '" + opt.kernel_id +
                             "' is not runnable as a vector workload");
  }
  kernels::BenchInput input{static_cast<std::size_t>(opt.n), opt.seed, opt.h};
  const auto values = k.run(input);
  std::string text;
  for (double v : values) {
    text += textio::format_g17(v);
    text += '\n';
  }
  std::cout << text;
  rec.payload.emplace_back("count", std::to_string(values.size()));
}

void run_bench_cmd(const Options& opt, cli::RunRecord& rec) {
  const auto& ka = need_kernel(opt.variant_a);
  const auto& kb = need_kernel(opt.variant_b);
  if (!ka.run || !kb.run) {
    throw std::runtime_error("both variants must be vector workloads");
  }
  kernels::BenchInput input{static_cast<std::size_t>(opt.n), opt.seed, opt.h};

  auto make_task = [&input](const kernels::KernelInfo& k) {
    return [&input, &k]() {
      const auto values = k.run(input);
      do_not_optimize(values.data());
    };
  };
  const auto sa = bench::measure(opt.variant_a, make_task(ka), opt.reps, opt.warmup);
  const auto sb = bench::measure(opt.variant_b, make_task(kb), opt.reps, opt.warmup);

  const bench::Method method = opt.method == "mw" ? bench::Method::mann_whitney
                                                  : bench::Method::welch_t;
  const auto verdict = bench::compare(sa, sb, method, opt.alpha);

  std::cout << "variant                    reps      mean (s)    median (s)\n";
  auto print_row = [](const bench::TimingSamples& s) {
    const double m = perfbench::stats::mean(s.seconds);
    const double md = perfbench::stats::median(s.seconds);
    std::printf("%-26s %5d  %12.6f  %12.6f\n", s.label.c_str(), s.reps, m, md);
  };
  print_row(sa);
  print_row(sb);
  std::printf("method=%s statistic=%.6g p_value=%.6g alpha=%g faster=%s%s\n",
              bench::method_name(verdict.method).c_str(), verdict.statistic,
              verdict.p_value, opt.alpha,
              bench::faster_name(verdict.faster).c_str(),
              verdict.faster == bench::Faster::A
                  ? (" (" + opt.variant_a + ")").c_str()
                  : (verdict.faster == bench::Faster::B
                         ? (" (" + opt.variant_b + ")").c_str()
                         : ""));

  rec.payload.emplace_back("variant_a", opt.variant_a);
  rec.payload.emplace_back("variant_b", opt.variant_b);
  rec.payload.emplace_back("mean_a", textio::format_g17(verdict.mean_a));
  rec.payload.emplace_back("mean_b", textio::format_g17(verdict.mean_b));
  rec.payload.emplace_back("method", bench::method_name(verdict.method));
  rec.payload.emplace_back("statistic", textio::format_g17(verdict.statistic));
  rec.payload.emplace_back("p_value", textio::format_g17(verdict.p_value));
  rec.payload.emplace_back("faster", bench::faster_name(verdict.faster));
}

void run_profile_cmd(const Options& opt, cli::RunRecord& rec) {
  const auto& k = need_kernel(opt.kernel_id);
  if (!k.profiled) {
    throw std::runtime_error("kernel '" + opt.kernel_id +
                             "' has no instrumented variant");
  }
  const auto log = profiler::profile(k.profiled, opt.interval, opt.lines);
  if (!opt.log_path.empty()) {
    std::ostringstream raw;
    log.save(raw);
    textio::write_file_atomic(opt.log_path, raw.str());
  }
  const auto report = profiler::summarize(
      log, opt.lines ? profiler::ReportMode::by_line
                     : profiler::ReportMode::by_self);
  std::cout << profiler::render_report(report);
  rec.payload.emplace_back("sampling_time", textio::format_g17(report.sampling_time));
  rec.payload.emplace_back("rows", std::to_string(report.rows.size()));
}

parcoord::Chunk parse_chunk(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::runtime_error("chunk must be BEGIN:END (half-open, 1-based)");
  }
  parcoord::Chunk c;
  c.begin = std::stoll(text.substr(0, colon));
  c.end = std::stoll(text.substr(colon + 1));
  if (c.begin < 1 || c.end <= c.begin) {
    throw std::runtime_error("chunk must satisfy 1 <= BEGIN < END");
  }
  return c;
}

void run_worker_cmd(const Options& opt, cli::RunRecord& rec) {
  const auto chunk = parse_chunk(opt.chunk);
  const std::filesystem::path dir = opt.dir;
  std::filesystem::create_directories(dir);
  if (opt.delay > 0.0) {
    // Test hook: hold the protocol in the `running` state for a while.
    textio::write_file_atomic(parcoord::status_path(dir, opt.worker_id),
                              "running\n");
    std::this_thread::sleep_for(std::chrono::duration<double>(opt.delay));
  }
  parcoord::JobConfig job{opt.kernel_id, opt.seed, opt.clt_n, opt.lambda};
  const auto out = parcoord::worker_run(opt.worker_id, chunk, job, dir);
  rec.payload.emplace_back("values", std::to_string(out.values.size()));
  rec.payload.emplace_back("result_file", out.path.string());
}

std::vector<double> master_with_workers(const Options& opt,
                                        const parcoord::TaskPartition& part,
                                        const parcoord::JobConfig& job,
                                        const std::filesystem::path& dir) {
  std::vector<pid_t> children;
  if (!opt.no_spawn) {
    const std::string exe = self_exe_path();
    for (std::size_t i = 1; i < part.chunks.size(); ++i) {
      const auto& c = part.chunks[i];
      std::vector<std::string> args{
          "worker",
          "--id", std::to_string(i + 1),
          "--chunk", std::to_string(c.begin) + ":" + std::to_string(c.end),
          "--kernel", job.kernel_id,
          "--seed", std::to_string(job.seed),
          "--n", std::to_string(job.n),
          "--lambda", textio::format_g17(job.lambda),
          "--dir", dir.string(),
          "--out", (dir / ("worker" + std::to_string(i + 1) + ".out")).string()};
      children.push_back(parcoord::spawn_process(exe, args));
    }
  }

  parcoord::MasterOptions mopts;
  mopts.poll_interval = opt.poll;
  mopts.timeout = opt.timeout;
  mopts.keep_files = opt.keep;
  mopts.log = &std::cerr;
  try {
    auto values = parcoord::master_run(part, job, dir, mopts);
    for (pid_t pid : children) parcoord::wait_process(pid);
    return values;
  } catch (...) {
    for (pid_t pid : children) {
      parcoord::kill_process(pid);
      parcoord::wait_process(pid);
    }
    throw;
  }
}

void run_master_cmd(const Options& opt, cli::RunRecord& rec) {
  if (opt.workers < 1) throw std::runtime_error("--workers must be >= 1");
  const auto part = parcoord::partition(opt.n, opt.workers);
  parcoord::JobConfig job{opt.kernel_id, opt.seed, opt.clt_n, opt.lambda};
  const std::filesystem::path dir = opt.dir;
  std::filesystem::create_directories(dir);

  const auto values = master_with_workers(opt, part, job, dir);
  std::string text;
  for (double v : values) {
    text += textio::format_g17(v);
    text += '\n';
  }
  std::cout << text;
  rec.payload.emplace_back("values", std::to_string(values.size()));
  rec.payload.emplace_back("mean", textio::format_g17(stats::mean(values)));
}

void run_clt_cmd(const Options& opt, cli::RunRecord& rec) {
  kernels::CltConfig config{opt.clt_n, opt.n, opt.lambda, opt.seed};
  std::vector<double> xbar;
  if (opt.workers <= 1) {
    xbar = kernels::clt_sample_means(config);
  } else {
    const auto part = parcoord::partition(config.reps, opt.workers);
    parcoord::JobConfig job{"clt", opt.seed, opt.clt_n, opt.lambda};
    const std::filesystem::path dir = opt.dir;
    std::filesystem::create_directories(dir);
    xbar = master_with_workers(opt, part, job, dir);
  }

  const auto bins = kernels::histogram(xbar, opt.breaks);
  std::string csv = "edge,count,density\n";
  for (std::size_t i = 0; i < bins.counts.size(); ++i) {
    csv += textio::format_g17(bins.edges[i]) + "," +
           std::to_string(bins.counts[i]) + "," +
           textio::format_g17(bins.densities[i]) + "\n";
  }
  csv += textio::format_g17(bins.edges.back()) + ",,\n";
  if (opt.csv_path.empty()) {
    std::cout << csv;
  } else {
    textio::write_file_atomic(opt.csv_path, csv);
  }

  const double mean_of_means = stats::mean(xbar);
  const double var_of_means = stats::sample_variance(xbar);
  rec.payload.emplace_back("reps", std::to_string(xbar.size()));
  rec.payload.emplace_back("mean_of_means", textio::format_g17(mean_of_means));
  rec.payload.emplace_back("var_of_means", textio::format_g17(var_of_means));
}

int slurm_mem_mb(const std::string& text) {
  bool bare = !text.empty();
  for (char c : text) {
    if (c < '0' || c > '9') bare = false;
  }
  if (bare) return std::stoi(text);
  const auto mem = cluster::validate_mem(text);
  return static_cast<int>(mem.bytes >> 20);
}

void run_jobscript_cmd(const Options& opt, bool slurm, cli::RunRecord& rec) {
  std::string script;
  if (slurm) {
    cluster::SlurmJobSpec spec;
    spec.job_name = opt.job_name;
    spec.mail_user = opt.mail;
    spec.output = "";
    spec.time = cluster::parse_time(opt.time_text);
    spec.ntasks = opt.ntasks;
    spec.nodes = opt.nodes;
    spec.cpus_per_task = opt.cpus;
    spec.mem_per_cpu_mb = slurm_mem_mb(opt.mem_text);
    spec.command = opt.command;
    script = cluster::render_slurm(spec);
  } else {
    cluster::SgeJobSpec spec;
    spec.name = opt.job_name.empty() ? "job" : opt.job_name;
    if (opt.cpus == 1) {
      spec.parallel_env = {"mpich", 1};
    } else if (opt.cpus == 8) {
      spec.parallel_env = {"snode8", 8};
    } else {
      spec.parallel_env = {"snode", opt.cpus};
    }
    spec.h_vmem = cluster::validate_mem(opt.mem_text);
    spec.mem_free = spec.h_vmem;
    spec.h_rt_seconds = cluster::parse_time(opt.time_text).seconds;
    spec.mail = opt.mail;
    spec.command = opt.command;
    script = cluster::render_sge(spec);
  }
  if (opt.script_out.empty()) {
    std::cout << script;
  } else {
    textio::write_file_atomic(opt.script_out, script);
  }
  rec.payload.emplace_back("flavor", slurm ? "slurm" : "sge");
  rec.payload.emplace_back("bytes", std::to_string(script.size()));
}

}  // namespace

int main(int argc, char** argv) {
  cli::Defaults defaults;
  try {
    defaults = cli::load_defaults(scan_config_path(argc, argv));
    overlay_env(defaults);
  } catch (const std::exception& e) {
    std::cerr << "perfbench: " << e.what() << '\n';
    return 2;
  }

  Options opt;
  opt.reps = defaults.reps;
  opt.alpha = defaults.alpha;
  opt.poll = defaults.poll;
  opt.method = defaults.method == "mann_whitney" ? "mw" : defaults.method;
  opt.seed = defaults.seed;
  opt.warmup = defaults.warmup;
  opt.breaks = defaults.breaks;
  opt.lambda = defaults.lambda;
  opt.out = defaults.out;
  opt.workers = parcoord::recommended_workers();

  CLI::App app{"performance-engineering workbench"};
  app.require_subcommand(1);
  app.add_option("--config", opt.config_path,
                 "key=value config file (default ./perfbench.conf)");
  app.set_help_all_flag("--help-all");

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "machine-readable run record file");
  };

  auto* cmd_bench = app.add_subcommand("bench", "time two kernel variants and compare");
  cmd_bench->add_option("--variant-a", opt.variant_a, "kernel id")->required();
  cmd_bench->add_option("--variant-b", opt.variant_b, "kernel id")->required();
  cmd_bench->add_option("--n", opt.n, "workload size")->required();
  cmd_bench->add_option("--reps", opt.reps, "timed repetitions per variant");
  cmd_bench->add_option("--warmup", opt.warmup, "untimed warmup runs");
  cmd_bench->add_option("--method", opt.method, "welch or mw")
      ->check(CLI::IsMember({"welch", "mw"}));
  cmd_bench->add_option("--alpha", opt.alpha, "significance level");
  cmd_bench->add_option("--seed", opt.seed, "input-data seed");
  cmd_bench->add_option("--bandwidth", opt.h, "kde bandwidth");
  add_out(cmd_bench);

  auto* cmd_profile = app.add_subcommand("profile", "run an instrumented kernel and report");
  cmd_profile->add_option("--kernel", opt.kernel_id, "kernel id")->required();
  cmd_profile->add_option("--interval", opt.interval, "sample interval in seconds");
  cmd_profile->add_flag("--lines", opt.lines, "line-level report");
  cmd_profile->add_option("--log", opt.log_path, "save the raw span log here");
  add_out(cmd_profile);

  auto* cmd_kernel = app.add_subcommand("kernel", "run one kernel and print its values");
  cmd_kernel->add_option("--id", opt.kernel_id, "kernel id")->required();
  cmd_kernel->add_option("--n", opt.n, "workload size")->required();
  cmd_kernel->add_option("--seed", opt.seed, "input-data seed");
  cmd_kernel->add_option("--bandwidth", opt.h, "kde bandwidth");
  add_out(cmd_kernel);

  auto* cmd_worker = app.add_subcommand("worker", "compute one chunk under the file protocol");
  cmd_worker->add_option("--id", opt.worker_id, "worker id (>= 1)")->required();
  cmd_worker->add_option("--chunk", opt.chunk, "replicates BEGIN:END, half-open, 1-based")
      ->required();
  cmd_worker->add_option("--kernel", opt.kernel_id, "replicated kernel id")->required();
  cmd_worker->add_option("--seed", opt.seed, "job seed")->required();
  cmd_worker->add_option("--dir", opt.dir, "shared working directory")->required();
  cmd_worker->add_option("--n", opt.clt_n, "per-replicate workload size");
  cmd_worker->add_option("--lambda", opt.lambda, "Poisson mean");
  cmd_worker->add_option("--delay", opt.delay, "test hook: seconds to idle in running state");
  add_out(cmd_worker);

  auto* cmd_master = app.add_subcommand("master", "partition, coordinate workers, aggregate");
  cmd_master->add_option("--workers", opt.workers, "process count incl. master");
  cmd_master->add_option("--reps,--total-reps", opt.n, "total replicates")->required();
  cmd_master->add_option("--kernel", opt.kernel_id, "replicated kernel id")->required();
  cmd_master->add_option("--seed", opt.seed, "job seed")->required();
  cmd_master->add_option("--dir", opt.dir, "shared working directory")->required();
  cmd_master->add_option("--poll", opt.poll, "status poll interval in seconds");
  cmd_master->add_option("--timeout", opt.timeout, "seconds before giving up on workers");
  cmd_master->add_option("--n", opt.clt_n, "per-replicate workload size");
  cmd_master->add_option("--lambda", opt.lambda, "Poisson mean");
  cmd_master->add_flag("--keep", opt.keep, "keep status/result files on success");
  cmd_master->add_flag("--no-spawn", opt.no_spawn, "workers are launched externally");
  add_out(cmd_master);

  auto* cmd_clt = app.add_subcommand("clt", "Poisson sample-mean experiment, histogram CSV");
  cmd_clt->add_option("--reps", opt.n, "number of replicates")->required();
  cmd_clt->add_option("--n", opt.clt_n, "sample size per replicate");
  cmd_clt->add_option("--lambda", opt.lambda, "Poisson mean");
  cmd_clt->add_option("--seed", opt.seed, "job seed");
  cmd_clt->add_option("--breaks", opt.breaks, "histogram bins");
  cmd_clt->add_option("--workers", opt.workers, "process count; > 1 uses the file protocol");
  cmd_clt->add_option("--dir", opt.dir, "working directory for the file protocol");
  cmd_clt->add_option("--poll", opt.poll, "status poll interval in seconds");
  cmd_clt->add_option("--timeout", opt.timeout, "seconds before giving up on workers");
  cmd_clt->add_option("--csv", opt.csv_path, "write the histogram CSV here");
  cmd_clt->add_flag("--keep", opt.keep, "keep status/result files on success");
  add_out(cmd_clt);

  auto* cmd_jobscript = app.add_subcommand("jobscript", "render a batch submission script");
  cmd_jobscript->require_subcommand(1);
  CLI::App* js_slurm = cmd_jobscript->add_subcommand("slurm", "#SBATCH script");
  CLI::App* js_sge = cmd_jobscript->add_subcommand("sge", "#$ script");
  for (CLI::App* js : {js_slurm, js_sge}) {
    js->add_option("--name", opt.job_name, "job name");
    js->add_option("--time", opt.time_text, "wall time request")->required();
    js->add_option("--mem", opt.mem_text, "memory per core, e.g. 512M or 1G")->required();
    js->add_option("--cpus", opt.cpus, "cores for the job");
    js->add_option("--command", opt.command, "command the job runs")->required();
    js->add_option("--mail", opt.mail, "notification address");
    js->add_option("-o,--output", opt.script_out, "script file (stdout when absent)");
    add_out(js);
  }
  js_slurm->add_option("--ntasks", opt.ntasks, "task count");
  js_slurm->add_option("--nodes", opt.nodes, "node count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cli::RunRecord rec;
  rec.started_at = cli::iso8601_now();
  echo_config(rec, defaults);

  int exit_code = 0;
  const double t0 = now_seconds();
  try {
    if (app.got_subcommand(cmd_bench)) {
      rec.subcommand = "bench";
      record_param(rec, "variant_a", opt.variant_a);
      record_param(rec, "variant_b", opt.variant_b);
      record_param(rec, "n", std::to_string(opt.n));
      record_param(rec, "reps", std::to_string(opt.reps));
      record_param(rec, "method", opt.method);
      record_param(rec, "alpha", textio::format_shortest(opt.alpha));
      record_param(rec, "seed", std::to_string(opt.seed));
      run_bench_cmd(opt, rec);
    } else if (app.got_subcommand(cmd_profile)) {
      rec.subcommand = "profile";
      record_param(rec, "kernel", opt.kernel_id);
      record_param(rec, "interval", textio::format_shortest(opt.interval));
      record_param(rec, "lines", opt.lines ? "true" : "false");
      run_profile_cmd(opt, rec);
    } else if (app.got_subcommand(cmd_kernel)) {
      rec.subcommand = "kernel";
      record_param(rec, "id", opt.kernel_id);
      record_param(rec, "n", std::to_string(opt.n));
      record_param(rec, "seed", std::to_string(opt.seed));
      run_kernel_cmd(opt, rec);
    } else if (app.got_subcommand(cmd_worker)) {
      rec.subcommand = "worker";
      record_param(rec, "id", std::to_string(opt.worker_id));
      record_param(rec, "chunk", opt.chunk);
      record_param(rec, "kernel", opt.kernel_id);
      record_param(rec, "seed", std::to_string(opt.seed));
      record_param(rec, "dir", opt.dir);
      run_worker_cmd(opt, rec);
    } else if (app.got_subcommand(cmd_master)) {
      rec.subcommand = "master";
      record_param(rec, "workers", std::to_string(opt.workers));
      record_param(rec, "reps", std::to_string(opt.n));
      record_param(rec, "kernel", opt.kernel_id);
      record_param(rec, "seed", std::to_string(opt.seed));
      record_param(rec, "dir", opt.dir);
      record_param(rec, "poll", textio::format_shortest(opt.poll));
      run_master_cmd(opt, rec);
    } else if (app.got_subcommand(cmd_clt)) {
      rec.subcommand = "clt";
      if (cmd_clt->count("--workers") == 0) opt.workers = 1;
      record_param(rec, "reps", std::to_string(opt.n));
      record_param(rec, "n", std::to_string(opt.clt_n));
      record_param(rec, "lambda", textio::format_shortest(opt.lambda));
      record_param(rec, "seed", std::to_string(opt.seed));
      record_param(rec, "breaks", std::to_string(opt.breaks));
      record_param(rec, "workers", std::to_string(opt.workers));
      run_clt_cmd(opt, rec);
    } else if (app.got_subcommand(cmd_jobscript)) {
      rec.subcommand = "jobscript";
      const bool slurm = cmd_jobscript->got_subcommand(js_slurm);
      record_param(rec, "flavor", slurm ? "slurm" : "sge");
      record_param(rec, "name", opt.job_name);
      record_param(rec, "time", opt.time_text);
      record_param(rec, "mem", opt.mem_text);
      record_param(rec, "cpus", std::to_string(opt.cpus));
      record_param(rec, "command", opt.command);
      run_jobscript_cmd(opt, slurm, rec);
    }
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    std::cerr << "perfbench: " << e.what() << '\n';
    exit_code = 1;
  }
  rec.duration = now_seconds() - t0;

  try {
    rec.write(opt.out);
  } catch (const std::exception& e) {
    std::cerr << "perfbench: cannot write run record: " << e.what() << '\n';
    if (exit_code == 0) exit_code = 1;
  }
  return exit_code;
}
