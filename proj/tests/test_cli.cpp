#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "perfbench/parcoord.hpp"
#include "perfbench/kernels.hpp"
#include "perfbench/textio.hpp"

namespace fs = std::filesystem;
using perfbench::textio::read_file;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

fs::path fresh_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = fs::temp_directory_path() /
                   ("perfbench_cli_" + tag + "_" + std::to_string(::getpid()) +
                    "_" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI through the shell in `dir`, capturing stdout/stderr.
RunResult run_cli(const fs::path& dir, const std::string& args,
                  const std::string& env = "") {
  const auto out_path = dir / "stdout.txt";
  const auto err_path = dir / "stderr.txt";
  std::string cmd = "cd '" + dir.string() + "' && " + env + " '" +
                    std::string(PERFBENCH_BIN) + "' " + args + " > '" +
                    out_path.string() + "' 2> '" + err_path.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = fs::exists(out_path) ? read_file(out_path) : "";
  r.err = fs::exists(err_path) ? read_file(err_path) : "";
  return r;
}

std::map<std::string, std::string> parse_record(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace

TEST_CASE("kernel subcommand prints the squares and exits 0") {
  const auto dir = fresh_dir("kernel");
  const auto r = run_cli(dir, "kernel --id squares.prealloc --n 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1\n4\n9\n");
  const auto rec = parse_record(dir / "perfbench.out");
  CHECK(rec.at("subcommand") == "kernel");
  CHECK(rec.at("outcome") == "ok");
  CHECK(rec.at("payload.count") == "3");
}

TEST_CASE("bad arguments exit 2 with usage text") {
  const auto dir = fresh_dir("badargs");
  const auto missing = run_cli(dir, "jobscript slurm --time 60 --mem 1G --cpus 1");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("--command") != std::string::npos);

  const auto unknown_flag = run_cli(dir, "kernel --id squares.naive --n 3 --wobble");
  CHECK(unknown_flag.exit_code == 2);

  const auto unknown_sub = run_cli(dir, "frobnicate");
  CHECK(unknown_sub.exit_code == 2);

  const auto nothing = run_cli(dir, "");
  CHECK(nothing.exit_code == 2);
}

TEST_CASE("help exits 0") {
  const auto dir = fresh_dir("help");
  CHECK(run_cli(dir, "--help").exit_code == 0);
  CHECK(run_cli(dir, "bench --help").exit_code == 0);
  CHECK(run_cli(dir, "jobscript slurm --help").exit_code == 0);
}

TEST_CASE("operational failures exit 1 and still write the record") {
  const auto dir = fresh_dir("oops");
  const auto r = run_cli(dir, "kernel --id no.such.kernel --n 3");
  CHECK(r.exit_code == 1);
  const auto rec = parse_record(dir / "perfbench.out");
  CHECK(rec.at("outcome") == "error");
  CHECK(rec.at("error").find("no.such.kernel") != std::string::npos);
}

TEST_CASE("bench on the rank pair flags the fast variant") {
  const auto dir = fresh_dir("bench");
  const auto r = run_cli(dir,
                         "bench --variant-a rank.naive --variant-b rank.fast "
                         "--n 20000 --reps 10 --method welch --out rec.txt");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("rank.naive") != std::string::npos);
  const auto rec = parse_record(dir / "rec.txt");
  CHECK(rec.at("payload.faster") == "B");
  CHECK(std::stod(rec.at("payload.p_value")) <= 0.01);
  CHECK(std::stod(rec.at("payload.mean_b")) < std::stod(rec.at("payload.mean_a")));
}

TEST_CASE("config file, environment and flags layer in that order") {
  const auto dir = fresh_dir("config");
  std::ofstream(dir / "perfbench.conf") << "alpha=0.01\nreps=4\n";

  const std::string bench_args =
      "bench --variant-a squares.naive --variant-b squares.prealloc --n 64";

  const auto file_only = run_cli(dir, bench_args);
  CHECK(file_only.exit_code == 0);
  auto rec = parse_record(dir / "perfbench.out");
  CHECK(rec.at("param.alpha") == "0.01");
  CHECK(rec.at("param.reps") == "4");
  CHECK(rec.at("config.alpha") == "0.01");

  const auto env_over_file = run_cli(dir, bench_args, "PERFBENCH_ALPHA=0.2");
  CHECK(env_over_file.exit_code == 0);
  rec = parse_record(dir / "perfbench.out");
  CHECK(rec.at("param.alpha") == "0.2");

  const auto flag_over_env =
      run_cli(dir, bench_args + " --alpha 0.3", "PERFBENCH_ALPHA=0.2");
  CHECK(flag_over_env.exit_code == 0);
  rec = parse_record(dir / "perfbench.out");
  CHECK(rec.at("param.alpha") == "0.3");

  const auto missing_config = run_cli(dir, bench_args + " --config nope.conf");
  CHECK(missing_config.exit_code == 2);
}

TEST_CASE("seeded subcommands are byte-reproducible") {
  const auto dir = fresh_dir("seed");
  const auto a = run_cli(dir, "kernel --id rank.fast --n 50 --seed 7");
  const auto b = run_cli(dir, "kernel --id rank.fast --n 50 --seed 7");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  const auto c = run_cli(dir, "kernel --id rank.fast --n 50 --seed 8");
  CHECK(c.out != a.out);
}

TEST_CASE("clt emits a density histogram as csv") {
  const auto dir = fresh_dir("clt");
  const auto r = run_cli(dir, "clt --reps 200 --n 50 --lambda 1 --seed 3 --breaks 10");
  CHECK(r.exit_code == 0);
  std::istringstream csv(r.out);
  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line == "edge,count,density");
  std::vector<double> edges;
  std::vector<std::int64_t> counts;
  std::vector<double> densities;
  while (std::getline(csv, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    edges.push_back(std::stod(line.substr(0, c1)));
    const std::string count_field = line.substr(c1 + 1, c2 - c1 - 1);
    if (count_field.empty()) break;  // trailing right-edge row
    counts.push_back(std::stoll(count_field));
    densities.push_back(std::stod(line.substr(c2 + 1)));
  }
  REQUIRE(counts.size() == 10);
  REQUIRE(edges.size() == 11);
  std::int64_t total = 0;
  double integral = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += counts[i];
    integral += densities[i] * (edges[i + 1] - edges[i]);
    CHECK(edges[i + 1] > edges[i]);
  }
  CHECK(total == 200);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));

  const auto rec = parse_record(dir / "perfbench.out");
  CHECK(rec.at("outcome") == "ok");
  const double mean = std::stod(rec.at("payload.mean_of_means"));
  CHECK(mean > 0.5);
  CHECK(mean < 1.5);
}

TEST_CASE("clt with a fixed seed emits identical csv across runs") {
  const auto dir = fresh_dir("cltseed");
  const auto a = run_cli(dir, "clt --reps 50 --n 30 --seed 11");
  const auto b = run_cli(dir, "clt --reps 50 --n 30 --seed 11");
  CHECK(a.out == b.out);
}

TEST_CASE("profile subcommand renders function and line reports") {
  const auto dir = fresh_dir("profile");
  const auto fun = run_cli(dir, "profile --kernel profile.demo --interval 0.005");
  CHECK(fun.exit_code == 0);
  CHECK(fun.out.find("$by.self") != std::string::npos);
  CHECK(fun.out.find("$by.total") != std::string::npos);
  CHECK(fun.out.find("\"generate_a\"") != std::string::npos);

  const auto lines =
      run_cli(dir, "profile --kernel profile.demo --interval 0.005 --lines --log span.log");
  CHECK(lines.exit_code == 0);
  CHECK(lines.out.find("$by.line") != std::string::npos);
  CHECK(lines.out.find("#2") != std::string::npos);
  const auto raw = read_file(dir / "span.log");
  CHECK(raw.find("ENTER #2 ") != std::string::npos);
  CHECK(raw.find("EXIT #11 ") != std::string::npos);
}

TEST_CASE("jobscript slurm reproduces the golden through the cli") {
  const auto dir = fresh_dir("jobscript");
  const auto r = run_cli(
      dir,
      "jobscript slurm --time 02:00:00 --mem 1024 --cpus 1 --mail me@gmail.com "
      "--command 'R CMD BATCH /home/ucl/isba/nuyttend/script.r' -o job.sh");
  CHECK(r.exit_code == 0);
  const auto golden = read_file(std::string(PERFBENCH_GOLDEN_DIR) + "/slurm_reference.sh");
  CHECK(read_file(dir / "job.sh") == golden);
}

TEST_CASE("jobscript sge writes a parseable script with mapped cores") {
  const auto dir = fresh_dir("sge");
  const auto r = run_cli(dir,
                         "jobscript sge --name myjob --time 60 --mem 1G --cpus 8 "
                         "--command 'R CMD BATCH script.r'");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("#$ -pe snode8 8\n") != std::string::npos);
  CHECK(r.out.find("#$ -l h_vmem=1G\n") != std::string::npos);
  CHECK(r.out.find("#$ -l h_rt=3600\n") != std::string::npos);

  const auto bad_mem = run_cli(dir,
                               "jobscript sge --name j --time 60 --mem 512K "
                               "--cpus 1 --command x");
  CHECK(bad_mem.exit_code == 1);  // validation failure at run time
}

TEST_CASE("master subcommand spawns workers and matches the library result") {
  const auto dir = fresh_dir("master");
  const auto wd = dir / "wd";
  const auto r = run_cli(dir, "master --workers 2 --reps 10 --kernel clt --seed 5 "
                              "--dir '" + wd.string() + "' --poll 0.05 --n 100");
  CHECK(r.exit_code == 0);
  std::string expected;
  for (double v : perfbench::kernels::clt_sample_means({100, 10, 1.0, 5})) {
    expected += perfbench::textio::format_g17(v);
    expected += '\n';
  }
  CHECK(r.out == expected);
  const auto rec = parse_record(dir / "perfbench.out");
  CHECK(rec.at("payload.values") == "10");
}

TEST_CASE("a worker killed mid-compute leaves running status behind") {
  const auto dir = fresh_dir("kill");
  const auto wd = dir / "wd";
  fs::create_directories(wd);
  const pid_t pid = perfbench::parcoord::spawn_process(
      PERFBENCH_BIN, {"worker", "--id", "2", "--chunk", "1:4", "--kernel", "clt",
                      "--seed", "5", "--n", "100", "--delay", "10", "--dir",
                      wd.string(), "--out", (wd / "w.out").string()});
  // wait for the running marker, then kill hard
  for (int i = 0; i < 200 && !fs::exists(wd / "status2.txt"); ++i) {
    ::usleep(20000);
  }
  REQUIRE(fs::exists(wd / "status2.txt"));
  perfbench::parcoord::kill_process(pid);
  CHECK(perfbench::parcoord::wait_process(pid) < 0);  // died by signal
  CHECK(read_file(wd / "status2.txt") == "running\n");
  CHECK_FALSE(fs::exists(wd / "xbar2.txt"));
}

TEST_CASE("worker subcommand runs the file protocol standalone") {
  const auto dir = fresh_dir("worker");
  const auto wd = dir / "wd";
  const auto r = run_cli(dir, "worker --id 4 --chunk 3:6 --kernel clt --seed 5 "
                              "--dir '" + wd.string() + "' --n 100");
  CHECK(r.exit_code == 0);
  CHECK(read_file(wd / "status4.txt") == "terminated\n");
  const auto values = perfbench::textio::read_values(wd / "xbar4.txt");
  REQUIRE(values.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(values[static_cast<std::size_t>(i)] ==
          perfbench::kernels::clt_replicate_mean({100, 1, 1.0, 5}, i + 3));
  }

  const auto bad_chunk = run_cli(dir, "worker --id 4 --chunk 6:3 --kernel clt "
                                      "--seed 5 --dir '" + wd.string() + "'");
  CHECK(bad_chunk.exit_code == 1);
}
