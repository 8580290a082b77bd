#include "perfbench/cluster.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

namespace perfbench::cluster {

namespace {

const char* kTimeFormatsMsg =
    "expected one of: \"minutes\", \"minutes:seconds\", "
    "\"hours:minutes:seconds\", \"days-hours\", \"days-hours:minutes\", "
    "\"days-hours:minutes:seconds\"";

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::int64_t parse_part(const std::string& s, const std::string& text) {
  if (!all_digits(s)) {
    throw std::invalid_argument("parse_time: malformed time '" + text + "'; " +
                                kTimeFormatsMsg);
  }
  return std::stoll(s);
}

}  // namespace

TimeSpec parse_time(const std::string& text) {
  std::int64_t seconds = 0;
  const auto dash = text.find('-');
  if (dash != std::string::npos) {
    const std::string days_str = text.substr(0, dash);
    const std::string rest = text.substr(dash + 1);
    const std::int64_t days = parse_part(days_str, text);
    const auto parts = split(rest, ':');
    if (parts.size() > 3) {
      throw std::invalid_argument("parse_time: malformed time '" + text + "'; " +
                                  kTimeFormatsMsg);
    }
    // days-hours[:minutes[:seconds]]
    std::int64_t hours = parse_part(parts[0], text);
    std::int64_t minutes = parts.size() > 1 ? parse_part(parts[1], text) : 0;
    std::int64_t secs = parts.size() > 2 ? parse_part(parts[2], text) : 0;
    seconds = days * 86400 + hours * 3600 + minutes * 60 + secs;
  } else {
    const auto parts = split(text, ':');
    switch (parts.size()) {
      case 1:  // bare number is minutes
        seconds = parse_part(parts[0], text) * 60;
        break;
      case 2:  // minutes:seconds
        seconds = parse_part(parts[0], text) * 60 + parse_part(parts[1], text);
        break;
      case 3:  // hours:minutes:seconds
        seconds = parse_part(parts[0], text) * 3600 +
                  parse_part(parts[1], text) * 60 + parse_part(parts[2], text);
        break;
      default:
        throw std::invalid_argument("parse_time: malformed time '" + text +
                                    "'; " + kTimeFormatsMsg);
    }
  }
  if (seconds <= 0) {
    throw std::invalid_argument("parse_time: time must be positive, got '" +
                                text + "'");
  }
  return {seconds, text};
}

MemSpec validate_mem(const std::string& text) {
  if (text.size() < 2) {
    throw std::invalid_argument("validate_mem: '" + text +
                                "' does not match ^[0-9]+[MG]$");
  }
  const char unit = text.back();
  const std::string digits = text.substr(0, text.size() - 1);
  if ((unit != 'M' && unit != 'G') || !all_digits(digits)) {
    throw std::invalid_argument("validate_mem: '" + text +
                                "' does not match ^[0-9]+[MG]$");
  }
  const std::uint64_t count = std::stoull(digits);
  const std::uint64_t scale = unit == 'M' ? (1ull << 20) : (1ull << 30);
  return {text, count * scale};
}

namespace {

void check_positive(int v, const char* what) {
  if (v < 1) {
    throw std::invalid_argument(std::string("job spec: ") + what +
                                " must be >= 1");
  }
}

}  // namespace

std::string render_slurm(const SlurmJobSpec& spec) {
  if (spec.time.seconds <= 0) throw std::invalid_argument("job spec: time must be positive");
  if (spec.command.empty()) throw std::invalid_argument("job spec: command must be nonempty");
  check_positive(spec.ntasks, "ntasks");
  check_positive(spec.nodes, "nodes");
  check_positive(spec.cpus_per_task, "cpus-per-task");
  check_positive(spec.mem_per_cpu_mb, "mem-per-cpu");

  std::ostringstream out;
  out << "#!/bin/bash\n";
  out << "#SBATCH --job-name=" << spec.job_name << '\n';
  if (!spec.mail_user.empty()) {
    out << "#SBATCH --mail-user=" << spec.mail_user << '\n';
    out << "#SBATCH --mail-type=" << spec.mail_type << '\n';
  }
  out << "#SBATCH --output=" << spec.output << '\n';
  out << "#SBATCH --time=" << spec.time.original << '\n';
  out << "# Acceptable time formats include \"minutes\",\n";
  out << "# \"minutes:seconds\",\n";
  out << "# \"hours:minutes:seconds\", \"days-hours\", \"days-hours:minutes\"\n";
  out << "# and \"days-hours:minutes:seconds\"\n";
  out << "#SBATCH --ntasks=" << spec.ntasks << '\n';
  out << "#SBATCH --nodes=" << spec.nodes << '\n';
  out << "#SBATCH --cpus-per-task=" << spec.cpus_per_task << '\n';
  out << "#SBATCH --mem-per-cpu=" << spec.mem_per_cpu_mb << '\n';
  out << spec.command << '\n';
  out << "# end of job\n";
  return out.str();
}

std::string render_sge(const SgeJobSpec& spec) {
  if (spec.name.empty()) throw std::invalid_argument("job spec: name must be nonempty");
  if (spec.command.empty()) throw std::invalid_argument("job spec: command must be nonempty");
  if (spec.h_rt_seconds < 1) throw std::invalid_argument("job spec: h_rt must be >= 1");
  if (spec.h_rt_seconds > kSgeMaxRuntimeSeconds) {
    throw std::invalid_argument("job spec: h_rt exceeds the 5-day limit (432000 s)");
  }
  const auto& pe = spec.parallel_env;
  check_positive(pe.slots, "parallel environment slots");
  if (pe.env == "mpich") {
    if (pe.slots != 1) throw std::invalid_argument("job spec: -pe mpich takes exactly 1 slot");
  } else if (pe.env == "snode8") {
    if (pe.slots != 8) throw std::invalid_argument("job spec: -pe snode8 takes exactly 8 slots");
  } else if (pe.env != "snode") {
    throw std::invalid_argument("job spec: parallel environment must be mpich, snode or snode8");
  }
  validate_mem(spec.h_vmem.text);
  validate_mem(spec.mem_free.text);

  std::ostringstream out;
  out << "#!/bin/sh\n";
  out << "#$ -N " << spec.name << '\n';
  out << "#$ -pe " << pe.env << ' ' << pe.slots << '\n';
  out << "# Advised: requested memory for each core\n";
  out << "# 1G, 2G, 256M, etc\n";
  out << "#$ -l h_vmem=" << spec.h_vmem.text << '\n';
  out << "#$ -l mem_free=" << spec.mem_free.text << '\n';
  out << "#\n";
  out << "#$ -l h_rt=" << spec.h_rt_seconds << '\n';
  out << "# (xxxx sec or hh:mm:ss (max 5 days=120:0:0)\n";
  out << "# SGE will kill your job after the requested period.\n";
  out << "#\n";
  if (!spec.mail.empty()) {
    out << "# Advised: your Email here, for job notification\n";
    out << "#$ -M " << spec.mail << '\n';
    out << "#$ -m bes\n";
    out << "#\n";
  }
  out << "# Optional: ask for specific resources (licence, etc.) with\n";
  out << "## -l resourcename = ...\n";
  out << "#\n";
  out << "#$ -l nb=false\n";
  out << "#\n";
  out << "# Optional: activate resources reservation\n";
  out << "# when you need a large number of cores\n";
  out << "## -R y\n";
  out << "#\n";
  if (spec.workdir_current) {
    out << "# Advised: output in the current working dir\n";
    out << "#$ -cwd\n";
  }
  if (spec.join_output) {
    out << "# Advised: combine output/error messages into one file\n";
    out << "#$ -j y\n";
  }
  out << "#\n";
  out << "# Launch job\n";
  out << "echo \"Got $NSLOTS slots. Temp dir is $TMPDIR, Node file is:\"\n";
  out << "cat $TMPDIR/machines\n";
  out << "echo Start at\n";
  out << "date\n";
  out << spec.command << '\n';
  out << "echo End at\n";
  out << "date\n";
  out << "# end of job\n";
  return out.str();
}

namespace {

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

SlurmJobSpec parse_slurm(const std::string& script) {
  SlurmJobSpec spec;
  spec.mail_user.clear();
  std::istringstream in(script);
  std::string line;
  std::string last_nondirective;
  while (std::getline(in, line)) {
    if (starts_with(line, "#SBATCH --")) {
      const std::string body = line.substr(10);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "job-name") {
        spec.job_name = value;
      } else if (key == "mail-user") {
        spec.mail_user = value;
      } else if (key == "mail-type") {
        spec.mail_type = value;
      } else if (key == "output") {
        spec.output = value;
      } else if (key == "time") {
        spec.time = parse_time(value);
      } else if (key == "ntasks") {
        spec.ntasks = std::stoi(value);
      } else if (key == "nodes") {
        spec.nodes = std::stoi(value);
      } else if (key == "cpus-per-task") {
        spec.cpus_per_task = std::stoi(value);
      } else if (key == "mem-per-cpu") {
        spec.mem_per_cpu_mb = std::stoi(value);
      }
    } else if (!line.empty() && line[0] != '#' && !starts_with(line, "#!")) {
      last_nondirective = line;
    }
  }
  spec.command = last_nondirective;
  return spec;
}

SgeJobSpec parse_sge(const std::string& script) {
  SgeJobSpec spec;
  spec.workdir_current = false;
  spec.join_output = false;
  std::istringstream in(script);
  std::string line;
  std::vector<std::string> body_lines;
  while (std::getline(in, line)) {
    if (starts_with(line, "#$ ")) {
      const std::string body = line.substr(3);
      if (starts_with(body, "-N ")) {
        spec.name = body.substr(3);
      } else if (starts_with(body, "-pe ")) {
        std::istringstream ps(body.substr(4));
        ps >> spec.parallel_env.env >> spec.parallel_env.slots;
      } else if (starts_with(body, "-l h_vmem=")) {
        spec.h_vmem = validate_mem(body.substr(10));
      } else if (starts_with(body, "-l mem_free=")) {
        spec.mem_free = validate_mem(body.substr(12));
      } else if (starts_with(body, "-l h_rt=")) {
        spec.h_rt_seconds = std::stoll(body.substr(8));
      } else if (starts_with(body, "-M ")) {
        spec.mail = body.substr(3);
      } else if (body == "-cwd") {
        spec.workdir_current = true;
      } else if (body == "-j y") {
        spec.join_output = true;
      }
    } else if (!line.empty() && line[0] != '#') {
      body_lines.push_back(line);
    }
  }
  // The command sits between the date stamps of the launch scaffolding.
  for (std::size_t i = 0; i + 1 < body_lines.size(); ++i) {
    if (body_lines[i] == "date" && body_lines[i + 1] != "date" &&
        !starts_with(body_lines[i + 1], "echo")) {
      spec.command = body_lines[i + 1];
      break;
    }
  }
  return spec;
}

}  // namespace perfbench::cluster
