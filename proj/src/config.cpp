#include "perfbench/config.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "perfbench/textio.hpp"

namespace perfbench::cli {

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = textio::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": expected key=value, got '" + t + "'");
    }
    kv[textio::trim(t.substr(0, eq))] = textio::trim(t.substr(eq + 1));
  }
  return kv;
}

Defaults load_defaults(const std::string& path) {
  Defaults d;
  std::string effective = path;
  if (effective.empty()) {
    if (!std::filesystem::exists("perfbench.conf")) return d;
    effective = "perfbench.conf";
  }
  const auto kv = read_kv_file(effective);
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    if (const auto* v = get("reps")) d.reps = std::stoi(*v);
    if (const auto* v = get("alpha")) d.alpha = std::stod(*v);
    if (const auto* v = get("poll")) d.poll = std::stod(*v);
    if (const auto* v = get("method")) d.method = *v;
    if (const auto* v = get("seed")) d.seed = std::stoull(*v);
    if (const auto* v = get("warmup")) d.warmup = std::stoi(*v);
    if (const auto* v = get("breaks")) d.breaks = std::stoi(*v);
    if (const auto* v = get("lambda")) d.lambda = std::stod(*v);
    if (const auto* v = get("out")) d.out = *v;
  } catch (const std::exception&) {
    throw std::runtime_error("config file " + effective + " holds a malformed value");
  }
  return d;
}

std::string iso8601_now() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void RunRecord::write(const std::string& path) const {
  std::ostringstream out;
  out << "subcommand=" << subcommand << '\n';
  out << "started_at=" << started_at << '\n';
  for (const auto& [k, v] : params) out << "param." << k << '=' << v << '\n';
  for (const auto& [k, v] : config) out << "config." << k << '=' << v << '\n';
  out << "duration=" << textio::format_g17(duration) << '\n';
  out << "outcome=" << (ok ? "ok" : "error") << '\n';
  if (!ok) out << "error=" << error << '\n';
  for (const auto& [k, v] : payload) out << "payload." << k << '=' << v << '\n';
  textio::write_file_atomic(path, out.str());
}

}  // namespace perfbench::cli
