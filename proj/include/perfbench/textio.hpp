#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace perfbench::textio {

/// 17 significant digits: round-trips any double exactly.
std::string format_g17(double v);

/// Shortest decimal text that round-trips the double exactly.
std::string format_shortest(double v);

/// Writes via a temp file in the same directory, fsyncs, then renames, so
/// readers only ever observe complete content.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// One value per line, full precision.
void write_values(const std::filesystem::path& path,
                  const std::vector<double>& values);

/// Strict parse of a one-value-per-line file; errors carry file and line.
std::vector<double> read_values(const std::filesystem::path& path);

std::string trim(const std::string& s);

}  // namespace perfbench::textio
