#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fieldvar {

/// Formats a float with 8 significant digits (the project-wide file format).
std::string format_float(double v);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Write-temp-then-rename so readers never observe a half-written file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::vector<std::string> split(const std::string& line, char sep);
std::string trim(const std::string& s);

}  // namespace fieldvar
