#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hornlab::io {

/// 12 significant digits, scientific, '.' separator ("%.11e").
std::string sci(double x);

/// Writes a header line and rows of numbers, newline-terminated.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace hornlab::io
