/// @file io.hpp
/// @brief Atomic file output and deterministic CSV formatting.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kslg::io {

/// Writes to a sibling temporary file and renames it over `path`, so an
/// interrupted write never leaves a truncated file under the final name.
void atomic_write(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Shortest round-trippable decimal representation ("%.17g").
std::string format_double(double x);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& row(const std::vector<std::string>& cells);
    std::string str() const { return out_; }
    std::size_t columns() const { return columns_; }

private:
    std::size_t columns_;
    std::string out_;
};

}  // namespace kslg::io
