#pragma once

#include <nlohmann/json_fwd.hpp>
#include <filesystem>
#include <string>
#include <vector>

namespace tclplus::io {

// Doubles formatted with 17 significant digits (round-trip exact).
std::string format_double(double v);

// Writes content to path via a temporary file in the same directory followed
// by an atomic rename; partial sweeps never leave corrupt files behind.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Minimal CSV assembly: all numeric cells go through format_double.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& cells);
    std::string str() const;
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }

  private:
    std::size_t columns_;
    std::string body_;
};

const char* tool_version();

}  // namespace tclplus::io
