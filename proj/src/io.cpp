#include "tclplus/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "tclplus/errors.hpp"

namespace tclplus::io {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("atomic_write: cannot open " + tmp.string());
        out << content;
        if (!out.good()) throw Error("atomic_write: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body_ += ',';
        body_ += header[i];
    }
    body_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

std::string CsvWriter::str() const { return body_; }

const char* tool_version() { return TCLPLUS_VERSION; }

}  // namespace tclplus::io
