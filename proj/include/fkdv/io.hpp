#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fkdv/errors.hpp"

namespace fkdv {

/// Full-precision decimal rendering (17 significant digits): values survive
/// a text round trip bit-exactly, which keeps emitted CSVs byte-stable.
inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Writes content to a temporary sibling and renames it into place, so
/// readers never observe a partially written file.
inline void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + target.parent_path().string());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("failed renaming " + tmp.string() + " to " + path);
}

/// Rows of already-formatted cells; the writer only joins and terminates.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::string content;
    auto append_row = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) content += ',';
            content += cells[i];
        }
        content += '\n';
    };
    append_row(header);
    for (const auto& row : rows) append_row(row);
    atomic_write_file(path, content);
}

} // namespace fkdv
