#pragma once

// Deterministic text output: every float is rendered with %.17g (exact
// round-trip for doubles), files are written to a temp sibling and
// renamed into place so a crashed run never leaves a half-written file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"

namespace susyforge {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// Grid-aligned CSV: the first column is x, the rest are the supplied
// channels. header.size() must equal cols.size() + 1.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const Grid& grid, const std::vector<const std::vector<double>*>& cols) {
    if (header.size() != cols.size() + 1)
        throw std::invalid_argument("write_csv: header/column count mismatch");
    for (const auto* c : cols)
        if (c->size() != grid.n) throw std::invalid_argument("write_csv: column length mismatch");

    std::string s;
    s.reserve(64 * (grid.n + 1));
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) s += ',';
        s += header[j];
    }
    s += '\n';
    for (std::size_t i = 0; i < grid.n; ++i) {
        s += fmt17(grid.x(i));
        for (const auto* c : cols) {
            s += ',';
            s += fmt17((*c)[i]);
        }
        s += '\n';
    }
    write_text_atomic(path, s);
}

}  // namespace susyforge
