#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "powermfg/common.hpp"

namespace powermfg {

// 17 significant digits: doubles round-trip exactly through the CSV.
inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Comma separator, '.' decimal point, LF line endings, header row first.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("csv: cannot open '" + path + "' for writing");
        write_cells(header);
    }

    void row(const std::vector<std::string>& cells) { write_cells(cells); }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(csv_num(v));
        write_cells(cells);
    }

private:
    void write_cells(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

}  // namespace powermfg
