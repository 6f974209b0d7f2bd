#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace mindiv {

enum class return_units { percent, decimal };

// Date-indexed matrix of per-asset arithmetic returns in decimal units.
struct returns_panel {
    std::vector<std::string> dates; // strictly increasing
    std::vector<std::string> assets;
    std::vector<double> values; // row-major, rows() x cols()

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return assets.size(); }
    double at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }

    void validate() const;
};

// Reads a rectangular CSV whose first column is the date. Percent inputs are
// divided by 100. Malformed rows are reported with their line number.
returns_panel ingest_csv(const std::string& path, return_units units);
returns_panel ingest_csv(std::istream& in, return_units units, const std::string& name);

} // namespace mindiv
