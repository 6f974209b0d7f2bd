#include "panel.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace mindiv {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Dates must compare in ascending order; numeric forms like 19800102 and
// ISO forms like 1980-01-02 both order correctly as strings within a file.
bool looks_like_header(const std::vector<std::string>& cells) {
    if (cells.size() < 2) return false;
    const std::string& c = cells[1];
    double v;
    const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
    return res.ec != std::errc() || res.ptr != c.data() + c.size();
}

} // namespace

void returns_panel::validate() const {
    require(cols() >= 2, errc::invalid_argument, "panel needs at least two assets");
    require(rows() >= 1, errc::invalid_argument, "panel needs at least one row");
    require(values.size() == rows() * cols(), errc::internal, "panel shape mismatch");
    for (std::size_t i = 1; i < dates.size(); ++i) {
        require(dates[i - 1] < dates[i], errc::non_monotone_dates,
                "dates must be strictly increasing (row " + std::to_string(i + 1) + ")");
    }
}

returns_panel ingest_csv(const std::string& path, return_units units) {
    std::ifstream in(path);
    require(in.good(), errc::io_error, "cannot open returns file: " + path);
    return ingest_csv(in, units, path);
}

returns_panel ingest_csv(std::istream& in, return_units units, const std::string& name) {
    returns_panel panel;
    std::string line;
    std::size_t lineno = 0;
    const double scale = units == return_units::percent ? 0.01 : 1.0;
    std::size_t expected_cols = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_csv(line);
        if (panel.assets.empty() && expected_cols == 0 && looks_like_header(cells)) {
            panel.assets.assign(cells.begin() + 1, cells.end());
            expected_cols = cells.size();
            continue;
        }
        if (expected_cols == 0) expected_cols = cells.size();
        require(cells.size() == expected_cols, errc::parse_error,
                name + ": row " + std::to_string(lineno) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(expected_cols));
        require(!cells[0].empty(), errc::missing_cell,
                name + ": missing date at row " + std::to_string(lineno));
        panel.dates.push_back(cells[0]);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            require(!cells[c].empty(), errc::missing_cell,
                    name + ": missing value at row " + std::to_string(lineno) + ", column " +
                        std::to_string(c + 1));
            double v;
            const auto res =
                std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v);
            require(res.ec == std::errc() && res.ptr == cells[c].data() + cells[c].size(),
                    errc::parse_error,
                    name + ": bad number '" + cells[c] + "' at row " + std::to_string(lineno));
            panel.values.push_back(v * scale);
        }
    }
    require(!panel.dates.empty(), errc::parse_error, name + ": no data rows");
    if (panel.assets.empty()) {
        const std::size_t d = expected_cols - 1;
        for (std::size_t c = 0; c < d; ++c) panel.assets.push_back("asset" + std::to_string(c + 1));
    }
    panel.validate();
    return panel;
}

} // namespace mindiv
