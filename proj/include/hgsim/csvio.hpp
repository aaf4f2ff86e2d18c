#pragma once

#include <string>
#include <vector>

#include "hgsim/simloop.hpp"

namespace hgsim {

// The exact SimLog column set, in serialization order.
const std::vector<std::string>& simlog_columns();

// Write a SimLog as CSV: exact header, 9 significant digits, LF endings.
void write_simlog_csv(const std::string& path, const SimLog& log);

// Generic numeric CSV with a header row.  Empty cells read as NaN.
// Parse failures throw ConfigError naming the offending line.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;  // column-major, aligned with header

    size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    bool has(const std::string& name) const;
    // Throws ConfigError naming the column when absent.
    const std::vector<double>& col(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Reassemble a SimLog from a table carrying the full column set (throws
// ConfigError naming the first missing column).
SimLog simlog_from_table(const CsvTable& table);

// Write a generic table: header + rows at 9 significant digits, LF endings.
// NaN cells serialize as empty.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Format one double at 9 significant digits (the CSV cell format).
std::string csv_num(double v);

}  // namespace hgsim
