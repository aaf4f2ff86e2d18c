#include "hgsim/csvio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hgsim/errors.hpp"

namespace hgsim {

const std::vector<std::string>& simlog_columns() {
    static const std::vector<std::string> cols = {
        "t",   "X",   "Y",   "psi", "beta",    "r",       "phi",    "delta",
        "T_d", "T_h", "T_a", "e_y", "e_theta", "s_foot",  "lateral_offset"};
    return cols;
}

std::string csv_num(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

void write_simlog_csv(const std::string& path, const SimLog& log) {
    std::ofstream out = open_out(path);
    const auto& cols = simlog_columns();
    for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const LogRecord& r : log.records) {
        const double vals[] = {r.t,   r.X,   r.Y,   r.psi,     r.beta,  r.r,
                               r.phi, r.delta, r.T_d, r.T_h,   r.T_a,   r.e_y,
                               r.e_theta, r.s_foot, r.lateral_offset};
        for (size_t i = 0; i < std::size(vals); ++i)
            out << (i ? "," : "") << csv_num(vals[i]);
        out << '\n';
    }
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

bool CsvTable::has(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

const std::vector<double>& CsvTable::col(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("missing column '" + name + "'");
    return columns[static_cast<size_t>(it - header.begin())];
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");

    CsvTable t;
    std::string line;
    size_t lineno = 0;

    auto split = [](const std::string& s, std::vector<std::string>& out) {
        out.clear();
        size_t start = 0;
        while (true) {
            size_t comma = s.find(',', start);
            if (comma == std::string::npos) {
                out.push_back(s.substr(start));
                break;
            }
            out.push_back(s.substr(start, comma - start));
            start = comma + 1;
        }
    };

    std::vector<std::string> cells;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split(line, cells);
        if (lineno == 1) {
            t.header = cells;
            t.columns.assign(cells.size(), {});
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.header.size()) + " cells, got " +
                              std::to_string(cells.size()));
        for (size_t i = 0; i < cells.size(); ++i) {
            const std::string& c = cells[i];
            if (c.empty()) {
                t.columns[i].push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double v = 0.0;
            auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc{} || p != c.data() + c.size())
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": bad numeric cell '" + c + "' in column '" +
                                  t.header[i] + "'");
            t.columns[i].push_back(v);
        }
    }
    if (t.header.empty()) throw ConfigError(path + ": empty CSV");
    return t;
}

SimLog simlog_from_table(const CsvTable& table) {
    SimLog log;
    const std::vector<double>*const c[15] = {
        &table.col("t"),   &table.col("X"),   &table.col("Y"),
        &table.col("psi"), &table.col("beta"), &table.col("r"),
        &table.col("phi"), &table.col("delta"), &table.col("T_d"),
        &table.col("T_h"), &table.col("T_a"), &table.col("e_y"),
        &table.col("e_theta"), &table.col("s_foot"), &table.col("lateral_offset")};

    const size_t n = table.rows();
    log.records.resize(n);
    for (size_t i = 0; i < n; ++i) {
        LogRecord& r = log.records[i];
        r.t = (*c[0])[i];
        r.X = (*c[1])[i];
        r.Y = (*c[2])[i];
        r.psi = (*c[3])[i];
        r.beta = (*c[4])[i];
        r.r = (*c[5])[i];
        r.phi = (*c[6])[i];
        r.delta = (*c[7])[i];
        r.T_d = (*c[8])[i];
        r.T_h = (*c[9])[i];
        r.T_a = (*c[10])[i];
        r.e_y = (*c[11])[i];
        r.e_theta = (*c[12])[i];
        r.s_foot = (*c[13])[i];
        r.lateral_offset = (*c[14])[i];
    }
    if (n >= 2) {
        const double dt = log.records[1].t - log.records[0].t;
        if (dt > 0.0) log.log_rate = 1.0 / dt;
    }
    return log;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_num(row[i]);
        out << '\n';
    }
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace hgsim
