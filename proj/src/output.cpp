// output.cpp - fixed-precision CSV and JSON table writers

#include "adlab/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace adlab {

void Table::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table: row width does not match the header");
    rows.push_back(std::move(row));
}

std::string format_number(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0) v = 0;  // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    return out;
}

}  // namespace

void write_csv(const std::filesystem::path& file, const Table& table, int digits) {
    auto out = open_for_write(file);
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c], digits);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

nlohmann::json table_to_json(const Table& table, int digits) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (double v : row) {
            if (std::isfinite(v)) r.push_back(std::strtod(format_number(v, digits).c_str(), nullptr));
            else r.push_back(nullptr);
        }
        rows.push_back(std::move(r));
    }
    return {{"columns", table.columns}, {"rows", std::move(rows)}};
}

void write_json(const std::filesystem::path& file, const nlohmann::json& doc) {
    auto out = open_for_write(file);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace adlab
