// output.hpp - deterministic table writers (CSV and JSON) for runner results

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace adlab {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
};

// %.<digits>g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double v, int digits);

void write_csv(const std::filesystem::path& file, const Table& table, int digits);

// {"columns": [...], "rows": [[...], ...]}, values rounded to `digits`, non-finite as null.
nlohmann::json table_to_json(const Table& table, int digits);
void write_json(const std::filesystem::path& file, const nlohmann::json& doc);

}  // namespace adlab
