#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cklab {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

/// "%.17g" for finite values; nan, inf, -inf otherwise.
[[nodiscard]] std::string format_double(double v);

/// Table with a fixed header; rows must match the header width. The last row
/// written is the summary row by convention.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<Cell> row);
    [[nodiscard]] std::string str() const;
    void write(const std::filesystem::path& path) const;
    [[nodiscard]] std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

using Json = nlohmann::ordered_json;

/// Pretty-printed, key order preserved, trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);

/// Two whitespace-separated columns, one pair per line.
void write_columns(const std::filesystem::path& path, const std::vector<std::pair<double, double>>& rows,
                   const std::string& comment);

[[nodiscard]] std::string library_version();

}  // namespace cklab
