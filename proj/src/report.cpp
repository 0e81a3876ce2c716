#include "cklab/report.hpp"

#include "cklab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cklab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const { return quote(s); }
    };
    return std::visit(Visitor{}, c);
}

void ensure_parent(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::logic_error("CsvTable: row width differs from the header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + quote(header_[i]);
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + render(row[i]);
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path.string() + "' for writing");
    f << str();
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path.string() + "' for writing");
    f << doc.dump(2) << '\n';
}

void write_columns(const std::filesystem::path& path, const std::vector<std::pair<double, double>>& rows,
                   const std::string& comment) {
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path.string() + "' for writing");
    f << "# " << comment << '\n';
    for (const auto& [a, b] : rows) f << format_double(a) << ' ' << format_double(b) << '\n';
}

std::string library_version() { return "0.1.0"; }

}  // namespace cklab
