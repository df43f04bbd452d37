#include "blowup/io.hpp"

#include "blowup/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace blowup {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add_row(const std::vector<double>& values)
{
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values)
        row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

std::vector<double> CsvTable::column(const std::string& name) const
{
    std::size_t idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            idx = i;
    if (idx == header.size())
        throw ConstraintError("CSV has no column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (idx >= row.size())
            throw ConstraintError("CSV row is shorter than the header");
        const std::string& cell = row[idx];
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != cell.size() || cell.empty())
            throw ConstraintError("CSV cell '" + cell + "' in column '" + name + "' is not a number");
        out.push_back(v);
    }
    return out;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of(",\n\r") != std::string::npos)
            throw ConstraintError("CSV cell contains a separator: '" + cells[i] + "'");
        if (i > 0)
            out << ',';
        out << cells[i];
    }
    out << '\n';
}

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void dump_value(std::ostream& out, const nlohmann::json& v, int indent, int depth)
{
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string pad_end = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    const char* sep = indent > 0 ? ": " : ":";

    switch (v.type()) {
    case nlohmann::json::value_t::object: {
        if (v.empty()) {
            out << "{}";
            return;
        }
        out << '{' << nl;
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first)
                out << ',' << nl;
            first = false;
            out << pad << nlohmann::json(it.key()).dump() << sep;
            dump_value(out, it.value(), indent, depth + 1);
        }
        out << nl << pad_end << '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (v.empty()) {
            out << "[]";
            return;
        }
        out << '[' << nl;
        bool first = true;
        for (const auto& e : v) {
            if (!first)
                out << ',' << nl;
            first = false;
            out << pad;
            dump_value(out, e, indent, depth + 1);
        }
        out << nl << pad_end << ']';
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double d = v.get<double>();
        out << (std::isfinite(d) ? format_double(d) : std::string("null"));
        return;
    }
    default:
        out << v.dump();
    }
}

} // namespace

void write_csv(std::ostream& out, const CsvTable& table)
{
    write_row(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw ConstraintError("CSV row width differs from the header");
        write_row(out, row);
    }
}

void write_csv_file(const std::string& path, const CsvTable& table)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConstraintError("cannot open '" + path + "' for writing");
    write_csv(f, table);
}

CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (!have_header) {
            t.header = split_row(line);
            have_header = true;
        } else {
            t.rows.push_back(split_row(line));
        }
    }
    if (!have_header)
        throw ConstraintError("CSV input is empty");
    return t;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ConstraintError("cannot open '" + path + "'");
    return read_csv(f);
}

std::string dump_json(const nlohmann::json& value, int indent)
{
    std::ostringstream out;
    dump_value(out, value, indent, 0);
    return out.str();
}

std::map<std::string, std::string> parse_config(std::istream& in)
{
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConstraintError("config line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw ConstraintError("config line " + std::to_string(lineno) + " has an empty key");
        if (!out.emplace(key, trim(t.substr(eq + 1))).second)
            throw ConstraintError("config key '" + key + "' is repeated");
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConstraintError("cannot open config file '" + path + "'");
    return parse_config(f);
}

} // namespace blowup
