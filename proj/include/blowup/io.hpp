#pragma once

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace blowup {

/// %.17g, which round-trips every finite double. Non-finite values print as nan, inf, -inf.
std::string format_double(double v);

/// A CSV table of text cells. Numeric columns are written with `format_double`.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    /// Column by header name, parsed as doubles. Throws ConstraintError on a missing column or bad cell.
    std::vector<double> column(const std::string& name) const;
};

/// Header row, comma separators, LF after every row. Cells must not contain commas or newlines.
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// JSON text with every floating-point number written by `format_double` and object keys sorted.
/// Non-finite numbers become null.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// key=value per line; blank lines and lines starting with '#' are skipped; surrounding spaces
/// are trimmed. A line without '=' or a repeated key is a ConstraintError.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> read_config_file(const std::string& path);

} // namespace blowup
