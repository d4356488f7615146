#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace psc::util {

/// RFC 4180 field quoting: fields with commas, quotes or line breaks are quoted.
std::string csv_escape(std::string_view field);

std::string csv_row(const std::vector<std::string>& fields);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index for `name`; throws SchemaError when absent.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

/// Parses CSV text with a header row. Throws SchemaError (with line number)
/// on rows whose width differs from the header.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Parses a double, throwing SchemaError with `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace psc::util
