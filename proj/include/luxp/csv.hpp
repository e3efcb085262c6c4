#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace luxp {

using CsvRow = std::vector<std::string>;

/// Reads a plain comma-separated file (no quoting) and checks that the first
/// line equals `header` exactly. Returns the data rows; each row must have as
/// many fields as the header.
std::vector<CsvRow> read_csv(const std::filesystem::path& path, const CsvRow& header);

/// Shortest decimal form that round-trips to the same double; "inf", "-inf"
/// and "nan" for non-finite values.
std::string format_number(double value);

/// Parses a decimal number; accepts "inf"/"-inf"/"nan". Throws ValidationError.
double parse_number(std::string_view text);

/// Joins fields with commas. Fields containing ',' or newlines are rejected.
std::string csv_line(const CsvRow& fields);

} // namespace luxp
