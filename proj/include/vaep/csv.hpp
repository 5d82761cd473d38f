#pragma once

// Minimal CSV helpers shared by every reader/writer in the library.
// Fields never contain separators or quotes in the canonical schemas, so
// quoting is only honoured on input.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vaep::csv {

std::vector<std::string> split_line(std::string_view line);

/// Reads one logical line, stripping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

/// Throws SchemaError when `header` does not equal `expected` exactly.
void expect_header(const std::vector<std::string>& header,
                   const std::vector<std::string>& expected,
                   std::string_view what);

double parse_double(std::string_view field, std::string_view column, std::size_t line_no);
long long parse_int(std::string_view field, std::string_view column, std::size_t line_no);
bool parse_bool(std::string_view field, std::string_view column, std::size_t line_no);
std::optional<double> parse_optional_double(std::string_view field, std::string_view column,
                                            std::size_t line_no);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

std::string join(const std::vector<std::string>& fields);

} // namespace vaep::csv
