#include "vaep/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <system_error>

#include "vaep/error.hpp"

namespace vaep::csv {

namespace {

[[noreturn]] void type_error(std::string_view field, std::string_view column, std::size_t line_no,
                             std::string_view expected) {
    throw SchemaError("line " + std::to_string(line_no) + ": column '" + std::string(column) +
                      "' expects " + std::string(expected) + ", got '" + std::string(field) + "'");
}

} // namespace

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

void expect_header(const std::vector<std::string>& header,
                   const std::vector<std::string>& expected, std::string_view what) {
    if (header != expected) {
        throw SchemaError(std::string(what) + ": header mismatch, expected '" + join(expected) +
                          "', got '" + join(header) + "'");
    }
}

double parse_double(std::string_view field, std::string_view column, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last) {
        type_error(field, column, line_no, "a number");
    }
    if (!std::isfinite(value)) {
        type_error(field, column, line_no, "a finite number");
    }
    return value;
}

long long parse_int(std::string_view field, std::string_view column, std::size_t line_no) {
    long long value = 0;
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), last, value);
    if (field.empty() || ec != std::errc() || ptr != last) {
        type_error(field, column, line_no, "an integer");
    }
    return value;
}

bool parse_bool(std::string_view field, std::string_view column, std::size_t line_no) {
    if (field == "1" || field == "true" || field == "True") {
        return true;
    }
    if (field == "0" || field == "false" || field == "False") {
        return false;
    }
    type_error(field, column, line_no, "a boolean (0/1)");
}

std::optional<double> parse_optional_double(std::string_view field, std::string_view column,
                                            std::size_t line_no) {
    if (field.empty()) {
        return std::nullopt;
    }
    return parse_double(field, column, line_no);
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string();
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out.push_back(',');
        }
        out += fields[i];
    }
    return out;
}

} // namespace vaep::csv
