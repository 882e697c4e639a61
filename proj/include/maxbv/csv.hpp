#pragma once

#include <charconv>
#include <concepts>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace maxbv {

/// RFC-4180 field quoting: fields containing separators, quotes or line
/// breaks are wrapped in double quotes with embedded quotes doubled.
inline std::string csv_quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// Shortest round-trip representation, so identical doubles give identical bytes.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

/// Splits one CSV record (no embedded line breaks).
std::vector<std::string> csv_split(std::string_view line);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    template <class... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(fields), first = false), ...);
        os_ << "\r\n";
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << csv_quote(fields[i]);
        os_ << "\r\n";
    }

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(std::string_view v) { return csv_quote(v); }
    static std::string cell(const std::string& v) { return csv_quote(v); }
    static std::string cell(const char* v) { return csv_quote(v); }
    template <std::integral I>
    static std::string cell(I v) { return std::to_string(v); }

private:
    std::ostream& os_;
};

}  // namespace maxbv
