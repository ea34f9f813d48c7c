#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace parley {

// RFC 4180 quoting: fields with commas, quotes or newlines are wrapped,
// inner quotes doubled.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Parses a whole stream, honouring quoted newlines. CRLF and LF both accepted.
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

// Deterministic number text (no locale, no platform drift).
std::string format_number(double v);
std::string format_fixed(double v, int decimals);

double parse_double(std::string_view text, long line = -1);
long long parse_int(std::string_view text, long line = -1);

}  // namespace parley
