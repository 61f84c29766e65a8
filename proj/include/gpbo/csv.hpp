#pragma once

#include <string>
#include <vector>

namespace gpbo::csv {

using Row = std::vector<std::string>;

/// Quotes fields containing separators, quotes or line breaks; LF endings.
std::string format_row(const Row& fields);
/// RFC 4180 style parser. Throws ValidationError on an unterminated quote.
std::vector<Row> parse(const std::string& text);

/// Shortest round-trippable decimal form; "inf", "-inf", "nan" for non-finite.
std::string format_double(double v);
/// Inverse of format_double; throws ValidationError on malformed input.
double parse_double(const std::string& s);

}  // namespace gpbo::csv
