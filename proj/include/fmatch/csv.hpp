#ifndef FMATCH_CSV_HPP
#define FMATCH_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace fmatch::csv {

/// Splits one line on commas. No quoting: fields must not contain commas or
/// newlines (the dataset interchange format is documented as plain-field CSV).
std::vector<std::string> split(std::string_view line);

std::string join(const std::vector<std::string>& fields);

/// Shortest decimal representation that round-trips to the same double, so
/// parse(serialize(x)) is exact and reruns are byte-identical.
std::string format_double(double value);

/// Strict parses; return false on any trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, int& out);

}  // namespace fmatch::csv

#endif  // FMATCH_CSV_HPP
