#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace h2o::text {

// Shortest decimal that round-trips to the same double.
std::string fmt(double value);
std::string fmt(const std::vector<double>& values, char sep = ',');

double parse_double(std::string_view token);
long long parse_int(std::string_view token);
std::vector<double> parse_doubles(std::string_view token, char sep = ',');

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
// Splits on runs of spaces/tabs.
std::vector<std::string_view> tokens(std::string_view s);

} // namespace h2o::text
