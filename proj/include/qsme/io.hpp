#pragma once

// Locale-independent numeric formatting for CSV/JSON emission: shortest
// round-trip-exact decimal with 17 significant digits, '.' separator.

#include <string>

namespace qsme {

std::string format_double(double v);

// Writes content to path, throwing config_error on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

} // namespace qsme
