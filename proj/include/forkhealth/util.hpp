#pragma once

#include <string>

namespace forkhealth {

std::string sha256_hex(const std::string& data);

// Writes content to path via a sibling temp file and an atomic rename.
void atomic_write_file(const std::string& path, const std::string& content);

// Appends one line; creates the file if needed.
void append_line(const std::string& path, const std::string& line);

// "2020-03-06T00:00:00Z" -> unix seconds. Throws ParseError on anything that
// is not a Z-suffixed ISO-8601 instant.
std::int64_t parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(std::int64_t unix_seconds);

} // namespace forkhealth
