#pragma once

#include <istream>
#include <string>
#include <vector>

namespace forkhealth::csv {

// Minimal RFC-4180 style CSV. Fields containing comma, quote or newline are
// double-quoted on write; quoted fields may span lines on read.

std::string escape_field(const std::string& field);
std::string join_row(const std::vector<std::string>& fields);

// Reads one record (may span multiple physical lines inside quotes).
// Returns false on end of stream with no data. Throws ParseError on a
// dangling quote at EOF.
bool read_record(std::istream& in, std::vector<std::string>& out);

// Whole-document helpers.
std::vector<std::vector<std::string>> parse(std::istream& in);

} // namespace forkhealth::csv
