#pragma once

// Minimal RFC-4180 CSV reader/writer: quoted fields, embedded commas and
// newlines, doubled quotes, optional CRLF line endings.

#include <string>
#include <vector>

namespace confsched::csv {

using Row = std::vector<std::string>;

// Parses a whole CSV document. A trailing newline does not produce an
// empty record. Throws confsched::Error on an unterminated quoted field.
std::vector<Row> parse(const std::string& text);

std::vector<Row> read_file(const std::string& path);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape_field(const std::string& field);

std::string format_row(const Row& row);

}  // namespace confsched::csv
