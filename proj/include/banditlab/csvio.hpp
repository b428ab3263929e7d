#pragma once

#include <optional>
#include <string>
#include <vector>

namespace banditlab {

// Shortest decimal string that round-trips to the same double (to_chars).
// Never produces locale-dependent output.
std::string format_double(double value);

// Strict double parse of a full field; throws on trailing junk or empty.
double parse_double(const std::string& field);

// Fields of one CSV line. Our schemas never quote or embed commas, so this
// is a plain split (empty fields preserved).
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by header name; throws if absent.
  std::size_t column(const std::string& name) const;
};

// Loads a whole CSV file; throws on I/O failure, naming the path.
CsvTable read_csv(const std::string& path);

// Writes text to path atomically enough for our purposes (single stream,
// checked close); throws on failure, naming the path.
void write_text_file(const std::string& path, const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace banditlab
