#pragma once

#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace smalljump {

/// Shortest representation that reads back to the same double.
std::string format_double(double v);

/// Writes '#'-prefixed metadata lines, a header row and rows of doubles.
/// Output is byte-identical for identical inputs.
class CsvWriter
{
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void metadata(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);

private:
  std::ostream& out_;
};

/// Parsed CSV: metadata key/value pairs, header and numeric rows.
struct CsvTable
{
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of `name` in columns. Throws ValidationError when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

/// Opens `path` for writing; throws ValidationError on failure.
std::ofstream open_output(const std::string& path);

} // namespace smalljump
