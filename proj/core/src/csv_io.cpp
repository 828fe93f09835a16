#include "smalljump/csv_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "smalljump/error.hpp"

namespace smalljump {

std::string format_double(double v)
{
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void CsvWriter::metadata(const std::string& key, const std::string& value)
{
  out_ << "# " << key << '=' << value << '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns)
{
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values)
{
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
}

std::size_t CsvTable::column(const std::string& name) const
{
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name)
      return i;
  throw ValidationError("CSV column not found: " + name);
}

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& path, std::size_t line)
{
  double v = 0.0;
  const std::string t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ValidationError(path + ":" + std::to_string(line) + ": not a number: '" + t + "'");
  return v;
}

} // namespace

CsvTable read_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open " + path);
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty())
      continue;
    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos)
        table.metadata[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ','))
      fields.push_back(trim(field));
    if (table.columns.empty()) {
      table.columns = fields;
      continue;
    }
    if (fields.size() != table.columns.size())
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(table.columns.size()) + " fields");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields)
      row.push_back(parse_double(f, path, lineno));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::ofstream open_output(const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot open " + path + " for writing");
  return out;
}

} // namespace smalljump
