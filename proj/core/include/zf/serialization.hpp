#pragma once

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace zf {

/// Decimal text with 10 significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double value);

/// Quotes a field when it contains a comma, quote, CR or LF (RFC 4180).
std::string csv_escape(const std::string& field);

using CsvField = std::variant<std::string, double, int, bool>;

/// RFC 4180 writer: CRLF line endings, header row written on construction.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);
  void row(const std::vector<CsvField>& fields);
  std::size_t columns() const { return header_.size(); }

 private:
  std::ostream& os_;
  std::vector<std::string> header_;
};

/// Parses one RFC 4180 document into rows of fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace zf
