#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sicyig::report {

using Cell = std::variant<double, long long, std::string, bool>;

/// Column-named rows for CSV output. Column names carry unit suffixes.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  nlohmann::json to_json() const;  // array of objects
};

/// 12 significant digits, '.' decimal point, no locale influence.
std::string format_number(double v);

/// Rounds to 12 significant digits; non-finite values become null in JSON.
double round12(double v);

/// Deep copy of j with every floating-point number rounded to 12 digits.
nlohmann::json rounded(const nlohmann::json& j);

void write_csv(std::ostream& out, const Table& t);
std::string to_csv(const Table& t);

/// Sorted keys, two-space indent, trailing newline.
std::string to_json_text(const nlohmann::json& j);

/// Writes text to path; throws IoError when the file cannot be written.
void write_file(const std::string& path, const std::string& text);

}  // namespace sicyig::report
