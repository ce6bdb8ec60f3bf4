#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sicyig/config.hpp"
#include "sicyig/report.hpp"

namespace sicyig::reproduce {

struct Row {
  std::string id;
  std::string group;
  std::string claim;
  double reference = 0.0;  // NaN when the row is a property check
  double computed = 0.0;
  std::string tolerance;
  bool pass = false;
  std::string note;
};

struct Options {
  std::vector<std::string> rows;  // ids or group names; empty selects all
  std::uint64_t seed = 0;
};

struct Result {
  std::vector<Row> rows;
  bool all_pass() const;
  report::Table table() const;
};

/// Every known row id, in report order.
std::vector<std::string> row_ids();

Result run(const config::SensorConfig& cfg, const Options& opt = {});

}  // namespace sicyig::reproduce
