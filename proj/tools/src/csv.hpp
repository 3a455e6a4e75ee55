#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace censbo::cli {

struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Comma-separated numeric table with a mandatory header row. Cells may be
/// numbers, "true" or "false". Throws IoError naming `source` and the line.
NumericTable parse_numeric_csv(std::string_view text, std::string_view source);

}  // namespace censbo::cli
