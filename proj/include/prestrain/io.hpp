#pragma once

#include <map>
#include <string>
#include <vector>

#include "prestrain/grid.hpp"

namespace prestrain {

/// CSV writer with a provenance comment line. Column values print with 17
/// significant digits so identical runs produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            std::uint64_t cfg_hash);
  ~CsvWriter();
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

/// Writes per-node fields as CSV with columns (i, j, x1, x2, <names...>).
void write_field_csv(const std::string& path, const ParamGrid& grid,
                     const std::vector<std::pair<std::string, const ScalarField*>>& fields,
                     std::uint64_t cfg_hash);

void write_text_file(const std::string& path, const std::string& content);

std::string format_double(double v);

}  // namespace prestrain
