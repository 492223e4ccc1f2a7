#include "prestrain/io.hpp"

#include <cstdio>
#include <fstream>

#include "prestrain/core.hpp"

namespace prestrain {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::size_t ncols;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     std::uint64_t cfg_hash)
    : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) throw ConfigError("cannot open output file '" + path + "'");
  impl_->out << "# prestrain " << kVersion << " config=" << std::hex << cfg_hash
             << std::dec << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c)
    impl_->out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  impl_->ncols = columns.size();
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t c = 0; c < values.size(); ++c)
    impl_->out << format_double(values[c]) << (c + 1 < values.size() ? "," : "\n");
}

void CsvWriter::raw_row(const std::string& line) { impl_->out << line << "\n"; }

void write_field_csv(const std::string& path, const ParamGrid& grid,
                     const std::vector<std::pair<std::string, const ScalarField*>>& fields,
                     std::uint64_t cfg_hash) {
  std::vector<std::string> cols = {"i", "j", "x1", "x2"};
  for (const auto& [name, f] : fields) cols.push_back(name);
  CsvWriter w(path, cols, cfg_hash);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      std::vector<double> row = {static_cast<double>(i), static_cast<double>(j),
                                 grid.x1(i), grid.x2(j)};
      for (const auto& [name, f] : fields) row.push_back((*f)(i, j));
      w.row(row);
    }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << content;
}

}  // namespace prestrain
