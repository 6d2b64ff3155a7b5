#pragma once

// RFC-4180 CSV with LF line endings. Reals are written with %.17g so that
// files round-trip exactly and are byte-identical across identical runs.

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace chanstab {

using CsvField = std::variant<std::string, double, long long>;

std::string format_real(double v);
std::string csv_escape(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<CsvField>& fields);
  void close();

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::runtime_error if absent.
  std::size_t column(const std::string& name) const;
};

/// Reads a file written by CsvWriter (quoted fields allowed).
CsvTable read_csv(const std::string& path);

}  // namespace chanstab
