#include "chanstab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace chanstab {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()), path_(path) {
  if (!out_) throw std::runtime_error("cannot write '" + path + "'");
  std::vector<CsvField> fields(header.begin(), header.end());
  row(fields);
}

void CsvWriter::row(const std::vector<CsvField>& fields) {
  if (fields.size() != columns_) {
    throw std::logic_error("CSV row width mismatch in '" + path_ + "'");
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) {
            out_ << csv_escape(v);
          } else if constexpr (std::is_same_v<T, double>) {
            out_ << format_real(v);
          } else {
            out_ << v;
          }
        },
        fields[i]);
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("failed writing '" + path_ + "'");
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::runtime_error("missing CSV column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool pending = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      pending = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      pending = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      pending = false;
    } else {
      field += c;
      pending = true;
    }
  }
  if (pending) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw std::runtime_error("empty CSV '" + path + "'");

  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != table.header.size()) {
      throw std::runtime_error("ragged CSV row " + std::to_string(i + 1) + " in '" + path + "'");
    }
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

}  // namespace chanstab
