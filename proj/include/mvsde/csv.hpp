#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "mvsde/errors.hpp"

namespace mvsde::csv {

/// 17 significant digits: enough to round-trip any double.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_cell(double v) { return format_real(v); }
inline std::string format_cell(const std::string& v) { return v; }
inline std::string format_cell(const char* v) { return v; }
inline std::string format_cell(std::string_view v) { return std::string(v); }
inline std::string format_cell(bool v) { return v ? "1" : "0"; }
template <class Int>
  requires std::is_integral_v<Int>
std::string format_cell(Int v) {
  return std::to_string(v);
}

/// Comma-separated file with a fixed header row.
class Writer {
 public:
  Writer(const std::filesystem::path& path, std::vector<std::string> header)
      : path_(path), columns_(header.size()), out_(path) {
    if (!out_) {
      throw IoError("cannot open " + path.string() + " for writing");
    }
    write_line(header);
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    if (sizeof...(Cells) != columns_) {
      throw IoError("row width does not match the header of " + path_.string());
    }
    write_line({format_cell(cells)...});
  }

  void close() {
    out_.close();
    if (!out_) {
      throw IoError("failed writing " + path_.string());
    }
  }

 private:
  void write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) {
        out_ << ',';
      }
      out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) {
      throw IoError("failed writing " + path_.string());
    }
  }

  std::filesystem::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        return i;
      }
    }
    throw IoError("no column named " + name);
  }

  double number(std::size_t row, const std::string& name) const {
    return std::strtod(rows.at(row).at(column(name)).c_str(), nullptr);
  }
};

inline Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    return cells;
  };
  Table table;
  std::string line;
  if (std::getline(in, line)) {
    table.header = split(line);
  }
  while (std::getline(in, line)) {
    if (!line.empty()) {
      table.rows.push_back(split(line));
    }
  }
  return table;
}

}  // namespace mvsde::csv
