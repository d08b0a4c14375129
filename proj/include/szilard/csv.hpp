// Copyright 2026 The szilard-tls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal CSV: '#' comment lines, one header row, '.' decimals, '\n' endings,
// shortest round-trip doubles.

#ifndef SZILARD_CSV_HPP_
#define SZILARD_CSV_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace szilard::csv {

/// Shortest decimal text that parses back to exactly `v`; "nan" for NaN.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void comment(const std::string& text) { out_ << "# " << text << '\n'; }

  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
    out_ << '\n';
  }

  Writer& cell(double v) { return raw(format_double(v)); }
  Writer& cell(long long v) { return raw(std::to_string(v)); }
  Writer& cell(unsigned long long v) { return raw(std::to_string(v)); }
  Writer& cell(int v) { return raw(std::to_string(v)); }
  Writer& cell(std::size_t v) { return raw(std::to_string(v)); }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

 private:
  Writer& raw(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }

  std::ostream& out_;
  bool first_ = true;
};

/// Numeric table read back by column name.
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<std::string> comments;

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return columns[i];
    throw std::invalid_argument("CSV has no column '" + name + "'");
  }

  bool has(const std::string& name) const {
    for (const auto& n : names)
      if (n == name) return true;
    return false;
  }
};

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline Table read(std::istream& in, const std::string& label = "CSV") {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line);
      continue;
    }
    const auto fields = split(line);
    if (t.names.empty()) {
      for (auto f : fields) t.names.emplace_back(f);
      t.columns.resize(t.names.size());
      continue;
    }
    if (fields.size() != t.names.size())
      throw std::invalid_argument(label + " line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.names.size()) + " fields");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        t.columns[i].push_back(parse_double(fields[i]));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(label + " line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (t.names.empty()) throw std::invalid_argument(label + ": no header row");
  return t;
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open CSV file '" + path + "'");
  return read(in, path);
}

}  // namespace szilard::csv

#endif  // SZILARD_CSV_HPP_
