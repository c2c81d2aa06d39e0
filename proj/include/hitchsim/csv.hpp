#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hitchsim {

// Minimal CSV reading: comma-split rows, '#' comments, errors carry file:line.
class CsvReader {
public:
  explicit CsvReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw std::runtime_error("cannot open " + path);
  }

  // Returns false at EOF; skips blank and comment lines.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      fields.clear();
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) fields.push_back(cell);
      if (!line.empty() && line.back() == ',') fields.push_back("");
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(path_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

  int line() const { return line_no_; }

  double num(const std::string& s) const {
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) fail("bad number '" + s + "'");
      return v;
    } catch (const std::invalid_argument&) {
      fail("bad number '" + s + "'");
    } catch (const std::out_of_range&) {
      fail("number out of range '" + s + "'");
    }
  }

  long long integer(const std::string& s) const {
    try {
      size_t pos = 0;
      long long v = std::stoll(s, &pos);
      if (pos != s.size()) fail("bad integer '" + s + "'");
      return v;
    } catch (const std::invalid_argument&) {
      fail("bad integer '" + s + "'");
    } catch (const std::out_of_range&) {
      fail("integer out of range '" + s + "'");
    }
  }

private:
  std::string path_;
  std::ifstream in_;
  int line_no_ = 0;
};

}  // namespace hitchsim
