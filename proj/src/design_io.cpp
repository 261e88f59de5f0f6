#include "msd/design_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "msd/errors.hpp"
#include "msd/gf2.hpp"

namespace msd {

namespace {

std::vector<std::string> split_cells(std::string line) {
  for (char& ch : line)
    if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
  std::istringstream ls(line);
  std::vector<std::string> cells;
  for (std::string c; ls >> c;) cells.push_back(c);
  return cells;
}

bool parse_level(const std::string& s, int& level) {
  if (s == "1" || s == "+1" || s == "+") {
    level = 1;
  } else if (s == "-1" || s == "-") {
    level = -1;
  } else if (s == "0") {
    level = 0;  // resolved once the coding of the whole file is known
  } else {
    return false;
  }
  return true;
}

}  // namespace

DesignTable read_design(std::istream& in) {
  std::vector<std::string> names;
  std::vector<std::vector<int>> rows;
  std::vector<std::vector<std::string>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto cells = split_cells(line);
    if (cells.empty()) continue;
    std::vector<int> levels;
    bool numeric = true;
    for (const auto& c : cells) {
      int v = 0;
      if (!parse_level(c, v)) {
        numeric = false;
        break;
      }
      levels.push_back(v);
    }
    if (!numeric) {
      if (!names.empty() || !rows.empty())
        throw FormatError("design line " + std::to_string(line_no) + " contains a non-level entry");
      names = cells;
      continue;
    }
    if (!rows.empty() && levels.size() != rows.front().size())
      throw FormatError("design line " + std::to_string(line_no) + " has the wrong number of entries");
    rows.push_back(std::move(levels));
    raw.push_back(std::move(cells));
  }
  if (rows.empty()) throw FormatError("design file has no runs");
  const std::size_t n = rows.front().size();
  if (names.empty()) names = default_letters(n);
  if (names.size() != n) throw FormatError("design header and body disagree on the number of factors");

  bool has_minus = false, has_zero = false;
  for (const auto& r : raw)
    for (const auto& c : r) {
      if (c[0] == '-') has_minus = true;
      if (c == "0") has_zero = true;
    }
  if (has_minus && has_zero) throw FormatError("design mixes ±1 and 0/1 codings");

  DesignTable d(names, rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < n; ++c) {
      int v = rows[r][c];
      if (has_zero) v = (v == 0) ? 1 : -1;  // 0/1 coding: level ℓ ↦ (−1)^ℓ
      d.at(r, c) = v;
    }
  return d;
}

DesignTable load_design(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open design file " + path);
  return read_design(in);
}

void write_design(std::ostream& out, const DesignTable& d, LevelCoding coding) {
  for (std::size_t c = 0; c < d.cols(); ++c) out << (c ? "," : "") << d.names[c];
  out << '\n';
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) {
      const int v = d.at(r, c);
      out << (c ? "," : "");
      if (coding == LevelCoding::ZeroOne)
        out << (v == 1 ? 0 : 1);
      else
        out << v;
    }
    out << '\n';
  }
}

void save_design(const std::string& path, const DesignTable& d, LevelCoding coding) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write design file " + path);
  write_design(out, d, coding);
}

}  // namespace msd
