#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msd {

// N × n table of ±1 levels (0 marks an empty unit in partial designs).
struct DesignTable {
  std::vector<std::string> names;
  std::size_t rows = 0;
  std::vector<int> cells;

  DesignTable() = default;
  DesignTable(std::vector<std::string> factor_names, std::size_t n_rows)
      : names(std::move(factor_names)), rows(n_rows), cells(rows * names.size(), 1) {}

  std::size_t cols() const { return names.size(); }
  int at(std::size_t r, std::size_t c) const { return cells[r * cols() + c]; }
  int& at(std::size_t r, std::size_t c) { return cells[r * cols() + c]; }
};

enum class LevelCoding { PlusMinus, ZeroOne };

// Accepts comma, semicolon, tab or blank separated cells; a header row of names is
// optional. Cells may be ±1 or 0/1 (0 → +1, 1 → −1); "+"/"-" are also accepted.
DesignTable read_design(std::istream& in);
DesignTable load_design(const std::string& path);
void write_design(std::ostream& out, const DesignTable& d, LevelCoding coding = LevelCoding::PlusMinus);
void save_design(const std::string& path, const DesignTable& d, LevelCoding coding = LevelCoding::PlusMinus);

}  // namespace msd
