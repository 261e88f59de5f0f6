#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace msd {

// Fixed-length vector over GF(2), packed into 64-bit words.
class BitVector {
public:
  BitVector() = default;
  explicit BitVector(std::size_t size);

  // "10110": position 0 is the leftmost character.
  static BitVector from_string(std::string_view bits);
  static BitVector from_u64(std::size_t size, std::uint64_t value);
  static BitVector from_positions(std::size_t size, std::initializer_list<std::size_t> ones);

  std::size_t size() const { return size_; }
  bool get(std::size_t i) const;
  void set(std::size_t i, bool value = true);
  void flip(std::size_t i);

  bool any() const;
  bool none() const { return !any(); }
  std::size_t count() const;
  bool dot(const BitVector& other) const;
  std::uint64_t to_u64() const;
  std::string to_string() const;

  BitVector& operator^=(const BitVector& other);
  BitVector& operator&=(const BitVector& other);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }

  friend bool operator==(const BitVector&, const BitVector&) = default;
  friend std::strong_ordering operator<=>(const BitVector& a, const BitVector& b);

private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

class BitMatrix {
public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);
  explicit BitMatrix(std::vector<BitVector> rows, std::vector<std::string> row_labels = {},
                     std::vector<std::string> col_labels = {});

  static BitMatrix identity(std::size_t n);
  static BitMatrix from_strings(std::initializer_list<std::string_view> rows);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v = true) { rows_[r].set(c, v); }
  const BitVector& row(std::size_t r) const { return rows_[r]; }
  BitVector& row(std::size_t r) { return rows_[r]; }
  BitVector column(std::size_t c) const;

  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }
  void set_labels(std::vector<std::string> row_labels, std::vector<std::string> col_labels);

  BitMatrix transpose() const;
  bool is_identity() const;
  std::string render() const;

  friend BitMatrix operator*(const BitMatrix& a, const BitMatrix& b);
  // Bits only; labels are presentation.
  friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
    return a.cols_ == b.cols_ && a.rows_ == b.rows_;
  }

private:
  std::size_t cols_ = 0;
  std::vector<BitVector> rows_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
};

std::size_t rank(const BitMatrix& m);
BitMatrix invert(const BitMatrix& m);
std::vector<BitVector> span_enumerate(std::span<const BitVector> generators);

// Letters A, B, ... for the first 26 factors, then F27, F28, ...
std::vector<std::string> default_letters(std::size_t n);
std::string word_string(const BitVector& word, std::span<const std::string> letters);

}  // namespace msd
