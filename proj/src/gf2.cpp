#include "msd/gf2.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "msd/errors.hpp"

namespace msd {

namespace {
constexpr std::size_t kWordBits = 64;
std::size_t words_for(std::size_t n) { return (n + kWordBits - 1) / kWordBits; }
}  // namespace

BitVector::BitVector(std::size_t size) : size_(size), words_(words_for(size), 0) {}

BitVector BitVector::from_string(std::string_view bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      v.set(i);
    else if (bits[i] != '0')
      throw FormatError("bit string may contain only 0 and 1: " + std::string(bits));
  }
  return v;
}

BitVector BitVector::from_u64(std::size_t size, std::uint64_t value) {
  BitVector v(size);
  for (std::size_t i = 0; i < size && i < kWordBits; ++i)
    if ((value >> i) & 1U) v.set(i);
  return v;
}

BitVector BitVector::from_positions(std::size_t size, std::initializer_list<std::size_t> ones) {
  BitVector v(size);
  for (auto i : ones) v.set(i);
  return v;
}

bool BitVector::get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }

void BitVector::set(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (value)
    words_[i / kWordBits] |= mask;
  else
    words_[i / kWordBits] &= ~mask;
}

void BitVector::flip(std::size_t i) { words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits); }

bool BitVector::any() const {
  return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
}

std::size_t BitVector::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool BitVector::dot(const BitVector& other) const {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
  return std::popcount(acc) & 1;
}

std::uint64_t BitVector::to_u64() const { return words_.empty() ? 0 : words_[0]; }

std::string BitVector::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.size_ != size_) throw DimensionMismatch("bit vectors of different length");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

BitVector& BitVector::operator&=(const BitVector& other) {
  if (other.size_ != size_) throw DimensionMismatch("bit vectors of different length");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

std::strong_ordering operator<=>(const BitVector& a, const BitVector& b) {
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  // Positional lexicographic order with 0 < 1.
  for (std::size_t i = 0; i < a.size_; ++i)
    if (a.get(i) != b.get(i)) return a.get(i) ? std::strong_ordering::greater : std::strong_ordering::less;
  return std::strong_ordering::equal;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

BitMatrix::BitMatrix(std::vector<BitVector> rows, std::vector<std::string> row_labels,
                     std::vector<std::string> col_labels)
    : rows_(std::move(rows)) {
  cols_ = rows_.empty() ? 0 : rows_.front().size();
  for (const auto& r : rows_)
    if (r.size() != cols_) throw DimensionMismatch("ragged bit matrix");
  set_labels(std::move(row_labels), std::move(col_labels));
}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i);
  return m;
}

BitMatrix BitMatrix::from_strings(std::initializer_list<std::string_view> rows) {
  std::vector<BitVector> v;
  for (auto r : rows) v.push_back(BitVector::from_string(r));
  return BitMatrix(std::move(v));
}

BitVector BitMatrix::column(std::size_t c) const {
  BitVector v(rows());
  for (std::size_t r = 0; r < rows(); ++r) v.set(r, get(r, c));
  return v;
}

void BitMatrix::set_labels(std::vector<std::string> row_labels, std::vector<std::string> col_labels) {
  auto check = [](const std::vector<std::string>& labels, std::size_t n, const char* axis) {
    if (labels.empty()) return;
    if (labels.size() != n) throw DimensionMismatch(std::string("wrong number of ") + axis + " labels");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) throw FormatError(std::string("duplicate ") + axis + " label");
  };
  check(row_labels, rows(), "row");
  check(col_labels, cols_, "column");
  row_labels_ = std::move(row_labels);
  col_labels_ = std::move(col_labels);
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (get(r, c)) t.set(c, r);
  t.row_labels_ = col_labels_;
  t.col_labels_ = row_labels_;
  return t;
}

bool BitMatrix::is_identity() const {
  if (rows() != cols_) return false;
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (get(r, c) != (r == c)) return false;
  return true;
}

std::string BitMatrix::render() const {
  std::size_t width = 1;
  for (const auto& l : col_labels_) width = std::max(width, l.size());
  std::size_t lead = 0;
  for (const auto& l : row_labels_) lead = std::max(lead, l.size());
  auto pad = [](const std::string& s, std::size_t w) { return std::string(w - std::min(w, s.size()), ' ') + s; };

  std::string out;
  if (!col_labels_.empty()) {
    out += std::string(lead ? lead + 1 : 0, ' ');
    for (std::size_t c = 0; c < cols_; ++c) out += (c ? " " : "") + pad(col_labels_[c], width);
    out += '\n';
  }
  for (std::size_t r = 0; r < rows(); ++r) {
    if (lead) out += pad(row_labels_.empty() ? "" : row_labels_[r], lead) + " ";
    for (std::size_t c = 0; c < cols_; ++c) out += (c ? " " : "") + pad(get(r, c) ? "1" : "0", width);
    out += '\n';
  }
  return out;
}

BitMatrix operator*(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("incompatible shapes for GF(2) product");
  BitMatrix p(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k)
      if (a.get(r, k)) p.row(r) ^= b.row(k);
  if (!a.row_labels().empty() && !b.col_labels().empty()) p.set_labels(a.row_labels(), b.col_labels());
  return p;
}

std::size_t rank(const BitMatrix& m) {
  std::vector<BitVector> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  std::size_t rk = 0;
  for (std::size_t c = 0; c < m.cols() && rk < rows.size(); ++c) {
    std::size_t pivot = rk;
    while (pivot < rows.size() && !rows[pivot].get(c)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rk]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rk && rows[r].get(c)) rows[r] ^= rows[rk];
    ++rk;
  }
  return rk;
}

BitMatrix invert(const BitMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw SingularMatrix("matrix is not square");
  std::vector<BitVector> a, inv;
  for (std::size_t r = 0; r < n; ++r) {
    a.push_back(m.row(r));
    BitVector e(n);
    e.set(r);
    inv.push_back(e);
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && !a[pivot].get(c)) ++pivot;
    if (pivot == n) throw SingularMatrix("matrix is singular over GF(2)");
    std::swap(a[pivot], a[c]);
    std::swap(inv[pivot], inv[c]);
    for (std::size_t r = 0; r < n; ++r)
      if (r != c && a[r].get(c)) {
        a[r] ^= a[c];
        inv[r] ^= inv[c];
      }
  }
  BitMatrix out(std::move(inv));
  if (!m.row_labels().empty() && !m.col_labels().empty()) out.set_labels(m.col_labels(), m.row_labels());
  return out;
}

std::vector<BitVector> span_enumerate(std::span<const BitVector> generators) {
  std::vector<BitVector> out;
  if (generators.empty()) return out;
  const std::size_t len = generators.front().size();
  for (const auto& g : generators)
    if (g.size() != len) throw DimensionMismatch("generators of different length");
  if (generators.size() >= 63) throw DimensionMismatch("too many generators to enumerate");

  std::set<BitVector> seen;
  BitVector acc(len);
  // Gray-code walk: one XOR per combination.
  const std::uint64_t total = std::uint64_t{1} << generators.size();
  for (std::uint64_t i = 1; i < total; ++i) {
    acc ^= generators[static_cast<std::size_t>(std::countr_zero(i))];
    if (acc.any() && seen.insert(acc).second) out.push_back(acc);
  }
  return out;
}

std::vector<std::string> default_letters(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(i < 26 ? std::string(1, static_cast<char>('A' + i)) : "F" + std::to_string(i + 1));
  return out;
}

std::string word_string(const BitVector& word, std::span<const std::string> letters) {
  std::string s;
  for (std::size_t i = 0; i < word.size(); ++i)
    if (word.get(i)) s += letters[i];
  return s.empty() ? "I" : s;
}

}  // namespace msd
