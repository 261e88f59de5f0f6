#include <doctest.h>

#include <random>

#include "msd/errors.hpp"
#include "msd/gf2.hpp"

using namespace msd;

TEST_CASE("bit vector basics") {
  auto v = BitVector::from_string("10110");
  CHECK(v.size() == 5);
  CHECK(v.count() == 3);
  CHECK(v.get(0));
  CHECK_FALSE(v.get(1));
  CHECK(v.to_string() == "10110");
  CHECK(v.to_u64() == 0b01101);
  CHECK((v ^ v).none());
  CHECK(v.dot(BitVector::from_string("10000")));
  CHECK_FALSE(v.dot(BitVector::from_string("10100")));
  CHECK_THROWS_AS(BitVector::from_string("102"), FormatError);
  CHECK_THROWS_AS(v ^= BitVector(4), DimensionMismatch);

  // Spans a word boundary.
  BitVector w(130);
  w.set(0);
  w.set(64);
  w.set(129);
  CHECK(w.count() == 3);
  w.flip(64);
  CHECK(w.count() == 2);
}

TEST_CASE("rank and inverse") {
  CHECK(rank(BitMatrix::identity(7)) == 7);
  const auto a = BitMatrix::from_strings({"110", "011", "101"});
  CHECK(rank(a) == 2);
  CHECK_THROWS_AS(invert(a), SingularMatrix);
  CHECK_THROWS_AS(invert(BitMatrix(2, 3)), SingularMatrix);

  const auto k = BitMatrix::from_strings({"10000", "01000", "00100", "10010", "11001"});
  const auto ki = invert(k);
  CHECK((k * ki).is_identity());
  CHECK((ki * k).is_identity());
}

TEST_CASE("random invertible matrices round trip") {
  std::mt19937_64 rng(7);
  int invertible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 20;
    BitMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m.set(r, c, rng() & 1U);
    if (rank(m) < n) {
      CHECK_THROWS_AS(invert(m), SingularMatrix);
      continue;
    }
    ++invertible;
    CHECK((m * invert(m)).is_identity());
    CHECK(invert(invert(m)) == m);
    CHECK(rank(m.transpose()) == n);
  }
  CHECK(invertible > 20);
}

TEST_CASE("span enumeration") {
  const std::vector<BitVector> g{BitVector::from_string("1100"), BitVector::from_string("0110"),
                                 BitVector::from_string("1010")};
  // The third generator is dependent.
  const auto span = span_enumerate(g);
  CHECK(span.size() == 3);
  const std::vector<BitVector> indep{BitVector::from_string("1000"), BitVector::from_string("0100"),
                                     BitVector::from_string("0011")};
  CHECK(span_enumerate(indep).size() == 7);
}

TEST_CASE("letters and words") {
  const auto l = default_letters(28);
  CHECK(l[0] == "A");
  CHECK(l[25] == "Z");
  CHECK(l[26] == "F27");
  CHECK(word_string(BitVector::from_string("1101"), std::span(l).first(4)) == "ABD");
}
