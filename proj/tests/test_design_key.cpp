#include <doctest.h>

#include <map>
#include <set>
#include <tuple>

#include "msd/design_key.hpp"
#include "msd/errors.hpp"

using namespace msd;

namespace {

GeneratorSet fill_of(const KeyTemplate& t, std::vector<std::uint32_t> searchable) {
  GeneratorSet gs;
  std::size_t next = 0;
  for (const auto& s : t.slots) gs.fill.push_back(s.fixed ? s.fixed_fill : searchable.at(next++));
  return gs;
}

int product(const DesignTable& d, std::size_t r, std::initializer_list<std::size_t> cols) {
  int p = 1;
  for (auto c : cols) p *= d.at(r, c);
  return p;
}

}  // namespace

TEST_CASE("blocked 2^5 template and the C, AD, ABE key") {
  const auto b = parse_structure("8/4");
  const auto t = template_for(b, 5);
  CHECK(t.l0 == 0);
  CHECK(t.searchable_slots() == 3);
  const auto mask = t.star_mask();
  CHECK(mask.rows() == 5);
  // Two free entries in each of the three block-generator rows.
  std::size_t stars = 0;
  for (std::size_t r = 0; r < mask.rows(); ++r) stars += mask.row(r).count();
  CHECK(stars == 6);

  // Pool rows (00), (10), (11).
  const auto gs = fill_of(t, {0b00, 0b01, 0b11});
  std::set<std::string> words;
  for (const auto& w : generator_words(t, gs)) {
    CHECK(t.stratum_names[static_cast<std::size_t>(w.stratum)] == "B");
    words.insert(word_string(w.word, t.letters));
  }
  CHECK(words == std::set<std::string>{"C", "AD", "ABE"});

  const auto ws = words_by_stratum(t, gs, b);
  // 2^3 - 1 block defining words, no treatment defining words, the rest in E.
  std::map<std::string, std::size_t> count;
  for (std::size_t i = 0; i < ws.by_stratum.size(); ++i) count[ws.strata[i]] = ws.by_stratum[i].size();
  CHECK(count["U"] == 0);
  CHECK(count["B"] == 7);
  CHECK(count["E"] == 24);

  // Block index = (C, AD, ABE) evaluated per run.
  const auto d = expand_design(t, gs, b);
  REQUIRE(d.rows == 32);
  const auto& blocks = b.factor(1);
  std::set<std::tuple<int, int, int>> seen;
  for (std::size_t u = 0; u < 32; ++u) {
    const auto key = std::make_tuple(product(d, u, {2}), product(d, u, {0, 3}), product(d, u, {0, 1, 4}));
    for (std::size_t v = 0; v < 32; ++v)
      if (blocks.class_at(u) == blocks.class_at(v))
        CHECK(key == std::make_tuple(product(d, v, {2}), product(d, v, {0, 3}), product(d, v, {0, 1, 4})));
    seen.insert(key);
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("complete two-stratum keys are involutions") {
  for (const auto& [s, n] : std::vector<std::pair<const char*, std::size_t>>{{"8/4", 5}, {"2/8", 4}, {"4/4", 4}, {"2/16", 5}}) {
    const auto b = parse_structure(s);
    const auto t = template_for(b, n, 0);
    const auto pools = make_pools(t, false);
    Rng rng(3);
    for (int rep = 0; rep < 10; ++rep) {
      const auto k = design_key(t, algorithm1_complete(t, pools, rng));
      CHECK(invert(k) == k);
    }
  }
}

TEST_CASE("fractional templates embed the identity") {
  const auto big = parse_structure("8/4");
  const auto t = template_for(big, 13);
  CHECK(t.l0 == 8);
  std::size_t treatment = 0;
  for (const auto& s : t.slots)
    if (s.kind == SlotKind::Treatment) {
      ++treatment;
      CHECK(s.stars.size() == 5);
    }
  CHECK(treatment == 8);

  const auto nested = parse_structure("2/2/4");
  const auto t2 = template_for(nested, 5);
  CHECK(t2.l0 == 1);
  for (const auto& s : t2.slots)
    if (s.kind == SlotKind::Treatment) CHECK(s.stars.size() == 4);
}

TEST_CASE("random keys are admissible and reproducible") {
  const auto b = parse_structure("8/4");
  const auto t = template_for(b, 13);
  const auto pools = make_pools(t, true);
  Rng a(42), c(42);
  for (int rep = 0; rep < 20; ++rep) {
    const auto gs = algorithm2_fractional(t, pools, a);
    CHECK(gs == algorithm2_fractional(t, pools, c));
    CHECK(key_admissible(t, gs, {}));
    CHECK(rank(design_key(t, gs)) == 5);
  }
}

TEST_CASE("the identity key on two factors is the full factorial") {
  const auto b = parse_structure("4");
  const auto t = template_for(b, 2);
  const auto d = expand_design(t, fill_of(t, {}), b);
  REQUIRE(d.rows == 4);
  std::set<std::pair<int, int>> runs;
  for (std::size_t r = 0; r < 4; ++r) runs.insert({d.at(r, 0), d.at(r, 1)});
  CHECK(runs.size() == 4);
  CHECK(d.at(0, 0) == 1);
  CHECK(d.at(0, 1) == 1);
}

TEST_CASE("strip-plot factors are constant on their rows and columns") {
  const auto b = parse_structure("2/(4x4)");
  const auto split = parse_split("rows=A..F,cols=G..J", 10);
  CHECK(split.rows == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(split.cols == std::vector<int>{6, 7, 8, 9});
  const auto t = template_for(b, 10, std::nullopt, split);
  const auto pools = make_pools(t, true);
  Rng rng(9);
  const auto& rows = b.factor(static_cast<std::size_t>(b.index_of("R")));
  const auto& cols = b.factor(static_cast<std::size_t>(b.index_of("C")));
  for (int rep = 0; rep < 5; ++rep) {
    const auto d = expand_design(t, algorithm2_fractional(t, pools, rng), b);
    for (std::size_t u = 0; u < d.rows; ++u)
      for (std::size_t v = 0; v < d.rows; ++v) {
        if (rows.class_at(u) == rows.class_at(v))
          for (int f : split.rows) CHECK(d.at(u, static_cast<std::size_t>(f)) == d.at(v, static_cast<std::size_t>(f)));
        if (cols.class_at(u) == cols.class_at(v))
          for (int f : split.cols) CHECK(d.at(u, static_cast<std::size_t>(f)) == d.at(v, static_cast<std::size_t>(f)));
      }
  }
}

TEST_CASE("a singular fill-in is rejected") {
  const auto b = parse_structure("2/8");
  const auto t = template_for(b, 5);
  // All-zero fill-ins put the fifth factor on the mean.
  GeneratorSet gs;
  for (const auto& s : t.slots) gs.fill.push_back(s.fixed ? s.fixed_fill : 0);
  CHECK_FALSE(key_admissible(t, gs, {}));
}
