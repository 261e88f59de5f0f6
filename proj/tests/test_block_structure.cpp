#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "msd/block_structure.hpp"
#include "msd/errors.hpp"
#include "support.hpp"

using namespace msd;

namespace {

// Partition join by union-find and meet by label pairs, written independently.
std::vector<int> brute_sup(const UnitFactor& a, const UnitFactor& b) {
  const std::size_t n = a.units();
  std::vector<int> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (a.class_at(u) == a.class_at(v) || b.class_at(u) == b.class_at(v)) parent[static_cast<std::size_t>(find(static_cast<int>(u)))] = find(static_cast<int>(v));
  std::vector<int> out(n);
  for (std::size_t u = 0; u < n; ++u) out[u] = find(static_cast<int>(u));
  return out;
}

bool same_partition(const UnitFactor& f, const std::vector<int>& labels) {
  for (std::size_t u = 0; u < labels.size(); ++u)
    for (std::size_t v = 0; v < labels.size(); ++v)
      if ((f.class_at(u) == f.class_at(v)) != (labels[u] == labels[v])) return false;
  return true;
}

}  // namespace

TEST_CASE("sup and inf on the blocked strip-plot") {
  const auto b = parse_structure("2/(4x4)");
  CHECK(b.N() == 32);
  const auto& r = b.factor(static_cast<std::size_t>(b.index_of("R")));
  const auto& c = b.factor(static_cast<std::size_t>(b.index_of("C")));
  const auto& blk = b.factor(static_cast<std::size_t>(b.index_of("B")));
  CHECK(inf(r, c).equivalent(UnitFactor::equality(32)));
  CHECK(sup(r, c).equivalent(blk));
  CHECK(same_partition(sup(r, c), brute_sup(r, c)));
  CHECK(sup(r, r).equivalent(r));
  CHECK(sup(r, UnitFactor::universal(32)).equivalent(UnitFactor::universal(32)));
  CHECK(inf(r, UnitFactor::equality(32)).equivalent(UnitFactor::equality(32)));
}

TEST_CASE("brute-force sup agrees on every pair of every bundled structure") {
  for (const char* s : {"2/8", "8/4", "2/2/4", "(4x4)", "2/(4x4)", "(4x7)"}) {
    const auto b = parse_structure(s, {.require_power_of_two = false});
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        CHECK(same_partition(sup(b.factor(i), b.factor(j)), brute_sup(b.factor(i), b.factor(j))));
        const auto m = inf(b.factor(i), b.factor(j));
        CHECK(m.finer_or_equal(b.factor(i)));
        CHECK(m.finer_or_equal(b.factor(j)));
      }
  }
}

TEST_CASE("structure parsing") {
  const auto b = parse_structure("8/4");
  CHECK(b.size() == 3);
  CHECK(b.N() == 32);
  CHECK(b.name(0) == "U");
  CHECK(b.name(2) == "E");
  CHECK(b.factor(1).n_classes() == 8);
  CHECK_THROWS_AS(parse_structure("3/4"), NonPowerOfTwo);
  CHECK_NOTHROW(parse_structure("(4x7)", {.require_power_of_two = false}));
  CHECK_THROWS_AS(parse_structure("8/"), ParseError);
  CHECK_THROWS_AS(parse_structure("(4x4"), ParseError);
}

TEST_CASE("class tables") {
  std::istringstream in("# toy\nR C\n0 0\n0 1\n1 0\n1 1\n");
  const auto b = read_class_table(in);
  CHECK(b.N() == 4);
  CHECK(b.size() == 4);
  CHECK(validate_obs(b).ok());

  // Unequal classes break uniformity.
  std::istringstream bad("R\n0\n0\n0\n1\n");
  CHECK_FALSE(validate_obs(read_class_table(bad)).ok());

  const auto latin = msd::load_class_table(msd::testing::data_path("oa16_latin.txt"));
  CHECK(latin.size() == 5);
  CHECK(validate_obs(latin).ok());
}

TEST_CASE("strata dimensions") {
  auto dims = [](const char* s) { return strata_projectors(parse_structure(s, {.require_power_of_two = false})).dimensions(); };
  CHECK(dims("8") == std::vector<std::size_t>{1, 7});
  CHECK(dims("8/4") == std::vector<std::size_t>{1, 7, 24});
  CHECK(dims("2/(4x4)") == std::vector<std::size_t>{1, 1, 6, 6, 18});
  CHECK(dims("(4x7)") == std::vector<std::size_t>{1, 3, 6, 18});
  const auto latin = msd::load_class_table(msd::testing::data_path("oa16_latin.txt"));
  CHECK(strata_projectors(latin).dimensions() == std::vector<std::size_t>{1, 3, 3, 3, 6});
}

TEST_CASE("projector identities hold on every bundled structure") {
  for (const char* s : {"8", "2/8", "8/4", "4/4", "2/2/4", "(4x4)", "2/(4x4)", "(4x7)", "(2x2)/2"})
    CHECK_MESSAGE(msd::testing::projector_failure(parse_structure(s, {.require_power_of_two = false})).empty(), s);
  CHECK(msd::testing::projector_failure(msd::load_class_table(msd::testing::data_path("oa16_latin.txt"))).empty());
}

TEST_CASE("projectors match the numeric eigenspaces") {
  for (const char* s : {"8/4", "2/(4x4)", "(4x7)"}) {
    const auto b = parse_structure(s, {.require_power_of_two = false});
    const auto sd = strata_projectors(b);
    const auto es = msd::testing::eigen_strata(b);
    for (std::size_t f = 0; f < b.size(); ++f) {
      CHECK(static_cast<std::size_t>(es.basis[f].cols()) == sd.dimension(f));
      const Eigen::MatrixXd p = es.basis[f] * es.basis[f].transpose();
      double worst = 0;
      for (std::size_t u = 0; u < b.N(); ++u)
        for (std::size_t v = 0; v < b.N(); ++v)
          worst = std::max(worst, std::abs(p(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) -
                                           to_double(sd.entry(f, u, v))));
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("admissible subsets and criterion sequences") {
  const auto b = parse_structure("8/4");
  const auto sets = admissible_subsets(b);
  REQUIRE(sets.size() == 2);
  CHECK(describe_set(b, sets[0]) == "{U}");
  CHECK(describe_set(b, sets[1]) == "{U, B}");
  CHECK(criterion_sequence(b, Direction::Forward) == std::vector<FactorSet>{sets[0], sets[1]});
  CHECK(criterion_sequence(b, Direction::Backward) == std::vector<FactorSet>{sets[1], sets[0]});

  const auto strip = parse_structure("2/(4x4)");
  const auto s5 = admissible_subsets(strip);
  CHECK(s5.size() == 5);
  for (const auto& g : s5) CHECK(std::find(g.begin(), g.end(), 0) != g.end());
  CHECK(describe_set(strip, s5.back()) == "{U, B, R, C}");
  CHECK(subset_label(strip, s5[2]) == 3);
  CHECK_FALSE(is_admissible(strip, {static_cast<int>(strip.index_of("R"))}));

  // Three incomparable strata with no tiebreak: 3! orders.
  const auto latin = msd::load_class_table(msd::testing::data_path("oa16_latin.txt"));
  CHECK_THROWS_AS(criterion_sequence(latin, Direction::Forward), AmbiguousOrder);
  CHECK(criterion_sequence_alternatives(latin, Direction::Forward, std::vector<int>(latin.size(), 0)).size() == 6);
}

TEST_CASE("stratum variances") {
  const auto b = parse_structure("8/4");
  const std::vector<StratumVariance> sigma{{Rational(0)}, {Rational(3)}, {Rational(1)}};
  const auto xi = stratum_variance(b, sigma);
  REQUIRE(xi.xi.size() == 3);
  // ξ_E = σ²_E, ξ_B = σ²_E + 4σ²_B.
  CHECK(xi.xi[2].value == Rational(1));
  CHECK(xi.xi[1].value == Rational(13));
  CHECK(xi.feasible(b));
}
