#include "msd/aberration.hpp"

#include <algorithm>
#include <bit>

#include "msd/errors.hpp"

namespace msd {

WordlengthTable::WordlengthTable(std::size_t n, std::size_t N, std::vector<std::string> strata)
    : n_(n), N_(N), names_(std::move(strata)), b_(n * names_.size(), Rational(0)) {}

std::vector<Rational> WordlengthTable::stratum_row(std::size_t i) const {
  std::vector<Rational> row;
  for (std::size_t k = 1; k <= n_; ++k) row.push_back(at(k, i));
  return row;
}

WordlengthTable compute_Bki_matrix(const DesignTable& design, const StratumDecomposition& strata,
                                   const std::vector<std::string>& names) {
  const std::size_t N = strata.N();
  const std::size_t n = design.cols();
  if (design.rows != N) throw DimensionMismatch("design has " + std::to_string(design.rows) + " runs but the structure has " +
                                                std::to_string(N) + " units");
  if (n > 16) throw DimensionMismatch("matrix evaluation is limited to 16 factors");
  std::vector<std::string> labels = names;
  if (labels.empty())
    for (std::size_t i = 0; i < strata.strata(); ++i) labels.push_back("S" + std::to_string(i));

  // Σ_{|S|=k} uᵀ M_F u, with P_F = M_F / N.
  std::vector<std::int64_t> acc(n * strata.strata(), 0);
  // Rows holding a 0 are empty units and contribute nothing.
  std::vector<std::int64_t> u(N, 1);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (design.at(r, c) == 0) u[r] = 0;
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << n); ++s) {
    // Gray-code neighbours differ in one column.
    const std::size_t flip = static_cast<std::size_t>(std::countr_zero(s));
    const std::uint32_t gray = s ^ (s >> 1);
    for (std::size_t r = 0; r < N; ++r) u[r] *= design.at(r, flip);
    const std::size_t k = static_cast<std::size_t>(std::popcount(gray));
    for (std::size_t f = 0; f < strata.strata(); ++f) {
      const auto m = strata.numerator_matrix(f);
      std::int64_t q = 0;
      for (std::size_t a = 0; a < N; ++a) {
        if (u[a] == 0) continue;
        std::int64_t row = 0;
        for (std::size_t c = 0; c < N; ++c) row += m[a * N + c] * u[c];
        q += u[a] * row;
      }
      acc[(k - 1) * strata.strata() + f] += q;
    }
  }
  WordlengthTable t(n, N, labels);
  const auto n2 = static_cast<std::int64_t>(N * N);
  for (std::size_t k = 1; k <= n; ++k)
    for (std::size_t f = 0; f < strata.strata(); ++f) t.at(k, f) = Rational(acc[(k - 1) * strata.strata() + f], n2);
  return t;
}

WordlengthTable compute_Bki_regular(const StratifiedWordSet& words, std::size_t n, std::size_t N) {
  WordlengthTable t(n, N, words.strata);
  for (std::size_t i = 0; i < words.by_stratum.size(); ++i)
    for (const auto& w : words.by_stratum[i]) t.at(static_cast<std::size_t>(w.length), i) += 1;
  return t;
}

std::vector<std::int64_t> alias_word_counts(std::span<const std::uint32_t> aliases, std::span<const int> alias_stratum,
                                            std::size_t strata) {
  const std::size_t n = aliases.size();
  std::vector<std::int64_t> counts(n * strata, 0);
  std::uint32_t a = 0;
  int len = 0;
  std::uint32_t word = 0;
  for (std::uint32_t i = 1; i < (std::uint32_t{1} << n); ++i) {
    const int flip = std::countr_zero(i);
    word ^= std::uint32_t{1} << flip;
    len += ((word >> flip) & 1U) ? 1 : -1;
    a ^= aliases[static_cast<std::size_t>(flip)];
    ++counts[static_cast<std::size_t>(len - 1) * strata + static_cast<std::size_t>(alias_stratum[a])];
  }
  return counts;
}

WordlengthTable regular_table(const KeyTemplate& t, const GeneratorSet& gs, const BlockStructure& b) {
  const auto alias = factor_aliases(t, gs);
  const auto counts = alias_word_counts(alias, t.alias_stratum, b.size());
  std::vector<std::string> names;
  for (std::size_t f = 0; f < b.size(); ++f) names.push_back(b.name(f));
  WordlengthTable table(t.n, b.N(), names);
  for (std::size_t k = 1; k <= t.n; ++k)
    for (std::size_t i = 0; i < b.size(); ++i) table.at(k, i) = counts[(k - 1) * b.size() + i];
  return table;
}

std::vector<Rational> compute_W(const WordlengthTable& table, const BlockStructure& b, const VarianceVector& xi) {
  if (xi.xi.size() != table.strata() || table.strata() != b.size())
    throw DimensionMismatch("variance vector does not match the strata");
  const auto& last = xi.xi.back();
  if (!xi.feasible(b) || last.infinite || last.value.numerator() <= 0)
    throw InfeasibleXi("stratum variances must be feasible with a finite positive ξ for E");
  const Rational inv_m = 1 / last.value;
  std::vector<Rational> w(table.n(), Rational(0));
  for (std::size_t i = 0; i + 1 < table.strata(); ++i) {
    const Rational inv_i = xi.xi[i].infinite ? Rational(0) : 1 / xi.xi[i].value;
    const Rational weight = inv_m - inv_i;
    if (weight.numerator() == 0) continue;
    for (std::size_t k = 1; k <= table.n(); ++k) w[k - 1] += weight * table.at(k, i);
  }
  return w;
}

std::vector<Rational> compute_WG(const WordlengthTable& table, const BlockStructure& b, const FactorSet& g) {
  if (!is_admissible(b, g)) throw NotAdmissible(describe_set(b, g) + " is not an admissible criterion subset");
  std::vector<Rational> w(table.n(), Rational(0));
  for (int f : g)
    for (std::size_t k = 1; k <= table.n(); ++k) w[k - 1] += table.at(k, static_cast<std::size_t>(f));
  return w;
}

CriterionVector criterion_vector(const WordlengthTable& table, const BlockStructure& b,
                                 const std::vector<FactorSet>& sequence) {
  CriterionVector out;
  for (const auto& g : sequence) {
    auto w = compute_WG(table, b, g);
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

std::strong_ordering compare(const CriterionVector& a, const CriterionVector& b) {
  if (a.size() != b.size()) throw LengthMismatch("criterion vectors of different length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return std::strong_ordering::less;
    if (b[i] < a[i]) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

std::vector<std::string> report_lines(const WordlengthTable& table, const BlockStructure& b,
                                      const std::vector<int>& labels) {
  const auto sets = admissible_subsets(b);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const int label = static_cast<int>(i) + 1;
    if (!labels.empty() && std::find(labels.begin(), labels.end(), label) == labels.end()) continue;
    out.push_back("G" + std::to_string(label) + "-MA " + format_pattern(compute_WG(table, b, sets[i])));
  }
  return out;
}

ClassSumEvaluator::ClassSumEvaluator(const BlockStructure& b, std::size_t n) : b_(&b), n_(n) {
  if (n > 24) throw DimensionMismatch("class-sum evaluation is limited to 24 factors");
}

WordlengthTable ClassSumEvaluator::table(const DesignTable& design) const {
  const auto& b = *b_;
  const std::size_t N = b.N();
  if (design.rows != N) throw DimensionMismatch("design has " + std::to_string(design.rows) +
                                                " runs but the structure has " + std::to_string(N) + " units");
  if (design.cols() != n_) throw DimensionMismatch("design has the wrong number of factors");
  std::vector<std::uint32_t> minus(N, 0);
  std::vector<int> u(N);
  for (std::size_t r = 0; r < N; ++r) {
    bool empty = false;
    for (std::size_t c = 0; c < n_; ++c) {
      if (design.at(r, c) == -1) minus[r] |= std::uint32_t{1} << c;
      if (design.at(r, c) == 0) empty = true;
    }
    u[r] = empty ? 0 : 1;
  }
  std::vector<std::int64_t> q(n_ * b.size(), 0);
  std::vector<std::int64_t> sums;
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << n_); ++s) {
    const int flip = std::countr_zero(s);
    for (std::size_t r = 0; r < N; ++r)
      if ((minus[r] >> flip) & 1U) u[r] = -u[r];
    const std::uint32_t gray = s ^ (s >> 1);
    const std::size_t k = static_cast<std::size_t>(std::popcount(gray));
    for (std::size_t g = 0; g < b.size(); ++g) {
      const auto& f = b.factor(g);
      sums.assign(static_cast<std::size_t>(f.n_classes()), 0);
      for (std::size_t r = 0; r < N; ++r) sums[static_cast<std::size_t>(f.class_at(r))] += u[r];
      std::int64_t acc = 0;
      for (auto x : sums) acc += x * x;
      q[(k - 1) * b.size() + g] += acc;
    }
  }
  std::vector<std::string> names;
  for (std::size_t f = 0; f < b.size(); ++f) names.push_back(b.name(f));
  WordlengthTable t(n_, N, names);
  const auto n2 = static_cast<std::int64_t>(N * N);
  for (std::size_t k = 1; k <= n_; ++k)
    for (std::size_t f = 0; f < b.size(); ++f) {
      std::int64_t num = 0;
      for (std::size_t g = 0; g < b.size(); ++g)
        num += b.mobius(f, g) * b.factor(g).n_classes() * q[(k - 1) * b.size() + g];
      t.at(k, f) = Rational(num, n2);
    }
  return t;
}

}  // namespace msd
