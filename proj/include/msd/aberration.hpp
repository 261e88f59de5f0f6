#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msd/block_structure.hpp"
#include "msd/design_io.hpp"
#include "msd/design_key.hpp"
#include "msd/rational.hpp"

namespace msd {

// B_{k,i}: generalized word counts, k = 1..n, one column per stratum.
class WordlengthTable {
public:
  WordlengthTable() = default;
  WordlengthTable(std::size_t n, std::size_t N, std::vector<std::string> strata);

  std::size_t n() const { return n_; }
  std::size_t N() const { return N_; }
  std::size_t strata() const { return names_.size(); }
  const std::vector<std::string>& strata_names() const { return names_; }

  const Rational& at(std::size_t k, std::size_t i) const { return b_[(k - 1) * strata() + i]; }
  Rational& at(std::size_t k, std::size_t i) { return b_[(k - 1) * strata() + i]; }
  std::vector<Rational> stratum_row(std::size_t i) const;

  friend bool operator==(const WordlengthTable& a, const WordlengthTable& b) { return a.n_ == b.n_ && a.b_ == b.b_; }

private:
  std::size_t n_ = 0, N_ = 0;
  std::vector<std::string> names_;
  std::vector<Rational> b_;
};

using CriterionVector = std::vector<Rational>;

// B_{k,F} = N⁻² Σ_{|S|=k} u_Sᵀ (N P_F) u_S with explicit projectors; n ≤ 16.
WordlengthTable compute_Bki_matrix(const DesignTable& design, const StratumDecomposition& strata,
                                   const std::vector<std::string>& names = {});
WordlengthTable compute_Bki_regular(const StratifiedWordSet& words, std::size_t n, std::size_t N);

// Word counts straight from factor aliases, Gray-code order; counts[(k-1)*strata + i].
std::vector<std::int64_t> alias_word_counts(std::span<const std::uint32_t> aliases, std::span<const int> alias_stratum,
                                            std::size_t strata);
WordlengthTable regular_table(const KeyTemplate& t, const GeneratorSet& gs, const BlockStructure& b);

std::vector<Rational> compute_W(const WordlengthTable& table, const BlockStructure& b, const VarianceVector& xi);
std::vector<Rational> compute_WG(const WordlengthTable& table, const BlockStructure& b, const FactorSet& g);
CriterionVector criterion_vector(const WordlengthTable& table, const BlockStructure& b,
                                 const std::vector<FactorSet>& sequence);

std::strong_ordering compare(const CriterionVector& a, const CriterionVector& b);

// "G<i>-MA {…}" for every admissible subset (or the chosen ones), in label order.
std::vector<std::string> report_lines(const WordlengthTable& table, const BlockStructure& b,
                                      const std::vector<int>& labels = {});

// The same counts through class sums: B_{k,F} N² = Σ_G μ(F,G) n_G Σ_{|S|=k} Σ_c (class sum of u_S)².
// Empty units (level 0) contribute nothing, which is how partial designs are scored.
class ClassSumEvaluator {
public:
  ClassSumEvaluator(const BlockStructure& b, std::size_t n);
  WordlengthTable table(const DesignTable& design) const;
  std::size_t n() const { return n_; }

private:
  const BlockStructure* b_;
  std::size_t n_;
};

}  // namespace msd
