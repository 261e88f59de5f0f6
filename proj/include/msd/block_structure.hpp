#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msd/rational.hpp"

namespace msd {

// A partition of units 0..N-1 into classes; labels are renumbered by first appearance.
class UnitFactor {
public:
  UnitFactor() = default;
  UnitFactor(std::string name, std::vector<int> class_of);

  static UnitFactor universal(std::size_t n, std::string name = "U");
  static UnitFactor equality(std::size_t n, std::string name = "E");

  const std::string& name() const { return name_; }
  std::size_t units() const { return class_of_.size(); }
  int n_classes() const { return n_classes_; }
  int class_at(std::size_t unit) const { return class_of_[unit]; }
  std::span<const int> class_of() const { return class_of_; }
  std::vector<std::size_t> class_sizes() const;
  bool is_uniform() const;

  bool equivalent(const UnitFactor& other) const { return class_of_ == other.class_of_; }
  // this ⪯ other: every class of this lies inside a class of other.
  bool finer_or_equal(const UnitFactor& other) const;
  UnitFactor renamed(std::string name) const;

private:
  std::string name_;
  std::vector<int> class_of_;
  int n_classes_ = 0;
};

UnitFactor sup(const UnitFactor& a, const UnitFactor& b);
UnitFactor inf(const UnitFactor& a, const UnitFactor& b);

struct StructureExpr {
  enum class Kind { Leaf, Nest, Cross };
  Kind kind = Kind::Leaf;
  std::size_t units = 1;
  std::shared_ptr<const StructureExpr> left, right;

  static std::shared_ptr<const StructureExpr> leaf(std::size_t n);
  std::string to_string() const;
};

// Factors are kept sorted coarse to fine (class count, then declaration order):
// index 0 is U and the last index is E.
class BlockStructure {
public:
  BlockStructure() = default;
  BlockStructure(std::vector<UnitFactor> factors, std::shared_ptr<const StructureExpr> expr = nullptr);

  static BlockStructure unstructured(std::size_t n);

  std::size_t N() const { return n_; }
  std::size_t size() const { return factors_.size(); }
  const std::vector<UnitFactor>& factors() const { return factors_; }
  const UnitFactor& factor(std::size_t i) const { return factors_[i]; }
  const std::string& name(std::size_t i) const { return factors_[i].name(); }
  int index_of(std::string_view name) const;  // -1 if absent
  int universal_index() const { return 0; }
  int equality_index() const { return static_cast<int>(factors_.size()) - 1; }
  bool has_universal() const;
  bool has_equality() const;

  bool finer_or_equal(std::size_t i, std::size_t j) const { return le_[i * size() + j]; }
  bool strictly_finer(std::size_t i, std::size_t j) const { return i != j && finer_or_equal(i, j); }
  bool comparable(std::size_t i, std::size_t j) const { return finer_or_equal(i, j) || finer_or_equal(j, i); }
  // Index of the factor equivalent to the given partition, or -1.
  int find(const UnitFactor& f) const;
  // Möbius function of the factor poset (zero unless i ⪯ j).
  std::int64_t mobius(std::size_t i, std::size_t j) const { return mu_[i * size() + j]; }

  const std::shared_ptr<const StructureExpr>& expr() const { return expr_; }
  std::string describe() const;

private:
  std::size_t n_ = 0;
  std::vector<UnitFactor> factors_;
  std::vector<char> le_;
  std::vector<std::int64_t> mu_;
  std::shared_ptr<const StructureExpr> expr_;
};

BlockStructure cross(const BlockStructure& b1, const BlockStructure& b2);
BlockStructure nest(const BlockStructure& b1, const BlockStructure& b2);

struct ParseOptions {
  bool require_power_of_two = true;
};
BlockStructure parse_structure(std::string_view expr, ParseOptions options = {});

// One row per unit, one whitespace-separated integer column per named factor; the
// first non-comment line holds the factor names. U and E are added when missing.
BlockStructure read_class_table(std::istream& in);
BlockStructure load_class_table(const std::string& path);
BlockStructure from_class_columns(const std::vector<std::string>& names, const std::vector<std::vector<int>>& columns);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};
ValidationReport validate_obs(const BlockStructure& b);

// Projector of each stratum stored as an integer matrix over the common denominator N.
class StratumDecomposition {
public:
  StratumDecomposition() = default;
  StratumDecomposition(std::size_t n, std::vector<std::vector<std::int64_t>> numerators);

  std::size_t N() const { return n_; }
  std::size_t strata() const { return numerators_.size(); }
  std::int64_t numerator(std::size_t f, std::size_t u, std::size_t v) const { return numerators_[f][u * n_ + v]; }
  std::span<const std::int64_t> numerator_matrix(std::size_t f) const { return numerators_[f]; }
  Rational entry(std::size_t f, std::size_t u, std::size_t v) const;
  std::vector<std::vector<Rational>> projector(std::size_t f) const;
  std::size_t dimension(std::size_t f) const { return dims_[f]; }
  const std::vector<std::size_t>& dimensions() const { return dims_; }

private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::int64_t>> numerators_;
  std::vector<std::size_t> dims_;
};

StratumDecomposition strata_projectors(const BlockStructure& b);

using FactorSet = std::vector<int>;  // sorted factor indices

std::vector<FactorSet> admissible_subsets(const BlockStructure& b);
// 1-based position in admissible_subsets, used for "G<i>" labels; 0 if not admissible.
int subset_label(const BlockStructure& b, const FactorSet& g);
bool is_admissible(const BlockStructure& b, const FactorSet& g);
std::string describe_set(const BlockStructure& b, const FactorSet& g);

enum class Direction { Forward, Backward };

// priority[f] ranks incomparable strata: higher goes first, ties by declaration order.
std::vector<FactorSet> criterion_sequence(const BlockStructure& b, Direction dir,
                                          const std::optional<std::vector<int>>& priority = std::nullopt);
// Every distinct sequence obtainable by ordering tied incomparable strata freely.
std::vector<std::vector<FactorSet>> criterion_sequence_alternatives(const BlockStructure& b, Direction dir,
                                                                    const std::vector<int>& priority);

struct StratumVariance {
  Rational value{0};
  bool infinite = false;
  static StratumVariance inf() { return {Rational(0), true}; }
};

struct VarianceVector {
  std::vector<StratumVariance> xi;
  bool feasible(const BlockStructure& b) const;
};

VarianceVector stratum_variance(const BlockStructure& b, std::span<const StratumVariance> sigma2);

}  // namespace msd
