#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msd/aberration.hpp"
#include "msd/block_structure.hpp"
#include "msd/design_io.hpp"
#include "msd/design_key.hpp"

namespace msd {

// Swap budget per stratum (regular) or a single entry (nonregular).
struct QVector {
  std::vector<int> gb, lb, nw;

  int total() const;
  static QVector scalar(int gb, int lb, int nw) { return {{gb}, {lb}, {nw}}; }
};

// Throws InvalidQ; returns advisory warnings (e.g. the suggested q_new ≥ q_gb ≥ q_lb ordering).
std::vector<std::string> validate_q(const QVector& q, std::span<const int> capacity);
// Spread swarm-wide totals over strata in proportion to capacity, then trim to fit.
QVector distribute_q(int gb, int lb, int nw, std::span<const int> capacity);

// Scores compare lexicographically; they are criterion vectors scaled to integers.
using Score = std::vector<std::int64_t>;

struct TraceRecord {
  std::size_t iteration = 0;
  CriterionVector global_best;
};

struct SearchOptions {
  std::size_t S = 50;
  std::size_t T = 50;
  QVector q;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::optional<std::size_t> patience;
  std::size_t max_co_optimal = 64;
  bool trace = true;
  std::function<void(const GeneratorSet&)> audit_regular;
  std::function<void(const std::vector<std::uint32_t>&)> audit_nonregular;
};

// Independent per-particle streams derived from the master seed.
Rng particle_rng(std::uint64_t seed, std::size_t particle);

// ------------------------------------------------------------------ regular

class RegularProblem {
public:
  RegularProblem(BlockStructure b, KeyTemplate t, KeyOptions opt, std::vector<FactorSet> sequence);

  const BlockStructure& structure() const { return b_; }
  const KeyTemplate& key_template() const { return t_; }
  const std::vector<PoolMatrix>& pools() const { return pools_; }
  const KeyOptions& options() const { return opt_; }
  const std::vector<FactorSet>& sequence() const { return seq_; }
  // Searchable slots per stratum, in key_template().strata() order.
  std::vector<int> capacity() const;

  bool admissible(const GeneratorSet& gs) const { return key_admissible(t_, gs, opt_); }
  Score score(const GeneratorSet& gs) const;
  CriterionVector criterion(const Score& s) const;
  WordlengthTable table(const GeneratorSet& gs) const { return regular_table(t_, gs, b_); }
  GeneratorSet random_particle(Rng& rng) const { return algorithm2_fractional(t_, pools_, rng, opt_); }
  // Uniform pool draw for a slot that keeps the key admissible; nullopt after the retry cap.
  std::optional<std::uint32_t> draw_for_slot(const GeneratorSet& gs, std::size_t slot, Rng& rng,
                                             bool must_differ = false) const;

private:
  BlockStructure b_;
  KeyTemplate t_;
  KeyOptions opt_;
  std::vector<FactorSet> seq_;
  std::vector<PoolMatrix> pools_;
};

struct RegularParticle {
  GeneratorSet gs;
  Score score;
  friend bool operator==(const RegularParticle& a, const RegularParticle& b) { return a.gs == b.gs; }
};

template <class P>
struct MoveResult {
  P current;
  P local_best;
  bool perturbed = false;
};

RegularParticle mix_regular(const RegularProblem& pr, const RegularParticle& x, const RegularParticle& gb,
                            const RegularParticle& lb, const QVector& q, Rng& rng);
RegularParticle perturb_regular(const RegularProblem& pr, const RegularParticle& x, const QVector& q, Rng& rng);
MoveResult<RegularParticle> move_particle(const RegularProblem& pr, const RegularParticle& candidate,
                                          const RegularParticle& current, const RegularParticle& local_best,
                                          const QVector& q, Rng& rng);

struct RegularSearchResult {
  RegularParticle best;
  WordlengthTable table;
  std::vector<GeneratorSet> co_optimal;
  std::vector<TraceRecord> trace;
  std::size_t iterations = 0;
  double seconds = 0;
};

RegularSearchResult run_algorithm3(const RegularProblem& pr, const SearchOptions& opt);

struct OracleResult {
  Score best;
  std::vector<GeneratorSet> optima;  // truncated to a handful
  std::size_t optimum_count = 0;
  std::size_t evaluated = 0;
  double space = 0;
};
double regular_space_size(const RegularProblem& pr);
OracleResult regular_oracle(const RegularProblem& pr, double cap = 1e6);

// --------------------------------------------------------------- nonregular

struct ForbiddenCombination {
  std::vector<int> factors;
  std::vector<int> levels;  // ±1
};

// Treatment factor `factor` must not vary within classes of unit factor `unit_factor`.
struct StratumConstancy {
  int factor = 0;
  int unit_factor = 0;
};

struct Constraints {
  std::vector<ForbiddenCombination> forbidden;
  std::vector<StratumConstancy> constant;
  bool distinct_rows = false;
};

// One sub-design is searched, the other held fixed; the full design is their cross
// product with the outer side varying slowest.
struct CrossedLayout {
  bool searched_outer = true;
  std::vector<int> searched_factors;  // global factor index per searched column
  std::vector<int> fixed_factors;     // global factor index per fixed column
  std::vector<std::vector<int>> fixed_runs;  // ±1 levels
};

struct SumLayout;

class NonregularProblem {
public:
  NonregularProblem(BlockStructure b, std::vector<std::string> names, std::vector<FactorSet> sequence,
                    Constraints constraints = {}, std::optional<CrossedLayout> layout = std::nullopt);

  const BlockStructure& structure() const { return b_; }
  const std::vector<FactorSet>& sequence() const { return seq_; }
  const std::vector<std::string>& names() const { return names_; }
  const Constraints& constraints() const { return cons_; }
  const std::optional<CrossedLayout>& layout() const { return layout_; }
  std::size_t n() const { return names_.size(); }
  std::size_t positions() const { return positions_; }
  std::size_t searched_width() const { return width_; }
  // Admissible rows over the searched factors (bit c set ↔ searched column c at −1).
  const std::vector<std::uint32_t>& pool() const { return pool_; }
  std::int64_t scale() const;  // criterion = score / scale

  // Units occupied by a position, and the full run mask (over all n factors) it receives.
  const std::vector<std::size_t>& units_of(std::size_t pos) const { return units_of_[pos]; }
  std::uint32_t full_run(std::size_t pos, std::size_t k, std::uint32_t row) const;

  bool row_allowed(std::span<const std::uint32_t> rows, std::span<const char> filled, std::size_t pos,
                   std::uint32_t row) const;
  bool satisfies(std::span<const std::uint32_t> rows) const;
  std::vector<std::uint32_t> random_particle(Rng& rng) const;

  Score score(std::span<const std::uint32_t> rows) const;
  CriterionVector criterion(const Score& s) const;
  DesignTable design(std::span<const std::uint32_t> rows) const;
  WordlengthTable table(std::span<const std::uint32_t> rows) const;

  // Score from Q_{k,G} = Σ_{|S|=k} Σ_c (class sums)².
  Score score_from_q(std::span<const std::int64_t> q) const;
  const std::vector<std::int64_t>& set_coefficients() const { return coef_; }
  const SumLayout& sum_layout() const { return *sum_layout_; }

private:
  BlockStructure b_;
  std::vector<std::string> names_;
  std::vector<FactorSet> seq_;
  Constraints cons_;
  std::optional<CrossedLayout> layout_;
  std::size_t positions_ = 0, width_ = 0;
  std::vector<std::uint32_t> pool_;
  std::vector<std::vector<std::size_t>> units_of_;
  std::vector<std::uint32_t> fixed_masks_;
  std::vector<std::int64_t> coef_;  // [set][factor]
  std::shared_ptr<const SumLayout> sum_layout_;
};

struct NonregularParticle {
  std::vector<std::uint32_t> rows;
  Score score;
  friend bool operator==(const NonregularParticle& a, const NonregularParticle& b) { return a.rows == b.rows; }
};

NonregularParticle mix_nonregular(const NonregularProblem& pr, const NonregularParticle& x,
                                  const NonregularParticle& gb, const NonregularParticle& lb, const QVector& q,
                                  Rng& rng);
NonregularParticle perturb_nonregular(const NonregularProblem& pr, const NonregularParticle& x, int q_new, Rng& rng);
MoveResult<NonregularParticle> move_particle(const NonregularProblem& pr, const NonregularParticle& candidate,
                                             const NonregularParticle& current, const NonregularParticle& local_best,
                                             const QVector& q, Rng& rng);

struct NonregularSearchResult {
  NonregularParticle best;
  WordlengthTable table;
  std::vector<std::vector<std::uint32_t>> co_optimal;
  std::vector<TraceRecord> trace;
  std::size_t iterations = 0;
  double seconds = 0;
};

NonregularSearchResult run_algorithm4(const NonregularProblem& pr, const SearchOptions& opt);

struct NonregularOracleResult {
  Score best;
  std::vector<std::vector<std::uint32_t>> optima;
  std::size_t optimum_count = 0;
  double space = 0;
};
NonregularOracleResult nonregular_oracle(const NonregularProblem& pr, double cap = 1e6);

// ------------------------------------------------------------ continuous PSO

std::pair<std::vector<double>, std::vector<double>> continuous_pso_reference(
    std::span<const double> position, std::span<const double> velocity, std::span<const double> gb,
    std::span<const double> lb, std::span<const double> fresh, double c1, double c2, double c3, double dt);

}  // namespace msd
