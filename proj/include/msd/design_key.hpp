#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "msd/block_structure.hpp"
#include "msd/design_io.hpp"
#include "msd/gf2.hpp"

namespace msd {

using Rng = std::mt19937_64;
std::size_t uniform_index(Rng& rng, std::size_t n);

// A unit pseudo-factor: one bit of the unit index, owned by the coarsest unit factor
// on whose classes that bit is constant.
struct PseudoFactor {
  std::string name;
  int owner = 0;
  int bit = 0;
};

enum class SlotKind { Stratum, Treatment };

struct GeneratorSlot {
  SlotKind kind = SlotKind::Stratum;
  int stratum = 0;           // unit factor index (U for treatment generators)
  int side = 0;              // index into KeyTemplate::sides
  int pivot = 0;             // Stratum: local column; Treatment: the added treatment factor
  std::vector<int> stars;    // treatment factors filled by the pool row, bit t ↔ stars[t]
  int pool = 0;              // index into KeyTemplate::pools
  bool fixed = false;        // held at fixed_fill, never searched
  std::uint32_t fixed_fill = 0;
};

// One nested sub-design: local column j carries basic factor basic[j] and maps to
// global pseudo-factor columns[j].
struct KeySide {
  std::vector<int> basic;
  std::vector<int> columns;
};

struct PoolSpec {
  SlotKind kind = SlotKind::Stratum;
  int stratum = 0;
  int width = 0;
  std::string label;
};

struct FactorSplit {
  std::vector<int> rows, cols;
};
// "rows=A..F,cols=G..J" or "rows=A,B,C;cols=D,E"
FactorSplit parse_split(std::string_view text, std::size_t n);

struct KeyTemplate {
  std::size_t n = 0, m = 0, l0 = 0;
  bool crossed = false;
  std::vector<std::string> letters;
  std::vector<PseudoFactor> pseudo;  // display order
  std::vector<KeySide> sides;
  std::vector<GeneratorSlot> slots;  // stratum-major, index-minor
  std::vector<PoolSpec> pools;
  std::vector<int> home;             // per treatment factor: stratum its main effect belongs to
  std::vector<int> priority;         // per unit factor: tiebreak weight for criterion sequences
  std::vector<int> alias_stratum;    // per unit alias (bitmask over pseudo columns)
  std::vector<std::string> stratum_names;
  int equality = 0;

  // Strata holding searchable slots, U first then coarse to fine.
  std::vector<int> strata() const;
  std::vector<int> slots_in(int stratum) const;  // searchable slots only
  std::size_t searchable_slots() const;
  // n × m; 1 where the template leaves a free entry.
  BitMatrix star_mask() const;
  std::string render() const;
};

KeyTemplate template_for(const BlockStructure& b, std::size_t n, std::optional<std::size_t> l0 = std::nullopt,
                         const std::optional<FactorSplit>& split = std::nullopt);

struct PoolMatrix {
  int stratum = 0;
  std::string label;
  int width = 0;
  bool reduced = false;
  std::vector<std::uint32_t> rows;  // bit t ↔ star position t

  BitVector row(std::size_t i) const { return BitVector::from_u64(static_cast<std::size_t>(width), rows[i]); }
  std::size_t size() const { return rows.size(); }
};

PoolMatrix pool_for(const KeyTemplate& t, std::size_t pool_index, bool reduced);
// The pool feeding the first slot of a stratum.
PoolMatrix pool_for_stratum(const KeyTemplate& t, int stratum, bool reduced);
std::vector<PoolMatrix> make_pools(const KeyTemplate& t, bool reduced);

struct KeyOptions {
  bool reduced = true;
  bool distinct = false;  // within-stratum distinct fill-ins
  int retry_cap = 100;
};

// Fill-in per template slot (fixed slots hold their fixed value).
struct GeneratorSet {
  std::vector<std::uint32_t> fill;
  friend bool operator==(const GeneratorSet&, const GeneratorSet&) = default;
};

struct GeneratorWord {
  int stratum = 0;
  BitVector word;
  bool derived = false;  // crossing generator implied by the two sides
};

// Unit alias of every treatment factor (bit p ↔ pseudo-factor p). Throws SingularKey.
std::vector<std::uint32_t> factor_aliases(const KeyTemplate& t, const GeneratorSet& gs);
BitMatrix design_key(const KeyTemplate& t, const GeneratorSet& gs);
std::vector<GeneratorWord> generator_words(const KeyTemplate& t, const GeneratorSet& gs);
bool key_admissible(const KeyTemplate& t, const GeneratorSet& gs, const KeyOptions& opt);
// Same checks on precomputed aliases.
bool aliases_admissible(const KeyTemplate& t, const GeneratorSet& gs, const std::vector<std::uint32_t>& aliases,
                        const KeyOptions& opt);

GeneratorSet algorithm1_complete(const KeyTemplate& t, const std::vector<PoolMatrix>& pools, Rng& rng,
                                 const KeyOptions& opt = {});
GeneratorSet algorithm2_fractional(const KeyTemplate& t, const std::vector<PoolMatrix>& pools, Rng& rng,
                                   const KeyOptions& opt = {});

DesignTable expand_design(const KeyTemplate& t, const GeneratorSet& gs, const BlockStructure& b);

struct StratifiedWord {
  BitVector word;
  int length = 0;
};

struct StratifiedWordSet {
  std::vector<std::string> strata;                   // unit factor names
  std::vector<std::vector<StratifiedWord>> by_stratum;
  std::size_t n = 0;
};

// Every nonzero treatment word, classified by the stratum of its unit alias.
StratifiedWordSet words_by_stratum(const KeyTemplate& t, const GeneratorSet& gs, const BlockStructure& b);

}  // namespace msd
