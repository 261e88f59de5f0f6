#include "msd/design_key.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <sstream>

#include "msd/errors.hpp"

namespace msd {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

namespace {

int exact_log2(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) throw NonPowerOfTwo(std::to_string(n) + " units is not a power of two");
  return std::countr_zero(n);
}

bool is_chain(const StructureExpr& e) {
  if (e.kind == StructureExpr::Kind::Leaf) return true;
  if (e.kind == StructureExpr::Kind::Cross) return false;
  return is_chain(*e.left) && is_chain(*e.right);
}

void collect_leaves(const StructureExpr& e, std::vector<const StructureExpr*>& out) {
  if (e.kind == StructureExpr::Kind::Leaf) {
    out.push_back(&e);
    return;
  }
  collect_leaves(*e.left, out);
  collect_leaves(*e.right, out);
}

// Coarsest unit factor on whose classes the given unit-index bit is constant.
int bit_owner(const BlockStructure& b, int bit) {
  for (std::size_t f = 0; f < b.size(); ++f) {
    const auto& fac = b.factor(f);
    std::vector<int> val(static_cast<std::size_t>(fac.n_classes()), -1);
    bool constant = true;
    for (std::size_t u = 0; u < b.N() && constant; ++u) {
      const int v = static_cast<int>((u >> bit) & 1U);
      int& slot = val[static_cast<std::size_t>(fac.class_at(u))];
      if (slot == -1)
        slot = v;
      else if (slot != v)
        constant = false;
    }
    if (constant) return static_cast<int>(f);
  }
  return b.equality_index();
}

// Gauss-Jordan inverse of a k×k GF(2) matrix whose rows are bitmasks.
bool invert_small(std::vector<std::uint32_t> a, std::vector<std::uint32_t>& inv) {
  const std::size_t k = a.size();
  inv.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) inv[i] = std::uint32_t{1} << i;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    while (p < k && !((a[p] >> c) & 1U)) ++p;
    if (p == k) return false;
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    for (std::size_t r = 0; r < k; ++r)
      if (r != c && ((a[r] >> c) & 1U)) {
        a[r] ^= a[c];
        inv[r] ^= inv[c];
      }
  }
  return true;
}

std::size_t rank_small(std::vector<std::uint32_t> v) {
  std::size_t r = 0;
  for (int bit = 31; bit >= 0; --bit) {
    auto it = std::find_if(v.begin() + static_cast<std::ptrdiff_t>(r), v.end(),
                           [bit](std::uint32_t x) { return (x >> bit) & 1U; });
    if (it == v.end()) continue;
    std::iter_swap(v.begin() + static_cast<std::ptrdiff_t>(r), it);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (i != r && ((v[i] >> bit) & 1U)) v[i] ^= v[r];
    ++r;
  }
  return r;
}

int letter_index(std::string_view s, const std::vector<std::string>& letters) {
  for (std::size_t i = 0; i < letters.size(); ++i)
    if (letters[i] == s) return static_cast<int>(i);
  throw FormatError("unknown treatment factor '" + std::string(s) + "' in factor split");
}

}  // namespace

FactorSplit parse_split(std::string_view text, std::size_t n) {
  const auto letters = default_letters(n);
  FactorSplit split;
  std::string s(text);
  for (char& ch : s)
    if (ch == ';') ch = ',';
  std::vector<int>* current = nullptr;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    if (item.empty()) continue;
    if (auto eq = item.find('='); eq != std::string::npos) {
      const std::string key = item.substr(0, eq);
      if (key == "rows")
        current = &split.rows;
      else if (key == "cols" || key == "columns")
        current = &split.cols;
      else
        throw FormatError("factor split keys are rows= and cols=, got '" + key + "'");
      item = item.substr(eq + 1);
    }
    if (!current) throw FormatError("factor split must start with rows= or cols=");
    if (auto dots = item.find(".."); dots != std::string::npos) {
      const int lo = letter_index(item.substr(0, dots), letters);
      const int hi = letter_index(item.substr(dots + 2), letters);
      if (hi < lo) throw FormatError("descending range in factor split: " + item);
      for (int f = lo; f <= hi; ++f) current->push_back(f);
    } else {
      current->push_back(letter_index(item, letters));
    }
  }
  std::set<int> seen;
  for (int f : split.rows) seen.insert(f);
  for (int f : split.cols) seen.insert(f);
  if (seen.size() != split.rows.size() + split.cols.size() || seen.size() != n)
    throw FormatError("factor split must assign every treatment factor exactly once");
  return split;
}

// ------------------------------------------------------------------ template

std::vector<int> KeyTemplate::strata() const {
  std::vector<int> out;
  for (const auto& s : slots)
    if (!s.fixed && std::find(out.begin(), out.end(), s.stratum) == out.end()) out.push_back(s.stratum);
  return out;
}

std::vector<int> KeyTemplate::slots_in(int stratum) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (!slots[i].fixed && slots[i].stratum == stratum) out.push_back(static_cast<int>(i));
  return out;
}

std::size_t KeyTemplate::searchable_slots() const {
  return static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(), [](const auto& s) { return !s.fixed; }));
}

namespace {

// Row of K displayed for a slot, and the pseudo column of each star.
int slot_row(const KeyTemplate& t, const GeneratorSlot& s) {
  return s.kind == SlotKind::Stratum ? t.sides[static_cast<std::size_t>(s.side)].basic[static_cast<std::size_t>(s.pivot)]
                                     : s.pivot;
}

int star_column(const KeyTemplate& t, const GeneratorSlot& s, std::size_t k) {
  const auto& side = t.sides[static_cast<std::size_t>(s.side)];
  const auto it = std::find(side.basic.begin(), side.basic.end(), s.stars[k]);
  return side.columns[static_cast<std::size_t>(it - side.basic.begin())];
}

}  // namespace

BitMatrix KeyTemplate::star_mask() const {
  BitMatrix mask(n, m);
  for (const auto& s : slots) {
    if (s.fixed) continue;
    for (std::size_t k = 0; k < s.stars.size(); ++k)
      mask.set(static_cast<std::size_t>(slot_row(*this, s)), static_cast<std::size_t>(star_column(*this, s, k)));
  }
  std::vector<std::string> cols;
  for (const auto& p : pseudo) cols.push_back(p.name);
  mask.set_labels(letters, cols);
  return mask;
}

std::string KeyTemplate::render() const {
  std::vector<std::string> grid(n, std::string(m, '0'));
  for (const auto& side : sides)
    for (std::size_t j = 0; j < side.basic.size(); ++j)
      grid[static_cast<std::size_t>(side.basic[j])][static_cast<std::size_t>(side.columns[j])] = '1';
  for (const auto& s : slots)
    for (std::size_t k = 0; k < s.stars.size(); ++k) {
      char c = s.fixed ? (((s.fixed_fill >> k) & 1U) ? '1' : '0') : '*';
      grid[static_cast<std::size_t>(slot_row(*this, s))][static_cast<std::size_t>(star_column(*this, s, k))] = c;
    }
  std::size_t w = 1;
  for (const auto& p : pseudo) w = std::max(w, p.name.size());
  std::size_t lead = 1;
  for (const auto& l : letters) lead = std::max(lead, l.size());
  std::ostringstream out;
  out << std::string(lead + 1, ' ');
  for (std::size_t c = 0; c < m; ++c) out << (c ? " " : "") << std::string(w - pseudo[c].name.size(), ' ') << pseudo[c].name;
  out << '\n';
  for (std::size_t r = 0; r < n; ++r) {
    out << std::string(lead - letters[r].size(), ' ') << letters[r] << ' ';
    for (std::size_t c = 0; c < m; ++c) out << (c ? " " : "") << std::string(w - 1, ' ') << grid[r][c];
    out << '\n';
  }
  return out.str();
}

KeyTemplate template_for(const BlockStructure& b, std::size_t n, std::optional<std::size_t> l0,
                         const std::optional<FactorSplit>& split) {
  if (!b.expr()) throw Infeasible("design-key templates need a structure built by nesting and crossing");
  const auto& expr = *b.expr();
  const int total_bits = exact_log2(b.N());
  if (total_bits > 20) throw Infeasible("more than 2^20 units is outside the supported range");

  std::vector<const StructureExpr*> leaves;
  collect_leaves(expr, leaves);
  std::map<const StructureExpr*, std::pair<int, int>> leaf_bits;  // leaf -> (offset, width)
  int remaining = total_bits;
  for (const auto* leaf : leaves) {
    const int w = exact_log2(leaf->units);
    remaining -= w;
    leaf_bits[leaf] = {remaining, w};
  }

  KeyTemplate t;
  t.n = n;
  t.letters = default_letters(n);
  t.equality = b.equality_index();
  t.priority.assign(b.size(), 0);
  for (std::size_t f = 0; f < b.size(); ++f) t.stratum_names.push_back(b.name(f));

  std::vector<int> owner(static_cast<std::size_t>(total_bits));
  for (int bit = 0; bit < total_bits; ++bit) owner[static_cast<std::size_t>(bit)] = bit_owner(b, bit);

  auto bits_of = [&](const StructureExpr* leaf) {
    std::vector<int> v;
    auto [off, w] = leaf_bits.at(leaf);
    for (int i = 0; i < w; ++i) v.push_back(off + i);
    return v;
  };

  std::vector<int> display_bits;
  auto name_columns = [&]() {
    std::map<int, int> count;
    for (int bit : display_bits) {
      const int o = owner[static_cast<std::size_t>(bit)];
      t.pseudo.push_back({b.name(static_cast<std::size_t>(o)) + std::to_string(++count[o]), o, bit});
    }
    t.m = t.pseudo.size();
  };
  auto column_of_bit = [&](int bit) {
    for (std::size_t p = 0; p < t.pseudo.size(); ++p)
      if (t.pseudo[p].bit == bit) return static_cast<int>(p);
    return -1;
  };

  // Stratum slots for one side: columns owned by identity_owner stay identity rows,
  // every other column gets stars on all earlier columns with a different owner.
  auto add_stratum_slots = [&](int side_index, int identity_owner, bool fixed) {
    const auto& side = t.sides[static_cast<std::size_t>(side_index)];
    int fixed_count = 0;
    for (std::size_t i = 0; i < side.columns.size(); ++i) {
      const int o = t.pseudo[static_cast<std::size_t>(side.columns[i])].owner;
      if (o == identity_owner) continue;
      GeneratorSlot s;
      s.kind = SlotKind::Stratum;
      s.stratum = o;
      s.side = side_index;
      s.pivot = static_cast<int>(i);
      for (std::size_t j = 0; j < i; ++j)
        if (t.pseudo[static_cast<std::size_t>(side.columns[j])].owner != o) s.stars.push_back(side.basic[j]);
      s.fixed = fixed;
      if (fixed) {
        // First admissible fill-ins: the nonzero rows in pool order.
        const std::uint32_t limit = (std::uint32_t{1} << s.stars.size()) - 1;
        s.fixed_fill = limit == 0 ? 0 : std::min<std::uint32_t>(static_cast<std::uint32_t>(++fixed_count), limit);
      }
      t.slots.push_back(std::move(s));
    }
  };
  auto add_treatment_slot = [&](int side_index, int factor) {
    GeneratorSlot s;
    s.kind = SlotKind::Treatment;
    s.stratum = b.universal_index();
    s.side = side_index;
    s.pivot = factor;
    s.stars = t.sides[static_cast<std::size_t>(side_index)].basic;
    t.slots.push_back(std::move(s));
  };

  if (is_chain(expr)) {
    if (split) throw Infeasible("a factor split applies only to crossed structures");
    const std::size_t m = static_cast<std::size_t>(total_bits);
    if (n < m) throw Infeasible("need at least " + std::to_string(m) + " treatment factors for " + std::to_string(b.N()) + " units");
    const std::size_t added = n - m;
    if (l0 && *l0 != added)
      throw Infeasible("n − l0 must equal log2(N) = " + std::to_string(m) + " for a chain of nestings");
    t.l0 = added;
    // Innermost (E-owned) columns first, then coarse to fine.
    for (int bit = 0; bit < total_bits; ++bit)
      if (owner[static_cast<std::size_t>(bit)] == b.equality_index()) display_bits.push_back(bit);
    for (std::size_t f = 0; f < b.size(); ++f)
      if (static_cast<int>(f) != b.equality_index())
        for (int bit = 0; bit < total_bits; ++bit)
          if (owner[static_cast<std::size_t>(bit)] == static_cast<int>(f)) display_bits.push_back(bit);
    name_columns();
    KeySide side;
    for (std::size_t i = 0; i < m; ++i) {
      side.basic.push_back(static_cast<int>(i));
      side.columns.push_back(static_cast<int>(i));
    }
    t.sides.push_back(side);
    add_stratum_slots(0, b.equality_index(), false);
    for (std::size_t f = m; f < n; ++f) add_treatment_slot(0, static_cast<int>(f));
    t.home.assign(n, b.equality_index());
  } else {
    // b/(r x c) or (r x c)
    const StructureExpr* blk = nullptr;
    const StructureExpr* cr = &expr;
    if (expr.kind == StructureExpr::Kind::Nest && expr.left->kind == StructureExpr::Kind::Leaf) {
      blk = expr.left.get();
      cr = expr.right.get();
    }
    if (cr->kind != StructureExpr::Kind::Cross || cr->left->kind != StructureExpr::Kind::Leaf ||
        cr->right->kind != StructureExpr::Kind::Leaf)
      throw Infeasible("design-key templates cover chains of nestings and blocked strip-plots b/(r x c)");
    if (!split) throw Infeasible("a crossed structure needs a rows/cols factor split");
    const auto rbits = bits_of(cr->left.get());
    const auto cbits = bits_of(cr->right.get());
    const auto bbits = blk ? bits_of(blk) : std::vector<int>{};
    if (rbits.empty() || cbits.empty()) throw Infeasible("row and column unit sets need at least two units each");
    const std::size_t l1 = bbits.size();
    const std::size_t r = rbits.size() + l1, c = cbits.size() + l1;
    if (split->rows.size() < r || split->cols.size() < c)
      throw Infeasible("the row design needs at least " + std::to_string(r) + " factors and the column design at least " +
                       std::to_string(c));
    t.crossed = true;
    display_bits = rbits;
    display_bits.insert(display_bits.end(), cbits.begin(), cbits.end());
    display_bits.insert(display_bits.end(), bbits.begin(), bbits.end());
    name_columns();
    const std::size_t added = n - t.m;
    if (l0 && *l0 != added) throw Infeasible("l0 must be " + std::to_string(added) + " for this crossed structure");
    t.l0 = added;

    const int row_owner = owner[static_cast<std::size_t>(rbits.front())];
    const int col_owner = owner[static_cast<std::size_t>(cbits.front())];
    KeySide rows, cols;
    for (std::size_t i = 0; i < r; ++i) {
      rows.basic.push_back(split->rows[i]);
      rows.columns.push_back(column_of_bit(i < rbits.size() ? rbits[i] : bbits[i - rbits.size()]));
    }
    for (std::size_t i = 0; i < c; ++i) {
      cols.basic.push_back(split->cols[i]);
      cols.columns.push_back(column_of_bit(i < cbits.size() ? cbits[i] : bbits[i - cbits.size()]));
    }
    t.sides = {rows, cols};
    add_stratum_slots(0, row_owner, false);
    add_stratum_slots(1, col_owner, true);
    for (std::size_t i = r; i < split->rows.size(); ++i) add_treatment_slot(0, split->rows[i]);
    for (std::size_t i = c; i < split->cols.size(); ++i) add_treatment_slot(1, split->cols[i]);
    t.home.assign(n, 0);
    for (int f : split->rows) t.home[static_cast<std::size_t>(f)] = row_owner;
    for (int f : split->cols) t.home[static_cast<std::size_t>(f)] = col_owner;
    t.priority[static_cast<std::size_t>(row_owner)] = static_cast<int>(split->rows.size() - r);
    t.priority[static_cast<std::size_t>(col_owner)] = static_cast<int>(split->cols.size() - c);
    if (blk) t.priority[static_cast<std::size_t>(owner[static_cast<std::size_t>(bbits.front())])] = static_cast<int>(l1);
  }

  // Stratum-major order: U first, then coarse to fine.
  std::stable_sort(t.slots.begin(), t.slots.end(),
                   [](const GeneratorSlot& a, const GeneratorSlot& c) { return a.stratum < c.stratum; });

  // Pools shared between slots of the same kind, stratum and width.
  for (auto& s : t.slots) {
    const int width = static_cast<int>(s.stars.size());
    auto it = std::find_if(t.pools.begin(), t.pools.end(), [&](const PoolSpec& p) {
      return p.kind == s.kind && p.stratum == s.stratum && p.width == width;
    });
    if (it == t.pools.end()) {
      std::string label = "Pool_" + b.name(static_cast<std::size_t>(s.stratum));
      if (std::any_of(t.pools.begin(), t.pools.end(), [&](const PoolSpec& p) { return p.label == label; }))
        label += "_" + std::to_string(width);
      t.pools.push_back({s.kind, s.stratum, width, label});
      it = t.pools.end() - 1;
    }
    s.pool = static_cast<int>(it - t.pools.begin());
  }

  // Stratum of every unit alias: inf over the owners of the bits it involves.
  if (t.m > 20) throw Infeasible("too many pseudo-factors");
  t.alias_stratum.assign(std::size_t{1} << t.m, b.universal_index());
  std::map<std::uint64_t, int> memo;
  for (std::uint32_t a = 1; a < (std::uint32_t{1} << t.m); ++a) {
    std::uint64_t owners = 0;
    for (std::size_t p = 0; p < t.m; ++p)
      if ((a >> p) & 1U) owners |= std::uint64_t{1} << t.pseudo[p].owner;
    auto [it, fresh] = memo.emplace(owners, -1);
    if (fresh) {
      UnitFactor meet = UnitFactor::universal(b.N());
      for (std::size_t f = 0; f < b.size(); ++f)
        if ((owners >> f) & 1U) meet = inf(meet, b.factor(f));
      it->second = b.find(meet);
      if (it->second < 0) throw NotOrthogonal("structure is not closed under inf");
    }
    t.alias_stratum[a] = it->second;
  }
  return t;
}

// --------------------------------------------------------------------- pools

PoolMatrix pool_for(const KeyTemplate& t, std::size_t pool_index, bool reduced) {
  const auto& spec = t.pools.at(pool_index);
  PoolMatrix p;
  p.stratum = spec.stratum;
  p.label = spec.label;
  p.width = spec.width;
  p.reduced = reduced;
  const std::uint32_t total = std::uint32_t{1} << spec.width;
  for (std::uint32_t r = 0; r < total; ++r) {
    if (reduced && spec.width > 0) {
      if (spec.kind == SlotKind::Treatment && std::popcount(r) < 2) continue;
      if (spec.kind == SlotKind::Stratum && r == 0) continue;
    }
    p.rows.push_back(r);
  }
  return p;
}

PoolMatrix pool_for_stratum(const KeyTemplate& t, int stratum, bool reduced) {
  for (const auto& s : t.slots)
    if (s.stratum == stratum && !s.fixed) return pool_for(t, static_cast<std::size_t>(s.pool), reduced);
  throw Infeasible("no generator slots in stratum " + t.stratum_names.at(static_cast<std::size_t>(stratum)));
}

std::vector<PoolMatrix> make_pools(const KeyTemplate& t, bool reduced) {
  std::vector<PoolMatrix> out;
  for (std::size_t i = 0; i < t.pools.size(); ++i) out.push_back(pool_for(t, i, reduced));
  return out;
}

// ------------------------------------------------------------------ assembly

std::vector<std::uint32_t> factor_aliases(const KeyTemplate& t, const GeneratorSet& gs) {
  if (gs.fill.size() != t.slots.size()) throw DimensionMismatch("generator set does not match the template");
  std::vector<std::uint32_t> alias(t.n, 0);
  for (std::size_t si = 0; si < t.sides.size(); ++si) {
    const auto& side = t.sides[si];
    const std::size_t k = side.basic.size();
    std::vector<std::uint32_t> h(k);
    for (std::size_t i = 0; i < k; ++i) h[i] = std::uint32_t{1} << i;
    for (std::size_t s = 0; s < t.slots.size(); ++s) {
      const auto& slot = t.slots[s];
      if (slot.kind != SlotKind::Stratum || slot.side != static_cast<int>(si)) continue;
      for (std::size_t q = 0; q < slot.stars.size(); ++q)
        if ((gs.fill[s] >> q) & 1U) {
          const auto pos = std::find(side.basic.begin(), side.basic.end(), slot.stars[q]) - side.basic.begin();
          h[static_cast<std::size_t>(slot.pivot)] |= std::uint32_t{1} << pos;
        }
    }
    std::vector<std::uint32_t> kl;
    if (!invert_small(h, kl)) throw SingularKey("design key is singular");
    for (std::size_t i = 0; i < k; ++i) {
      std::uint32_t a = 0;
      for (std::size_t j = 0; j < k; ++j)
        if ((kl[i] >> j) & 1U) a |= std::uint32_t{1} << side.columns[j];
      alias[static_cast<std::size_t>(side.basic[i])] = a;
    }
  }
  for (std::size_t s = 0; s < t.slots.size(); ++s) {
    const auto& slot = t.slots[s];
    if (slot.kind != SlotKind::Treatment) continue;
    std::uint32_t a = 0;
    for (std::size_t q = 0; q < slot.stars.size(); ++q)
      if ((gs.fill[s] >> q) & 1U) a ^= alias[static_cast<std::size_t>(slot.stars[q])];
    alias[static_cast<std::size_t>(slot.pivot)] = a;
  }
  return alias;
}

BitMatrix design_key(const KeyTemplate& t, const GeneratorSet& gs) {
  const auto alias = factor_aliases(t, gs);
  std::vector<BitVector> rows;
  for (auto a : alias) rows.push_back(BitVector::from_u64(t.m, a));
  std::vector<std::string> cols;
  for (const auto& p : t.pseudo) cols.push_back(p.name);
  return BitMatrix(std::move(rows), t.letters, cols);
}

std::vector<GeneratorWord> generator_words(const KeyTemplate& t, const GeneratorSet& gs) {
  std::vector<GeneratorWord> out;
  auto word_of = [&](std::size_t s) {
    const auto& slot = t.slots[s];
    BitVector w(t.n);
    w.set(static_cast<std::size_t>(slot_row(t, slot)));
    for (std::size_t q = 0; q < slot.stars.size(); ++q)
      if ((gs.fill[s] >> q) & 1U) w.flip(static_cast<std::size_t>(slot.stars[q]));
    return w;
  };
  for (std::size_t s = 0; s < t.slots.size(); ++s) out.push_back({t.slots[s].stratum, word_of(s), false});
  if (t.crossed) {
    // Each shared blocking column pairs a row-side and a column-side generator.
    std::vector<std::size_t> row_b, col_b;
    for (std::size_t s = 0; s < t.slots.size(); ++s)
      if (t.slots[s].kind == SlotKind::Stratum) (t.slots[s].side == 0 ? row_b : col_b).push_back(s);
    for (std::size_t i = 0; i < std::min(row_b.size(), col_b.size()); ++i)
      out.push_back({0, word_of(row_b[i]) ^ word_of(col_b[i]), true});
  }
  return out;
}

bool aliases_admissible(const KeyTemplate& t, const GeneratorSet& gs, const std::vector<std::uint32_t>& aliases,
                        const KeyOptions& opt) {
  if (rank_small(aliases) != t.m) return false;
  if (opt.distinct) {
    for (std::size_t a = 0; a < t.slots.size(); ++a)
      for (std::size_t c = a + 1; c < t.slots.size(); ++c)
        if (!t.slots[a].fixed && !t.slots[c].fixed && t.slots[a].stratum == t.slots[c].stratum &&
            t.slots[a].pool == t.slots[c].pool && gs.fill[a] == gs.fill[c])
          return false;
  }
  if (opt.reduced) {
    for (std::size_t f = 0; f < t.n; ++f) {
      if (aliases[f] == 0) return false;
      if (t.alias_stratum[aliases[f]] != t.home[f]) return false;
      for (std::size_t g = f + 1; g < t.n; ++g)
        if (aliases[f] == aliases[g]) return false;
    }
  }
  return true;
}

bool key_admissible(const KeyTemplate& t, const GeneratorSet& gs, const KeyOptions& opt) {
  std::vector<std::uint32_t> a;
  try {
    a = factor_aliases(t, gs);
  } catch (const SingularKey&) {
    return false;
  }
  return aliases_admissible(t, gs, a, opt);
}

// ---------------------------------------------------------------- algorithms

namespace {

GeneratorSet blank_set(const KeyTemplate& t) {
  GeneratorSet gs;
  for (const auto& s : t.slots) gs.fill.push_back(s.fixed ? s.fixed_fill : 0);
  return gs;
}

bool draw_strata(const KeyTemplate& t, const std::vector<PoolMatrix>& pools, Rng& rng, const KeyOptions& opt,
                 GeneratorSet& gs) {
  for (std::size_t s = 0; s < t.slots.size(); ++s) {
    const auto& slot = t.slots[s];
    if (slot.fixed || slot.kind != SlotKind::Stratum) continue;
    const auto& pool = pools.at(static_cast<std::size_t>(slot.pool));
    std::vector<std::uint32_t> cands;
    for (auto r : pool.rows) {
      bool ok = true;
      if (opt.distinct)
        for (std::size_t o = 0; o < s && ok; ++o)
          if (!t.slots[o].fixed && t.slots[o].stratum == slot.stratum && t.slots[o].pool == slot.pool && gs.fill[o] == r)
            ok = false;
      if (ok) cands.push_back(r);
    }
    if (cands.empty()) return false;
    gs.fill[s] = cands[uniform_index(rng, cands.size())];
  }
  if (!opt.reduced) return true;
  std::vector<std::uint32_t> alias;
  try {
    alias = factor_aliases(t, gs);
  } catch (const SingularKey&) {
    return false;
  }
  for (const auto& side : t.sides)
    for (int f : side.basic)
      if (t.alias_stratum[alias[static_cast<std::size_t>(f)]] != t.home[static_cast<std::size_t>(f)]) return false;
  return true;
}

bool draw_treatments(const KeyTemplate& t, const std::vector<PoolMatrix>& pools, Rng& rng, const KeyOptions& opt,
                     GeneratorSet& gs) {
  std::vector<std::uint32_t> alias;
  try {
    alias = factor_aliases(t, gs);
  } catch (const SingularKey&) {
    return false;
  }
  std::vector<char> defined(t.n, 0);
  for (const auto& side : t.sides)
    for (int f : side.basic) defined[static_cast<std::size_t>(f)] = 1;
  for (std::size_t s = 0; s < t.slots.size(); ++s) {
    const auto& slot = t.slots[s];
    if (slot.kind != SlotKind::Treatment || slot.fixed) continue;
    const auto& pool = pools.at(static_cast<std::size_t>(slot.pool));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cands;  // (fill, alias)
    for (auto r : pool.rows) {
      std::uint32_t a = 0;
      for (std::size_t q = 0; q < slot.stars.size(); ++q)
        if ((r >> q) & 1U) a ^= alias[static_cast<std::size_t>(slot.stars[q])];
      bool ok = true;
      if (opt.reduced) {
        ok = a != 0 && t.alias_stratum[a] == t.home[static_cast<std::size_t>(slot.pivot)];
        for (std::size_t f = 0; f < t.n && ok; ++f)
          if (defined[f] && alias[f] == a) ok = false;
      }
      if (ok && opt.distinct)
        for (std::size_t o = 0; o < s && ok; ++o)
          if (!t.slots[o].fixed && t.slots[o].stratum == slot.stratum && t.slots[o].pool == slot.pool && gs.fill[o] == r)
            ok = false;
      if (ok) cands.emplace_back(r, a);
    }
    if (cands.empty()) return false;
    const auto& pick = cands[uniform_index(rng, cands.size())];
    gs.fill[s] = pick.first;
    alias[static_cast<std::size_t>(slot.pivot)] = pick.second;
    defined[static_cast<std::size_t>(slot.pivot)] = 1;
  }
  return true;
}

}  // namespace

GeneratorSet algorithm1_complete(const KeyTemplate& t, const std::vector<PoolMatrix>& pools, Rng& rng,
                                 const KeyOptions& opt) {
  for (int attempt = 0; attempt < opt.retry_cap; ++attempt) {
    GeneratorSet gs = blank_set(t);
    if (draw_strata(t, pools, rng, opt, gs)) return gs;
  }
  throw ExhaustedRetries("no admissible design key after " + std::to_string(opt.retry_cap) + " attempts");
}

GeneratorSet algorithm2_fractional(const KeyTemplate& t, const std::vector<PoolMatrix>& pools, Rng& rng,
                                   const KeyOptions& opt) {
  if (t.l0 == 0) return algorithm1_complete(t, pools, rng, opt);
  for (int attempt = 0; attempt < opt.retry_cap; ++attempt) {
    GeneratorSet gs = blank_set(t);
    if (draw_strata(t, pools, rng, opt, gs) && draw_treatments(t, pools, rng, opt, gs) && key_admissible(t, gs, opt))
      return gs;
  }
  throw ExhaustedRetries("no admissible design key after " + std::to_string(opt.retry_cap) + " attempts");
}

// ----------------------------------------------------------------- expansion

DesignTable expand_design(const KeyTemplate& t, const GeneratorSet& gs, const BlockStructure& b) {
  if (b.N() != (std::size_t{1} << t.m)) throw DimensionMismatch("structure does not match the template");
  const auto alias = factor_aliases(t, gs);
  DesignTable d(t.letters, b.N());
  for (std::size_t u = 0; u < b.N(); ++u) {
    std::uint32_t y = 0;
    for (std::size_t p = 0; p < t.m; ++p)
      if ((u >> t.pseudo[p].bit) & 1U) y |= std::uint32_t{1} << p;
    for (std::size_t f = 0; f < t.n; ++f) d.at(u, f) = (std::popcount(alias[f] & y) & 1) ? -1 : 1;
  }
  return d;
}

StratifiedWordSet words_by_stratum(const KeyTemplate& t, const GeneratorSet& gs, const BlockStructure& b) {
  if (t.n > 20) throw Infeasible("word enumeration is limited to 20 factors");
  const auto alias = factor_aliases(t, gs);
  StratifiedWordSet ws;
  ws.n = t.n;
  for (std::size_t f = 0; f < b.size(); ++f) ws.strata.push_back(b.name(f));
  ws.by_stratum.resize(b.size());
  std::uint32_t word = 0, a = 0;
  for (std::uint32_t i = 1; i < (std::uint32_t{1} << t.n); ++i) {
    const int flip = std::countr_zero(i);
    word ^= std::uint32_t{1} << flip;
    a ^= alias[static_cast<std::size_t>(flip)];
    ws.by_stratum[static_cast<std::size_t>(t.alias_stratum[a])].push_back(
        {BitVector::from_u64(t.n, word), std::popcount(word)});
  }
  return ws;
}

}  // namespace msd
