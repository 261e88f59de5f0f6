#include <algorithm>
#include <bit>
#include <cmath>

#include "msd/errors.hpp"
#include "msd/sib.hpp"
#include "sib_driver.hpp"

namespace msd {

NonregularProblem::NonregularProblem(BlockStructure b, std::vector<std::string> names, std::vector<FactorSet> sequence,
                                     Constraints constraints, std::optional<CrossedLayout> layout)
    : b_(std::move(b)), names_(std::move(names)), seq_(std::move(sequence)), cons_(std::move(constraints)),
      layout_(std::move(layout)) {
  const std::size_t n = names_.size();
  const std::size_t N = b_.N();
  if (n == 0 || n > 16) throw DimensionMismatch("nonregular search supports 1 to 16 factors");
  for (const auto& g : seq_)
    if (!is_admissible(b_, g)) throw NotAdmissible(describe_set(b_, g) + " is not an admissible criterion subset");

  std::vector<std::uint32_t> expand;
  if (layout_) {
    const auto& l = *layout_;
    std::vector<char> seen(n, 0);
    for (const auto* side : {&l.searched_factors, &l.fixed_factors})
      for (int f : *side) {
        if (f < 0 || static_cast<std::size_t>(f) >= n || seen[static_cast<std::size_t>(f)])
          throw DimensionMismatch("crossed layout must assign every factor to exactly one side");
        seen[static_cast<std::size_t>(f)] = 1;
      }
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n))
      throw DimensionMismatch("crossed layout must assign every factor to exactly one side");
    const std::size_t runs = l.fixed_runs.size();
    if (runs == 0 || N % runs != 0)
      throw DimensionMismatch("fixed sub-design size " + std::to_string(runs) + " does not divide " +
                              std::to_string(N) + " units");
    if (!cons_.constant.empty()) throw Infeasible("stratum constancy constraints need the direct layout");
    width_ = l.searched_factors.size();
    positions_ = N / runs;
    for (const auto& run : l.fixed_runs) {
      if (run.size() != l.fixed_factors.size()) throw DimensionMismatch("fixed run has the wrong length");
      std::uint32_t mask = 0;
      for (std::size_t c = 0; c < run.size(); ++c)
        if (run[c] == -1) mask |= std::uint32_t{1} << l.fixed_factors[c];
        else if (run[c] != 1) throw FormatError("fixed runs must be coded as ±1");
      fixed_masks_.push_back(mask);
    }
    units_of_.resize(positions_);
    for (std::size_t p = 0; p < positions_; ++p)
      for (std::size_t k = 0; k < runs; ++k)
        units_of_[p].push_back(l.searched_outer ? p * runs + k : k * positions_ + p);
    for (std::uint32_t r = 0; r < (std::uint32_t{1} << width_); ++r) {
      std::uint32_t m = 0;
      for (std::size_t c = 0; c < width_; ++c)
        if ((r >> c) & 1U) m |= std::uint32_t{1} << l.searched_factors[c];
      expand.push_back(m);
    }
  } else {
    width_ = n;
    positions_ = N;
    fixed_masks_ = {0};
    units_of_.resize(N);
    for (std::size_t p = 0; p < N; ++p) units_of_[p] = {p};
    for (std::uint32_t r = 0; r < (std::uint32_t{1} << n); ++r) expand.push_back(r);
  }
  for (const auto& fc : cons_.forbidden)
    if (fc.factors.size() != fc.levels.size() || fc.factors.empty())
      throw FormatError("forbidden combination needs matching factor and level lists");
  for (const auto& sc : cons_.constant)
    if (sc.factor < 0 || static_cast<std::size_t>(sc.factor) >= n || sc.unit_factor < 0 ||
        static_cast<std::size_t>(sc.unit_factor) >= b_.size())
      throw DimensionMismatch("constancy constraint refers to an unknown factor");

  auto hits = [&](std::uint32_t run, const ForbiddenCombination& fc) {
    for (std::size_t i = 0; i < fc.factors.size(); ++i) {
      const bool minus = (run >> fc.factors[i]) & 1U;
      if (minus != (fc.levels[i] == -1)) return false;
    }
    return true;
  };
  for (std::uint32_t r = 0; r < (std::uint32_t{1} << width_); ++r) {
    bool ok = true;
    for (auto fm : fixed_masks_)
      for (const auto& fc : cons_.forbidden)
        if (hits(expand[r] | fm, fc)) ok = false;
    if (ok) pool_.push_back(r);
  }
  if (pool_.empty()) throw EmptyCandidateSet("every candidate run is forbidden");

  coef_.assign(seq_.size() * b_.size(), 0);
  for (std::size_t j = 0; j < seq_.size(); ++j)
    for (int f : seq_[j])
      for (std::size_t g = 0; g < b_.size(); ++g)
        coef_[j * b_.size() + g] += b_.mobius(static_cast<std::size_t>(f), g) * b_.factor(g).n_classes();
  sum_layout_ = std::make_shared<const SumLayout>(*this);
}

std::int64_t NonregularProblem::scale() const { return static_cast<std::int64_t>(b_.N() * b_.N()); }

std::uint32_t NonregularProblem::full_run(std::size_t, std::size_t k, std::uint32_t row) const {
  if (!layout_) return row;
  std::uint32_t m = fixed_masks_[k];
  for (std::size_t c = 0; c < width_; ++c)
    if ((row >> c) & 1U) m |= std::uint32_t{1} << layout_->searched_factors[c];
  return m;
}

bool NonregularProblem::row_allowed(std::span<const std::uint32_t> rows, std::span<const char> filled,
                                    std::size_t pos, std::uint32_t row) const {
  if (!cons_.distinct_rows && cons_.constant.empty()) return true;
  for (std::size_t o = 0; o < positions_; ++o) {
    if (o == pos || !filled[o]) continue;
    if (cons_.distinct_rows && rows[o] == row) return false;
    for (const auto& sc : cons_.constant) {
      const auto& f = b_.factor(static_cast<std::size_t>(sc.unit_factor));
      if (f.class_at(pos) != f.class_at(o)) continue;
      if (((row ^ rows[o]) >> sc.factor) & 1U) return false;
    }
  }
  return true;
}

bool NonregularProblem::satisfies(std::span<const std::uint32_t> rows) const {
  if (rows.size() != positions_) return false;
  std::vector<char> filled(positions_, 1);
  for (std::size_t p = 0; p < positions_; ++p) {
    if (!std::binary_search(pool_.begin(), pool_.end(), rows[p])) return false;
    if (!row_allowed(rows, filled, p, rows[p])) return false;
  }
  return true;
}

std::vector<std::uint32_t> NonregularProblem::random_particle(Rng& rng) const {
  std::vector<std::uint32_t> rows(positions_, 0);
  std::vector<char> filled(positions_, 0);
  std::vector<std::uint32_t> cands;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::fill(filled.begin(), filled.end(), 0);
    bool ok = true;
    for (std::size_t p = 0; p < positions_ && ok; ++p) {
      cands.clear();
      for (auto r : pool_)
        if (row_allowed(rows, filled, p, r)) cands.push_back(r);
      if (cands.empty()) ok = false;
      else {
        rows[p] = cands[uniform_index(rng, cands.size())];
        filled[p] = 1;
      }
    }
    if (ok) return rows;
  }
  throw ExhaustedRetries("no assignment satisfies the constraints after 100 attempts");
}

Score NonregularProblem::score_from_q(std::span<const std::int64_t> q) const {
  const std::size_t nb = b_.size(), n = names_.size();
  Score s(seq_.size() * n, 0);
  for (std::size_t j = 0; j < seq_.size(); ++j)
    for (std::size_t k = 0; k < n; ++k) {
      std::int64_t acc = 0;
      for (std::size_t g = 0; g < nb; ++g) acc += coef_[j * nb + g] * q[k * nb + g];
      s[j * n + k] = acc;
    }
  return s;
}

CriterionVector NonregularProblem::criterion(const Score& s) const {
  CriterionVector c;
  for (auto v : s) c.emplace_back(v, scale());
  return c;
}

DesignTable NonregularProblem::design(std::span<const std::uint32_t> rows) const {
  DesignTable d(names_, b_.N());
  for (std::size_t p = 0; p < positions_; ++p)
    for (std::size_t k = 0; k < units_of_[p].size(); ++k) {
      const auto run = full_run(p, k, rows[p]);
      for (std::size_t c = 0; c < names_.size(); ++c) d.at(units_of_[p][k], c) = ((run >> c) & 1U) ? -1 : 1;
    }
  return d;
}

WordlengthTable NonregularProblem::table(std::span<const std::uint32_t> rows) const {
  return ClassSumEvaluator(b_, names_.size()).table(design(rows));
}

// Static bookkeeping for class sums: per position and unit factor, the distinct classes
// its units fall in, and each unit's slot among them.
struct SumLayout {
  struct Touch {
    std::vector<std::size_t> cls;    // global class ids, grouped by active factor
    std::vector<std::size_t> begin;  // group boundaries per active factor
    std::vector<std::size_t> slot;   // [a * units + k] -> index into cls
  };
  std::size_t classes = 0;
  std::vector<std::size_t> active;  // unit factors with a nonzero weight in some criterion set
  std::vector<Touch> touch;

  explicit SumLayout(const NonregularProblem& pr) {
    const auto& b = pr.structure();
    const auto& coef = pr.set_coefficients();
    std::vector<std::size_t> offset;
    for (std::size_t g = 0; g < b.size(); ++g) {
      offset.push_back(classes);
      classes += static_cast<std::size_t>(b.factor(g).n_classes());
      bool used = false;
      for (std::size_t j = 0; j * b.size() < coef.size(); ++j) used = used || coef[j * b.size() + g] != 0;
      if (used) active.push_back(g);
    }
    touch.resize(pr.positions());
    for (std::size_t p = 0; p < pr.positions(); ++p) {
      const auto& units = pr.units_of(p);
      auto& t = touch[p];
      t.slot.assign(active.size() * units.size(), 0);
      t.begin.push_back(0);
      for (std::size_t a = 0; a < active.size(); ++a) {
        const auto& f = b.factor(active[a]);
        std::vector<std::size_t> local;
        for (std::size_t k = 0; k < units.size(); ++k) {
          const auto c = offset[active[a]] + static_cast<std::size_t>(f.class_at(units[k]));
          auto it = std::find(local.begin(), local.end(), c);
          if (it == local.end()) {
            local.push_back(c);
            it = local.end() - 1;
          }
          t.slot[a * units.size() + k] = t.cls.size() + static_cast<std::size_t>(it - local.begin());
        }
        t.cls.insert(t.cls.end(), local.begin(), local.end());
        t.begin.push_back(t.cls.size());
      }
    }
  }
};

namespace {

// Class sums of every factorial column u_S over every unit factor, with Q_{k,G} kept
// current, so that changing one position costs O(2^n · units per position).
class SumState {
public:
  SumState(const NonregularProblem& pr, std::span<const std::uint32_t> rows, std::span<const char> filled)
      : pr_(pr), lay_(pr.sum_layout()), n_(pr.n()), nb_(pr.structure().size()), subsets_(std::size_t{1} << n_) {
    sums_.assign(subsets_ * lay_.classes, 0);
    q_.assign(n_ * nb_, 0);
    dq_.assign(n_ * nb_, 0);
    qt_.assign(n_ * nb_, 0);
    for (std::size_t p = 0; p < pr.positions(); ++p)
      if (filled[p]) apply(p, std::nullopt, rows[p]);
  }

  const std::vector<std::int64_t>& q() const { return q_; }
  Score score() const { return pr_.score_from_q(q_); }

  // Criterion after position p goes from `from` to `to` (nullopt = empty); state unchanged.
  const Score& eval(std::size_t p, std::optional<std::uint32_t> from, std::optional<std::uint32_t> to) {
    std::fill(dq_.begin(), dq_.end(), 0);
    walk(p, from, to, [&](std::size_t S, std::size_t k, std::size_t g, std::size_t cls, int d) {
      const std::int64_t s = sums_[S * lay_.classes + cls];
      dq_[k * nb_ + g] += 2 * s * d + static_cast<std::int64_t>(d) * d;
    });
    for (std::size_t i = 0; i < q_.size(); ++i) qt_[i] = q_[i] + dq_[i];
    score_ = pr_.score_from_q(qt_);
    return score_;
  }

  void apply(std::size_t p, std::optional<std::uint32_t> from, std::optional<std::uint32_t> to) {
    walk(p, from, to, [&](std::size_t S, std::size_t k, std::size_t g, std::size_t cls, int d) {
      auto& s = sums_[S * lay_.classes + cls];
      q_[k * nb_ + g] += 2 * static_cast<std::int64_t>(s) * d + static_cast<std::int64_t>(d) * d;
      s += d;
    });
  }

private:
  // Visits every nonzero subset S in Gray order; f(S, |S| - 1, g, class, change in class sum).
  template <class F>
  void walk(std::size_t p, std::optional<std::uint32_t> from, std::optional<std::uint32_t> to, F f) {
    const auto& units = pr_.units_of(p);
    const auto& t = lay_.touch[p];
    const std::size_t K = units.size();
    ra_.resize(K);
    rb_.resize(K);
    sa_.assign(K, from ? 1 : 0);
    sb_.assign(K, to ? 1 : 0);
    du_.resize(K);
    buf_.resize(t.cls.size());
    for (std::size_t k = 0; k < K; ++k) {
      ra_[k] = from ? pr_.full_run(p, k, *from) : 0;
      rb_[k] = to ? pr_.full_run(p, k, *to) : 0;
    }
    std::size_t S = 0;
    int len = 0;
    for (std::size_t i = 1; i < subsets_; ++i) {
      const int bit = std::countr_zero(i);
      S ^= std::size_t{1} << bit;
      len += ((S >> bit) & 1U) ? 1 : -1;
      bool any = false;
      for (std::size_t k = 0; k < K; ++k) {
        if ((ra_[k] >> bit) & 1U) sa_[k] = -sa_[k];
        if ((rb_[k] >> bit) & 1U) sb_[k] = -sb_[k];
        du_[k] = sb_[k] - sa_[k];
        any = any || du_[k] != 0;
      }
      if (!any) continue;
      const auto order = static_cast<std::size_t>(len - 1);
      const auto& act = lay_.active;
      if (K == 1) {
        for (std::size_t a = 0; a < act.size(); ++a) f(S, order, act[a], t.cls[a], du_[0]);
        continue;
      }
      std::fill(buf_.begin(), buf_.end(), 0);
      for (std::size_t a = 0; a < act.size(); ++a)
        for (std::size_t k = 0; k < K; ++k) buf_[t.slot[a * K + k]] += du_[k];
      for (std::size_t a = 0; a < act.size(); ++a)
        for (std::size_t c = t.begin[a]; c < t.begin[a + 1]; ++c)
          if (buf_[c] != 0) f(S, order, act[a], t.cls[c], buf_[c]);
    }
  }

  const NonregularProblem& pr_;
  const SumLayout& lay_;
  std::size_t n_, nb_, subsets_;
  std::vector<int> sums_;
  std::vector<std::int64_t> q_, dq_, qt_;
  Score score_;
  std::vector<std::uint32_t> ra_, rb_;
  std::vector<int> sa_, sb_, du_, buf_;
};

}  // namespace

Score NonregularProblem::score(std::span<const std::uint32_t> rows) const {
  std::vector<char> filled(positions_, 1);
  return SumState(*this, rows, filled).score();
}

namespace {

// X with q runs greedily deleted and q runs greedily added back from `source` (the
// whole pool when the source has no admissible run). Ties are broken at random.
NonregularParticle mix_with(const NonregularProblem& pr, const NonregularParticle& x, SumState st, int q,
                            const std::vector<std::uint32_t>& source, Rng& rng) {
  const std::size_t P = pr.positions();
  std::vector<std::uint32_t> rows = x.rows;
  std::vector<char> filled(P, 1);

  for (int d = 0; d < q; ++d) {
    std::optional<Score> best;
    std::size_t pick = 0, ties = 0;
    for (std::size_t p = 0; p < P; ++p) {
      if (!filled[p]) continue;
      const auto& s = st.eval(p, rows[p], std::nullopt);
      if (!best || s < *best) {
        best = s;
        pick = p;
        ties = 1;
      } else if (s == *best && uniform_index(rng, ++ties) == 0) {
        pick = p;
      }
    }
    st.apply(pick, rows[pick], std::nullopt);
    filled[pick] = 0;
  }

  std::vector<std::uint32_t> cands = source;
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  for (int a = 0; a < q; ++a) {
    std::optional<Score> best;
    std::size_t hole = 0, ties = 0;
    std::uint32_t row = 0;
    auto consider = [&](const std::vector<std::uint32_t>& from) {
      for (std::size_t p = 0; p < P; ++p) {
        if (filled[p]) continue;
        for (auto r : from) {
          if (!pr.row_allowed(rows, filled, p, r)) continue;
          const auto& s = st.eval(p, std::nullopt, r);
          if (!best || s < *best) {
            best = s;
            hole = p;
            row = r;
            ties = 1;
          } else if (s == *best && uniform_index(rng, ++ties) == 0) {
            hole = p;
            row = r;
          }
        }
      }
    };
    consider(cands);
    if (!best) consider(pr.pool());
    if (!best) throw EmptyCandidateSet("constraints exclude every addition");
    st.apply(hole, std::nullopt, row);
    rows[hole] = row;
    filled[hole] = 1;
  }
  NonregularParticle y{std::move(rows), {}};
  y.score = pr.score_from_q(st.q());
  return y;
}

}  // namespace

NonregularParticle mix_nonregular(const NonregularProblem& pr, const NonregularParticle& x,
                                  const NonregularParticle& gb, const NonregularParticle& lb, const QVector& q,
                                  Rng& rng) {
  if (q.gb.size() != 1 || q.lb.size() != 1 || q.nw.size() != 1)
    throw InvalidQ("nonregular q takes one value per source");
  if (q.gb[0] < 0 || q.lb[0] < 0 || q.nw[0] < 0) throw InvalidQ("q entries must be nonnegative");
  const auto total = static_cast<std::size_t>(q.total());
  if (total > pr.positions())
    throw InvalidQ("q_gb + q_lb + q_new = " + std::to_string(total) + " exceeds " + std::to_string(pr.positions()) +
                   " positions");
  if (total == 0) return x;

  // mixwGB, mixwLB and mixwNEW each start from X; the best of them is the mixing particle.
  // X^NEW is a fresh random particle, so its runs are random draws from the pool.
  const auto fresh = pr.random_particle(rng);
  const std::pair<int, const std::vector<std::uint32_t>*> plan[] = {
      {q.gb[0], &gb.rows}, {q.lb[0], &lb.rows}, {q.nw[0], &fresh}};
  const std::vector<char> all(pr.positions(), 1);
  const SumState base(pr, x.rows, all);
  std::optional<NonregularParticle> best;
  for (const auto& [count, source] : plan) {
    if (count == 0) continue;
    auto y = mix_with(pr, x, base, count, *source, rng);
    if (!best || y.score < best->score) best = std::move(y);
  }
  return *best;
}

NonregularParticle perturb_nonregular(const NonregularProblem& pr, const NonregularParticle& x, int q_new,
                                      Rng& rng) {
  const std::size_t P = pr.positions();
  std::vector<std::size_t> order(P);
  for (std::size_t p = 0; p < P; ++p) order[p] = p;
  std::shuffle(order.begin(), order.end(), rng);
  NonregularParticle y = x;
  std::vector<char> filled(P, 1);
  bool changed = false;
  std::vector<std::uint32_t> cands;
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(std::max(q_new, 0)), P);
  for (std::size_t i = 0; i < take; ++i) {
    const auto p = order[i];
    cands.clear();
    for (auto r : pr.pool())
      if (r != y.rows[p] && pr.row_allowed(y.rows, filled, p, r)) cands.push_back(r);
    if (cands.empty()) continue;
    y.rows[p] = cands[uniform_index(rng, cands.size())];
    changed = true;
  }
  if (changed) y.score = pr.score(y.rows);
  return y;
}

MoveResult<NonregularParticle> move_particle(const NonregularProblem& pr, const NonregularParticle& candidate,
                                             const NonregularParticle& current, const NonregularParticle& local_best,
                                             const QVector& q, Rng& rng) {
  MoveResult<NonregularParticle> r{current, local_best, false};
  if (!(candidate.score < current.score)) {
    r.current = perturb_nonregular(pr, current, q.nw.empty() ? 0 : q.nw[0], rng);
    r.perturbed = true;
  } else {
    r.current = candidate;
  }
  if (r.current.score < r.local_best.score) r.local_best = r.current;
  return r;
}

NonregularSearchResult run_algorithm4(const NonregularProblem& pr, const SearchOptions& opt) {
  auto init = [&](Rng& rng) {
    NonregularParticle p;
    p.rows = pr.random_particle(rng);
    p.score = pr.score(p.rows);
    return p;
  };
  auto step = [&](NonregularParticle& cur, NonregularParticle& lb, const NonregularParticle& gb, Rng& rng) {
    const auto cand = mix_nonregular(pr, cur, gb, lb, opt.q, rng);
    auto m = move_particle(pr, cand, cur, lb, opt.q, rng);
    cur = std::move(m.current);
    lb = std::move(m.local_best);
  };
  auto audit = [&](const NonregularParticle& p) {
    if (opt.audit_nonregular) opt.audit_nonregular(p.rows);
  };
  auto out = detail::run_swarm<NonregularParticle>(opt, init, step, audit);

  NonregularSearchResult res;
  res.best = out.best;
  res.table = pr.table(out.best.rows);
  for (auto& p : out.co_optimal) res.co_optimal.push_back(std::move(p.rows));
  for (std::size_t i = 0; i < out.trace.size(); ++i) res.trace.push_back({i, pr.criterion(out.trace[i])});
  res.iterations = out.iterations;
  res.seconds = out.seconds;
  return res;
}

NonregularOracleResult nonregular_oracle(const NonregularProblem& pr, double cap) {
  NonregularOracleResult res;
  const std::size_t P = pr.positions();
  res.space = std::pow(static_cast<double>(pr.pool().size()), static_cast<double>(P));
  if (res.space > cap) throw SpaceTooLarge(res.space, cap);
  std::vector<std::size_t> idx(P, 0);
  std::vector<std::uint32_t> rows(P);
  constexpr std::size_t keep = 8;
  while (true) {
    for (std::size_t p = 0; p < P; ++p) rows[p] = pr.pool()[idx[p]];
    if (pr.satisfies(rows)) {
      auto sc = pr.score(rows);
      if (res.optimum_count == 0 || sc < res.best) {
        res.best = std::move(sc);
        res.optima.assign(1, rows);
        res.optimum_count = 1;
      } else if (sc == res.best) {
        ++res.optimum_count;
        if (res.optima.size() < keep) res.optima.push_back(rows);
      }
    }
    std::size_t p = 0;
    for (; p < P; ++p) {
      if (++idx[p] < pr.pool().size()) break;
      idx[p] = 0;
    }
    if (p == P) break;
  }
  return res;
}

}  // namespace msd
