#include <algorithm>
#include <numeric>

#include "msd/errors.hpp"
#include "msd/sib.hpp"
#include "sib_driver.hpp"

namespace msd {

RegularProblem::RegularProblem(BlockStructure b, KeyTemplate t, KeyOptions opt, std::vector<FactorSet> sequence)
    : b_(std::move(b)), t_(std::move(t)), opt_(opt), seq_(std::move(sequence)) {
  for (const auto& g : seq_)
    if (!is_admissible(b_, g)) throw NotAdmissible(describe_set(b_, g) + " is not an admissible criterion subset");
  pools_ = make_pools(t_, opt_.reduced);
}

std::vector<int> RegularProblem::capacity() const {
  std::vector<int> c;
  for (int s : t_.strata()) c.push_back(static_cast<int>(t_.slots_in(s).size()));
  return c;
}

Score RegularProblem::score(const GeneratorSet& gs) const {
  const auto alias = factor_aliases(t_, gs);
  const auto counts = alias_word_counts(alias, t_.alias_stratum, b_.size());
  Score s;
  s.reserve(seq_.size() * t_.n);
  for (const auto& g : seq_)
    for (std::size_t k = 0; k < t_.n; ++k) {
      std::int64_t w = 0;
      for (int f : g) w += counts[k * b_.size() + static_cast<std::size_t>(f)];
      s.push_back(w);
    }
  return s;
}

CriterionVector RegularProblem::criterion(const Score& s) const {
  return CriterionVector(s.begin(), s.end());
}

std::optional<std::uint32_t> RegularProblem::draw_for_slot(const GeneratorSet& gs, std::size_t slot, Rng& rng,
                                                           bool must_differ) const {
  const auto& pool = pools_.at(static_cast<std::size_t>(t_.slots.at(slot).pool));
  GeneratorSet trial = gs;
  std::vector<std::uint32_t> ok;
  for (auto r : pool.rows) {
    if (must_differ && r == gs.fill[slot]) continue;
    trial.fill[slot] = r;
    if (admissible(trial)) ok.push_back(r);
  }
  if (ok.empty()) return std::nullopt;
  return ok[uniform_index(rng, ok.size())];
}

RegularParticle mix_regular(const RegularProblem& pr, const RegularParticle& x, const RegularParticle& gb,
                            const RegularParticle& lb, const QVector& q, Rng& rng) {
  const auto& t = pr.key_template();
  const auto strata = t.strata();
  validate_q(q, pr.capacity());
  RegularParticle y = x;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const auto positions = t.slots_in(strata[i]);
    std::vector<char> used(positions.size(), 0);
    const std::pair<int, const RegularParticle*> plan[] = {{q.gb[i], &gb}, {q.lb[i], &lb}, {q.nw[i], nullptr}};
    for (const auto& [count, source] : plan)
      for (int c = 0; c < count; ++c) {
        // X*_r: try every unused position, keep the replacement with the best criterion.
        std::optional<RegularParticle> best;
        std::size_t best_pos = 0;
        for (std::size_t p = 0; p < positions.size(); ++p) {
          if (used[p]) continue;
          const auto slot = static_cast<std::size_t>(positions[p]);
          GeneratorSet trial = y.gs;
          std::optional<std::uint32_t> value;
          if (source) {
            trial.fill[slot] = source->gs.fill[slot];
            if (pr.admissible(trial)) value = trial.fill[slot];
          }
          if (!value) value = pr.draw_for_slot(y.gs, slot, rng);
          if (!value) continue;
          trial.fill[slot] = *value;
          RegularParticle cand{trial, pr.score(trial)};
          if (!best || cand.score < best->score) {
            best = std::move(cand);
            best_pos = p;
          }
        }
        if (!best) break;
        y = std::move(*best);
        used[best_pos] = 1;
      }
  }
  return y;
}

RegularParticle perturb_regular(const RegularProblem& pr, const RegularParticle& x, const QVector& q, Rng& rng) {
  const auto& t = pr.key_template();
  const auto strata = t.strata();
  RegularParticle y = x;
  bool changed = false;
  for (std::size_t i = 0; i < strata.size() && i < q.nw.size(); ++i) {
    auto positions = t.slots_in(strata[i]);
    std::shuffle(positions.begin(), positions.end(), rng);
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(q.nw[i]), positions.size());
    for (std::size_t p = 0; p < take; ++p) {
      const auto slot = static_cast<std::size_t>(positions[p]);
      if (auto v = pr.draw_for_slot(y.gs, slot, rng, true)) {
        y.gs.fill[slot] = *v;
        changed = true;
      }
    }
  }
  if (changed) y.score = pr.score(y.gs);
  return y;
}

MoveResult<RegularParticle> move_particle(const RegularProblem& pr, const RegularParticle& candidate,
                                          const RegularParticle& current, const RegularParticle& local_best,
                                          const QVector& q, Rng& rng) {
  MoveResult<RegularParticle> r{current, local_best, false};
  if (!(candidate.score < current.score)) {
    r.current = perturb_regular(pr, current, q, rng);
    r.perturbed = true;
  } else {
    r.current = candidate;
  }
  if (r.current.score < r.local_best.score) r.local_best = r.current;
  return r;
}

RegularSearchResult run_algorithm3(const RegularProblem& pr, const SearchOptions& opt) {
  validate_q(opt.q, pr.capacity());
  auto init = [&](Rng& rng) {
    RegularParticle p;
    p.gs = pr.random_particle(rng);
    p.score = pr.score(p.gs);
    return p;
  };
  auto step = [&](RegularParticle& cur, RegularParticle& lb, const RegularParticle& gb, Rng& rng) {
    const auto cand = mix_regular(pr, cur, gb, lb, opt.q, rng);
    auto m = move_particle(pr, cand, cur, lb, opt.q, rng);
    cur = std::move(m.current);
    lb = std::move(m.local_best);
  };
  auto audit = [&](const RegularParticle& p) {
    if (opt.audit_regular) opt.audit_regular(p.gs);
  };
  auto out = detail::run_swarm<RegularParticle>(opt, init, step, audit);

  RegularSearchResult res;
  res.best = out.best;
  res.table = pr.table(out.best.gs);
  for (auto& p : out.co_optimal) res.co_optimal.push_back(std::move(p.gs));
  for (std::size_t i = 0; i < out.trace.size(); ++i) res.trace.push_back({i, pr.criterion(out.trace[i])});
  res.iterations = out.iterations;
  res.seconds = out.seconds;
  return res;
}

double regular_space_size(const RegularProblem& pr) {
  const auto& t = pr.key_template();
  double space = 1;
  for (const auto& s : t.slots)
    if (!s.fixed) space *= static_cast<double>(pr.pools().at(static_cast<std::size_t>(s.pool)).size());
  return space;
}

OracleResult regular_oracle(const RegularProblem& pr, double cap) {
  OracleResult res;
  res.space = regular_space_size(pr);
  if (res.space > cap) throw SpaceTooLarge(res.space, cap);
  const auto& t = pr.key_template();
  std::vector<std::size_t> free;
  GeneratorSet gs;
  for (std::size_t s = 0; s < t.slots.size(); ++s) {
    gs.fill.push_back(t.slots[s].fixed ? t.slots[s].fixed_fill : 0);
    if (!t.slots[s].fixed) free.push_back(s);
  }
  auto pool_of = [&](std::size_t s) -> const PoolMatrix& {
    return pr.pools().at(static_cast<std::size_t>(t.slots[s].pool));
  };
  for (auto s : free)
    if (pool_of(s).size() == 0) return res;
  std::vector<std::size_t> idx(free.size(), 0);
  constexpr std::size_t keep = 8;
  while (true) {
    for (std::size_t i = 0; i < free.size(); ++i) gs.fill[free[i]] = pool_of(free[i]).rows[idx[i]];
    if (pr.admissible(gs)) {
      ++res.evaluated;
      auto sc = pr.score(gs);
      if (res.optimum_count == 0 || sc < res.best) {
        res.best = std::move(sc);
        res.optima.assign(1, gs);
        res.optimum_count = 1;
      } else if (sc == res.best) {
        ++res.optimum_count;
        if (res.optima.size() < keep) res.optima.push_back(gs);
      }
    }
    std::size_t i = 0;
    for (; i < free.size(); ++i) {
      if (++idx[i] < pool_of(free[i]).size()) break;
      idx[i] = 0;
    }
    if (i == free.size()) break;
  }
  return res;
}

}  // namespace msd
