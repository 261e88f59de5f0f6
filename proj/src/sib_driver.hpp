#pragma once

#include <algorithm>
#include <chrono>
#include <thread>
#include <vector>

#include "msd/sib.hpp"

namespace msd::detail {

template <class Particle>
struct SwarmOutcome {
  Particle best;
  std::vector<Particle> co_optimal;
  std::vector<Score> trace;
  std::size_t iterations = 0;
  double seconds = 0;
};

// Runs body(j) for every particle j, spread over at most `threads` workers.
template <class Body>
void for_each_particle(std::size_t count, unsigned threads, Body body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), count);
  if (workers <= 1) {
    for (std::size_t j = 0; j < count; ++j) body(j);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t j = w; j < count; j += workers) body(j);
    });
}

// Synchronous swarm: every particle mixes against the previous iteration's GB, and GB
// is reduced at the barrier (strict improvement only, so the incumbent wins ties).
// Each particle owns its rng stream, so results do not depend on the thread count.
template <class Particle, class Init, class Step, class Audit>
SwarmOutcome<Particle> run_swarm(const SearchOptions& opt, Init init, Step step, Audit audit) {
  if (opt.S == 0) throw InvalidQ("swarm size must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  std::vector<Rng> rng;
  for (std::size_t j = 0; j < opt.S; ++j) rng.push_back(particle_rng(opt.seed, j));

  std::vector<Particle> cur(opt.S), lb(opt.S);
  for_each_particle(opt.S, opt.threads, [&](std::size_t j) { cur[j] = init(rng[j]); });
  lb = cur;
  for (const auto& p : cur) audit(p);

  SwarmOutcome<Particle> out;
  out.best = lb[0];
  for (std::size_t j = 1; j < opt.S; ++j)
    if (lb[j].score < out.best.score) out.best = lb[j];

  auto collect = [&](bool reset) {
    if (reset) out.co_optimal.clear();
    auto add = [&](const Particle& p) {
      if (out.co_optimal.size() >= opt.max_co_optimal) return;
      for (const auto& c : out.co_optimal)
        if (c == p) return;
      out.co_optimal.push_back(p);
    };
    add(out.best);
    for (std::size_t j = 0; j < opt.S; ++j) {
      if (lb[j].score == out.best.score) add(lb[j]);
      if (cur[j].score == out.best.score) add(cur[j]);
    }
  };
  collect(true);
  if (opt.trace) out.trace.push_back(out.best.score);

  std::size_t stale = 0;
  for (std::size_t t = 1; t <= opt.T; ++t) {
    const Particle gb = out.best;
    for_each_particle(opt.S, opt.threads, [&](std::size_t j) { step(cur[j], lb[j], gb, rng[j]); });
    for (const auto& p : cur) audit(p);

    bool improved = false;
    for (std::size_t j = 0; j < opt.S; ++j)
      if (lb[j].score < out.best.score) {
        out.best = lb[j];
        improved = true;
      }
    collect(improved);
    if (opt.trace) out.trace.push_back(out.best.score);
    out.iterations = t;
    stale = improved ? 0 : stale + 1;
    if (opt.patience && stale >= *opt.patience) break;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace msd::detail
