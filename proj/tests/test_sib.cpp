#include <doctest.h>

#include <numeric>

#include "msd/errors.hpp"
#include "msd/sib.hpp"

using namespace msd;

namespace {

RegularProblem regular(const char* structure, std::size_t n, Direction dir = Direction::Forward) {
  auto b = parse_structure(structure);
  auto t = template_for(b, n);
  auto seq = criterion_sequence(b, dir, t.priority);
  return RegularProblem(b, t, {}, seq);
}

NonregularProblem unstructured(std::size_t runs, std::size_t n, Constraints c = {}) {
  auto b = parse_structure(std::to_string(runs), {.require_power_of_two = false});
  auto seq = criterion_sequence(b, Direction::Forward);
  return NonregularProblem(b, default_letters(n), seq, c);
}

RegularParticle particle(const RegularProblem& pr, Rng& rng) {
  auto gs = pr.random_particle(rng);
  auto s = pr.score(gs);
  return {gs, s};
}

NonregularParticle particle(const NonregularProblem& pr, Rng& rng) {
  auto rows = pr.random_particle(rng);
  auto s = pr.score(rows);
  return {rows, s};
}

template <class V>
std::size_t differences(const V& a, const V& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

bool monotone(const std::vector<TraceRecord>& tr) {
  for (std::size_t i = 1; i < tr.size(); ++i)
    if (compare(tr[i].global_best, tr[i - 1].global_best) > 0) return false;
  return true;
}

}  // namespace

TEST_CASE("q validation and distribution") {
  const std::vector<int> cap{2, 3};
  CHECK_THROWS_AS(validate_q({{1, 1}, {1, 1}, {1, 2}}, cap), InvalidQ);
  CHECK_THROWS_AS(validate_q({{-1, 0}, {0, 0}, {0, 0}}, cap), InvalidQ);
  CHECK_THROWS_AS(validate_q({{1}, {0}, {0}}, cap), InvalidQ);
  CHECK(validate_q({{0, 1}, {0, 0}, {1, 2}}, cap).empty());
  // q_lb above q_gb draws the ordering warning.
  CHECK_FALSE(validate_q({{0, 0}, {1, 0}, {0, 0}}, cap).empty());

  const auto q = distribute_q(4, 1, 5, cap);
  for (std::size_t i = 0; i < cap.size(); ++i) CHECK(q.gb[i] + q.lb[i] + q.nw[i] <= cap[i]);
  CHECK(q.total() <= 5);
  CHECK(std::accumulate(q.nw.begin(), q.nw.end(), 0) >= 1);
  const auto big = distribute_q(1, 1, 1, std::vector<int>{10, 30});
  CHECK(big.total() == 3);
}

TEST_CASE("continuous reference update") {
  const std::vector<double> x{0}, v{0}, gb{1}, lb{2}, fresh{3};
  auto [x1, v1] = continuous_pso_reference(x, v, gb, lb, fresh, 1, 1, 1, 1);
  CHECK(v1[0] == doctest::Approx(6));
  CHECK(x1[0] == doctest::Approx(6));
  const std::vector<double> p{1.5, -2}, w{0.5, 1};
  auto [x2, v2] = continuous_pso_reference(p, w, p, p, p, 3, 2, 1, 0.5);
  CHECK(v2 == w);
  const std::vector<double> far{9, 9};
  auto [x3, v3] = continuous_pso_reference(p, w, far, far, far, 0, 0, 0, 2);
  CHECK(x3[0] == doctest::Approx(2.5));
  CHECK(x3[1] == doctest::Approx(0));
}

TEST_CASE("regular MIX") {
  const auto pr = regular("2/2/4", 5);
  const auto cap = pr.capacity();
  Rng rng(17);
  const auto x = particle(pr, rng), gb = particle(pr, rng), lb = particle(pr, rng);
  const QVector zero{std::vector<int>(cap.size(), 0), std::vector<int>(cap.size(), 0), std::vector<int>(cap.size(), 0)};
  CHECK(mix_regular(pr, x, gb, lb, zero, rng).gs == x.gs);

  for (int rep = 0; rep < 50; ++rep) {
    const auto q = distribute_q(2, 1, 1, cap);
    const auto y = mix_regular(pr, particle(pr, rng), gb, lb, q, rng);
    CHECK(pr.admissible(y.gs));
    CHECK(y.score == pr.score(y.gs));
  }

  // Only GB swaps: every replaced position takes the global best's generator, or
  // a resampled one when the swap would break invertibility.
  QVector only_gb = zero;
  only_gb.gb.back() = 1;
  const auto y = mix_regular(pr, x, gb, lb, only_gb, rng);
  CHECK(differences(x.gs.fill, y.gs.fill) <= 1);
}

TEST_CASE("regular perturbation changes exactly q_new generators") {
  const auto pr = regular("8/4", 13);
  const auto cap = pr.capacity();
  Rng rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const auto x = particle(pr, rng);
    QVector q{std::vector<int>(cap.size(), 0), std::vector<int>(cap.size(), 0), std::vector<int>(cap.size(), 0)};
    q.nw.front() = 2;
    const auto y = perturb_regular(pr, x, q, rng);
    CHECK(pr.admissible(y.gs));
    CHECK(differences(x.gs.fill, y.gs.fill) == 2);
  }
}

TEST_CASE("MOVE") {
  const auto pr = regular("8/4", 13);
  const auto q = distribute_q(4, 1, 5, pr.capacity());
  Rng rng(8);
  std::vector<RegularParticle> ps;
  for (int i = 0; i < 40; ++i) ps.push_back(particle(pr, rng));
  std::sort(ps.begin(), ps.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
  const auto& best = ps.front();
  const auto& worst = ps.back();
  REQUIRE(best.score < worst.score);

  auto r = move_particle(pr, best, worst, worst, q, rng);
  CHECK_FALSE(r.perturbed);
  CHECK(r.current == best);
  CHECK(r.local_best == best);

  // No strict improvement: the incumbent local best stays, the current is perturbed.
  r = move_particle(pr, worst, best, best, q, rng);
  CHECK(r.perturbed);
  CHECK(r.local_best == best);
  CHECK_FALSE(r.current == best);

  const RegularParticle twin{best.gs, best.score};
  r = move_particle(pr, twin, worst, best, q, rng);
  CHECK(r.local_best.gs == best.gs);
}

TEST_CASE("nonregular MIX and perturbation") {
  const auto pr = unstructured(8, 6);
  Rng rng(4);
  const auto x = particle(pr, rng), gb = particle(pr, rng), lb = particle(pr, rng);
  CHECK(mix_nonregular(pr, x, gb, lb, QVector::scalar(0, 0, 0), rng).rows == x.rows);
  for (int rep = 0; rep < 20; ++rep) {
    const auto y = mix_nonregular(pr, particle(pr, rng), gb, lb, QVector::scalar(2, 2, 4), rng);
    CHECK(y.rows.size() == 8);
    CHECK(y.score == pr.score(y.rows));
    const auto z = perturb_nonregular(pr, y, 3, rng);
    CHECK(differences(y.rows, z.rows) == 3);
  }
  CHECK_THROWS_AS(mix_nonregular(pr, x, gb, lb, QVector::scalar(3, 3, 3), rng), InvalidQ);
}

TEST_CASE("nonregular constraints") {
  Constraints c;
  c.forbidden.push_back({{0, 1}, {-1, -1}});
  c.distinct_rows = true;
  const auto pr = unstructured(8, 4, c);
  CHECK(pr.pool().size() == 12);
  for (auto row : pr.pool()) CHECK((row & 3U) != 3U);

  std::size_t audited = 0;
  SearchOptions so;
  so.S = 10;
  so.T = 10;
  so.q = QVector::scalar(2, 1, 3);
  so.audit_nonregular = [&](const std::vector<std::uint32_t>& rows) {
    ++audited;
    CHECK(pr.satisfies(rows));
  };
  const auto res = run_algorithm4(pr, so);
  CHECK(audited > 0);
  CHECK(pr.satisfies(res.best.rows));

  Constraints none;
  none.forbidden.push_back({{0}, {-1}});
  none.forbidden.push_back({{0}, {1}});
  CHECK_THROWS_AS(unstructured(8, 3, none), EmptyCandidateSet);
}

TEST_CASE("regular search is monotone, reproducible and audited") {
  const auto pr = regular("8/4", 13);
  SearchOptions so;
  so.S = 15;
  so.T = 15;
  so.seed = 21;
  so.q = distribute_q(4, 1, 5, pr.capacity());
  so.audit_regular = [&](const GeneratorSet& gs) { CHECK(pr.admissible(gs)); };
  const auto a = run_algorithm3(pr, so);
  const auto b = run_algorithm3(pr, so);
  CHECK(monotone(a.trace));
  CHECK(a.best.gs == b.best.gs);
  CHECK(a.trace.size() == b.trace.size());
  CHECK(a.table == pr.table(a.best.gs));
  so.seed = 22;
  CHECK(monotone(run_algorithm3(pr, so).trace));
}

TEST_CASE("a single particle with q = 0 is returned unchanged") {
  const auto pr = regular("2/8", 5);
  SearchOptions so;
  so.S = 1;
  so.T = 1;
  so.seed = 5;
  const auto cap = pr.capacity();
  so.q = {std::vector<int>(cap.size(), 0), std::vector<int>(cap.size(), 0), std::vector<int>(cap.size(), 0)};
  auto rng = particle_rng(so.seed, 0);
  const auto first = pr.random_particle(rng);
  CHECK(run_algorithm3(pr, so).best.gs == first);
}

TEST_CASE("search finds the exhaustive optimum on small regular instances") {
  for (const char* s : {"2/8", "8/4"})
    for (auto dir : {Direction::Forward, Direction::Backward}) {
      const auto pr = regular(s, 5, dir);
      const auto oracle = regular_oracle(pr);
      CHECK(oracle.optimum_count > 0);
      int hits = 0;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SearchOptions so;
        so.S = 20;
        so.T = 20;
        so.seed = seed;
        so.q = distribute_q(4, 1, 5, pr.capacity());
        hits += run_algorithm3(pr, so).best.score == oracle.best;
      }
      CHECK(hits >= 19);
    }
  CHECK_THROWS_AS(regular_oracle(regular("8/4", 13), 1e6), SpaceTooLarge);
}

TEST_CASE("search finds the exhaustive optimum on a small nonregular instance") {
  const auto pr = unstructured(4, 3);
  const auto oracle = nonregular_oracle(pr);
  REQUIRE(oracle.optimum_count > 0);
  SearchOptions so;
  so.S = 10;
  so.T = 20;
  so.q = QVector::scalar(1, 1, 2);
  CHECK(run_algorithm4(pr, so).best.score == oracle.best);
}
