#include <algorithm>
#include <numeric>

#include "msd/errors.hpp"
#include "msd/sib.hpp"

namespace msd {

int QVector::total() const {
  int s = 0;
  for (const auto* v : {&gb, &lb, &nw})
    for (int x : *v) s += x;
  return s;
}

std::vector<std::string> validate_q(const QVector& q, std::span<const int> capacity) {
  if (q.gb.size() != capacity.size() || q.lb.size() != capacity.size() || q.nw.size() != capacity.size())
    throw InvalidQ("q has " + std::to_string(q.gb.size()) + " entries but there are " +
                   std::to_string(capacity.size()) + " strata");
  int sg = 0, sl = 0, sn = 0;
  for (std::size_t i = 0; i < capacity.size(); ++i) {
    if (q.gb[i] < 0 || q.lb[i] < 0 || q.nw[i] < 0) throw InvalidQ("q entries must be nonnegative");
    const int sum = q.gb[i] + q.lb[i] + q.nw[i];
    if (sum > capacity[i])
      throw InvalidQ("q for stratum " + std::to_string(i) + " is " + std::to_string(sum) + " but only " +
                     std::to_string(capacity[i]) + " positions exist");
    sg += q.gb[i];
    sl += q.lb[i];
    sn += q.nw[i];
  }
  std::vector<std::string> warnings;
  if (!(sn >= sg && sg >= sl))
    warnings.push_back("suggested ordering q_new >= q_gb >= q_lb does not hold (" + std::to_string(sn) + ", " +
                       std::to_string(sg) + ", " + std::to_string(sl) + ")");
  return warnings;
}

namespace {

// Largest-remainder apportionment of total over the given weights, capped per entry.
std::vector<int> apportion(int total, std::span<const int> weight, std::span<const int> cap) {
  const std::size_t m = weight.size();
  std::vector<int> out(m, 0);
  const long long wsum = std::accumulate(weight.begin(), weight.end(), 0LL);
  if (wsum == 0 || total <= 0) return out;
  std::vector<std::pair<long long, std::size_t>> rem;
  int given = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const long long num = static_cast<long long>(total) * weight[i];
    out[i] = static_cast<int>(num / wsum);
    given += out[i];
    rem.emplace_back(num % wsum, i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; given < total && r < m; ++r, ++given) ++out[rem[r].second];
  for (std::size_t i = 0; i < m; ++i) out[i] = std::min(out[i], cap[i]);
  return out;
}

}  // namespace

QVector distribute_q(int gb, int lb, int nw, std::span<const int> capacity) {
  if (gb < 0 || lb < 0 || nw < 0) throw InvalidQ("q totals must be nonnegative");
  std::vector<int> room(capacity.begin(), capacity.end());
  QVector q;
  // NEW takes its share first, then GB, then LB, each within what is left per stratum.
  q.nw = apportion(nw, capacity, room);
  for (std::size_t i = 0; i < room.size(); ++i) room[i] -= q.nw[i];
  q.gb = apportion(gb, capacity, room);
  for (std::size_t i = 0; i < room.size(); ++i) room[i] -= q.gb[i];
  q.lb = apportion(lb, capacity, room);
  return q;
}

Rng particle_rng(std::uint64_t seed, std::size_t particle) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(particle), static_cast<std::uint32_t>(particle >> 32)};
  return Rng(seq);
}

std::pair<std::vector<double>, std::vector<double>> continuous_pso_reference(
    std::span<const double> position, std::span<const double> velocity, std::span<const double> gb,
    std::span<const double> lb, std::span<const double> fresh, double c1, double c2, double c3, double dt) {
  const std::size_t d = position.size();
  if (velocity.size() != d || gb.size() != d || lb.size() != d || fresh.size() != d)
    throw DimensionMismatch("PSO vectors must share one dimension");
  std::vector<double> x(d), v(d);
  for (std::size_t i = 0; i < d; ++i) {
    v[i] = velocity[i] + c1 * (gb[i] - position[i]) + c2 * (lb[i] - position[i]) + c3 * (fresh[i] - position[i]);
    x[i] = position[i] + v[i] * dt;
  }
  return {x, v};
}

}  // namespace msd
