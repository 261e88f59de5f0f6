#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "msd/aberration.hpp"
#include "msd/block_structure.hpp"
#include "msd/cli.hpp"
#include "msd/design_io.hpp"

namespace msd::testing {

inline std::string data_path(const std::string& name) { return std::string(MSD_DATA_DIR) + "/" + name; }

struct CliRun {
  int code = 0;
  std::string out, err;
};

inline CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// "G<i>-MA {…}" lines in print order.
inline std::vector<std::string> ma_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (l.size() > 1 && l[0] == 'G' && l.find("-MA {") != std::string::npos) lines.push_back(l);
  return lines;
}

// Integer form of the projector identities: M_F M_G = δ N M_F and Σ M_F = N I.
// Returns a description of the first failure, empty when all hold.
inline std::string projector_failure(const BlockStructure& b) {
  const auto sd = strata_projectors(b);
  const std::size_t N = sd.N(), m = sd.strata();
  const auto n = static_cast<std::int64_t>(N);
  std::size_t dims = 0;
  for (std::size_t f = 0; f < m; ++f) {
    std::int64_t trace = 0;
    for (std::size_t u = 0; u < N; ++u) trace += sd.numerator(f, u, u);
    if (trace != n * static_cast<std::int64_t>(sd.dimension(f))) return "trace of stratum " + b.name(f);
    dims += sd.dimension(f);
    for (std::size_t g = 0; g < m; ++g)
      for (std::size_t u = 0; u < N; ++u)
        for (std::size_t v = 0; v < N; ++v) {
          std::int64_t s = 0;
          for (std::size_t w = 0; w < N; ++w) s += sd.numerator(f, u, w) * sd.numerator(g, w, v);
          const std::int64_t want = f == g ? n * sd.numerator(f, u, v) : 0;
          if (s != want) return "product of strata " + b.name(f) + " and " + b.name(g);
        }
  }
  if (dims != N) return "dimensions do not sum to N";
  for (std::size_t u = 0; u < N; ++u)
    for (std::size_t v = 0; v < N; ++v) {
      std::int64_t s = 0;
      for (std::size_t f = 0; f < m; ++f) s += sd.numerator(f, u, v);
      if (s != (u == v ? n : 0)) return "projectors do not sum to the identity";
    }
  return {};
}

// Numeric route: eigenspaces of V = Σ σ²_G X_G X_Gᵀ with generic σ². The
// eigenvalue on W_F is Σ_{G ⪯ F} σ²_G N / n_G, which names each eigenspace.
struct EigenStrata {
  std::vector<Eigen::MatrixXd> basis;  // columns span W_F
};

inline EigenStrata eigen_strata(const BlockStructure& b) {
  const std::size_t N = b.N(), m = b.size();
  std::vector<double> sigma(m);
  for (std::size_t g = 0; g < m; ++g) sigma[g] = std::sqrt(2.0 + 1.37 * static_cast<double>(g * g + g));
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t g = 0; g < m; ++g)
    for (std::size_t u = 0; u < N; ++u)
      for (std::size_t v = 0; v < N; ++v)
        if (b.factor(g).class_at(u) == b.factor(g).class_at(v))
          V(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) += sigma[g];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
  EigenStrata out;
  out.basis.resize(m);
  for (std::size_t f = 0; f < m; ++f) {
    double xi = 0;
    for (std::size_t g = 0; g < m; ++g)
      if (b.finer_or_equal(g, f)) xi += sigma[g] * static_cast<double>(N) / b.factor(g).n_classes();
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i) - xi) < 1e-7 * (1 + xi)) cols.push_back(i);
    out.basis[f].resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      out.basis[f].col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cols[c]);
  }
  return out;
}

// B_{k,F} = Σ_{|S|=k} ‖P_F u_S‖² / N from the numeric eigenspaces; [(k-1)*m + f].
inline std::vector<double> eigen_wordcounts(const DesignTable& d, const BlockStructure& b) {
  const auto es = eigen_strata(b);
  const std::size_t N = d.rows, n = d.cols(), m = b.size();
  std::vector<double> out(n * m, 0.0);
  Eigen::VectorXd u(static_cast<Eigen::Index>(N));
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << n); ++s) {
    for (std::size_t r = 0; r < N; ++r) {
      double x = 1;
      for (std::size_t c = 0; c < n; ++c)
        if ((s >> c) & 1U) x *= d.at(r, c);
      u(static_cast<Eigen::Index>(r)) = x;
    }
    const auto k = static_cast<std::size_t>(std::popcount(s));
    for (std::size_t f = 0; f < m; ++f)
      out[(k - 1) * m + f] += (es.basis[f].transpose() * u).squaredNorm() / static_cast<double>(N);
  }
  return out;
}

inline bool agrees(const WordlengthTable& t, const std::vector<double>& numeric) {
  for (std::size_t k = 1; k <= t.n(); ++k)
    for (std::size_t f = 0; f < t.strata(); ++f)
      if (std::abs(to_double(t.at(k, f)) - numeric[(k - 1) * t.strata() + f]) > 1e-6) return false;
  return true;
}

}  // namespace msd::testing
