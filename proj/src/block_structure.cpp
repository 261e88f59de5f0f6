#include "msd/block_structure.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "msd/errors.hpp"

namespace msd {

// ---------------------------------------------------------------- UnitFactor

UnitFactor::UnitFactor(std::string name, std::vector<int> class_of) : name_(std::move(name)) {
  std::map<int, int> relabel;
  class_of_.reserve(class_of.size());
  for (int c : class_of) {
    auto [it, inserted] = relabel.emplace(c, static_cast<int>(relabel.size()));
    class_of_.push_back(it->second);
  }
  n_classes_ = static_cast<int>(relabel.size());
}

UnitFactor UnitFactor::universal(std::size_t n, std::string name) {
  return UnitFactor(std::move(name), std::vector<int>(n, 0));
}

UnitFactor UnitFactor::equality(std::size_t n, std::string name) {
  std::vector<int> c(n);
  std::iota(c.begin(), c.end(), 0);
  return UnitFactor(std::move(name), std::move(c));
}

std::vector<std::size_t> UnitFactor::class_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n_classes_), 0);
  for (int c : class_of_) ++sizes[static_cast<std::size_t>(c)];
  return sizes;
}

bool UnitFactor::is_uniform() const {
  auto sizes = class_sizes();
  return std::all_of(sizes.begin(), sizes.end(), [&](std::size_t s) { return s == sizes.front(); });
}

bool UnitFactor::finer_or_equal(const UnitFactor& other) const {
  if (units() != other.units()) return false;
  std::vector<int> image(static_cast<std::size_t>(n_classes_), -1);
  for (std::size_t u = 0; u < units(); ++u) {
    int& img = image[static_cast<std::size_t>(class_of_[u])];
    if (img == -1)
      img = other.class_of_[u];
    else if (img != other.class_of_[u])
      return false;
  }
  return true;
}

UnitFactor UnitFactor::renamed(std::string name) const {
  UnitFactor f = *this;
  f.name_ = std::move(name);
  return f;
}

UnitFactor sup(const UnitFactor& a, const UnitFactor& b) {
  if (a.units() != b.units()) throw DimensionMismatch("unit factors on different unit sets");
  // Union-find over the classes of a, merged through shared classes of b.
  std::vector<int> parent(static_cast<std::size_t>(a.n_classes()));
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  std::vector<int> first_a(static_cast<std::size_t>(b.n_classes()), -1);
  for (std::size_t u = 0; u < a.units(); ++u) {
    int& f = first_a[static_cast<std::size_t>(b.class_at(u))];
    if (f == -1)
      f = a.class_at(u);
    else
      parent[static_cast<std::size_t>(root(a.class_at(u)))] = root(f);
  }
  std::vector<int> labels(a.units());
  for (std::size_t u = 0; u < a.units(); ++u) labels[u] = root(a.class_at(u));
  return UnitFactor(a.name() + "v" + b.name(), std::move(labels));
}

UnitFactor inf(const UnitFactor& a, const UnitFactor& b) {
  if (a.units() != b.units()) throw DimensionMismatch("unit factors on different unit sets");
  std::vector<int> labels(a.units());
  for (std::size_t u = 0; u < a.units(); ++u) labels[u] = a.class_at(u) * b.n_classes() + b.class_at(u);
  return UnitFactor(a.name() + "^" + b.name(), std::move(labels));
}

// ------------------------------------------------------------ StructureExpr

std::shared_ptr<const StructureExpr> StructureExpr::leaf(std::size_t n) {
  auto e = std::make_shared<StructureExpr>();
  e->kind = Kind::Leaf;
  e->units = n;
  return e;
}

std::string StructureExpr::to_string() const {
  switch (kind) {
    case Kind::Leaf: return std::to_string(units);
    case Kind::Nest: {
      std::string l = left->to_string();
      if (left->kind == Kind::Nest) l = "(" + l + ")";
      return l + "/" + right->to_string();
    }
    case Kind::Cross: return "(" + left->to_string() + "x" + right->to_string() + ")";
  }
  return {};
}

// ----------------------------------------------------------- BlockStructure

BlockStructure::BlockStructure(std::vector<UnitFactor> factors, std::shared_ptr<const StructureExpr> expr)
    : factors_(std::move(factors)), expr_(std::move(expr)) {
  if (factors_.empty()) throw DimensionMismatch("a block structure needs at least one factor");
  n_ = factors_.front().units();
  for (const auto& f : factors_)
    if (f.units() != n_) throw DimensionMismatch("unit factors on different unit sets");
  std::stable_sort(factors_.begin(), factors_.end(),
                   [](const UnitFactor& a, const UnitFactor& b) { return a.n_classes() < b.n_classes(); });

  const std::size_t m = factors_.size();
  le_.assign(m * m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) le_[i * m + j] = factors_[i].finer_or_equal(factors_[j]);

  // μ(i,i) = 1; μ(i,j) = -Σ_{i⪯k≺j} μ(i,k). Coarser factors sit at lower indices,
  // so k ranges over indices that are processed before j when walking j downward.
  mu_.assign(m * m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    mu_[i * m + i] = 1;
    for (std::size_t step = 1; step <= i; ++step) {
      std::size_t j = i - step;
      if (!le_[i * m + j] || factors_[i].equivalent(factors_[j])) continue;
      std::int64_t s = 0;
      for (std::size_t k = j + 1; k <= i; ++k)
        if (le_[i * m + k] && le_[k * m + j] && !factors_[k].equivalent(factors_[j])) s += mu_[i * m + k];
      mu_[i * m + j] = -s;
    }
  }
}

BlockStructure BlockStructure::unstructured(std::size_t n) {
  if (n == 1) return BlockStructure({UnitFactor::universal(1)}, StructureExpr::leaf(1));
  return BlockStructure({UnitFactor::universal(n), UnitFactor::equality(n)}, StructureExpr::leaf(n));
}

int BlockStructure::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].name() == name) return static_cast<int>(i);
  return -1;
}

bool BlockStructure::has_universal() const { return factors_.front().n_classes() == 1; }
bool BlockStructure::has_equality() const { return static_cast<std::size_t>(factors_.back().n_classes()) == n_; }

int BlockStructure::find(const UnitFactor& f) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].equivalent(f)) return static_cast<int>(i);
  return -1;
}

std::string BlockStructure::describe() const {
  std::string s = "{";
  for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? ", " : "") + factors_[i].name();
  return s + "}";
}

namespace {

// Names of composite factors must stay unique; later (finer) duplicates get fresh letters.
std::vector<UnitFactor> unique_names(std::vector<UnitFactor> fs) {
  std::vector<std::size_t> order(fs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fs[a].n_classes() < fs[b].n_classes(); });
  static const char* spare[] = {"T", "S", "Q", "P", "W", "V", "Z"};
  std::set<std::string> used;
  int fresh = 0;
  for (std::size_t idx : order) {
    std::string name = fs[idx].name();
    if (used.count(name)) {
      name.clear();
      for (const char* s : spare)
        if (!used.count(s)) {
          name = s;
          break;
        }
      while (name.empty() || used.count(name)) name = "F" + std::to_string(++fresh);
      fs[idx] = fs[idx].renamed(name);
    }
    used.insert(name);
  }
  return fs;
}

std::shared_ptr<const StructureExpr> combine(StructureExpr::Kind kind, const BlockStructure& b1,
                                             const BlockStructure& b2) {
  if (!b1.expr() || !b2.expr()) return nullptr;
  auto e = std::make_shared<StructureExpr>();
  e->kind = kind;
  e->units = b1.N() * b2.N();
  e->left = b1.expr();
  e->right = b2.expr();
  return e;
}

bool is_u(const BlockStructure& b, std::size_t i) { return b.factor(i).n_classes() == 1; }
bool is_e(const BlockStructure& b, std::size_t i) { return static_cast<std::size_t>(b.factor(i).n_classes()) == b.N(); }

}  // namespace

BlockStructure cross(const BlockStructure& b1, const BlockStructure& b2) {
  const std::size_t n2 = b2.N();
  std::vector<UnitFactor> fs;
  // F2 outer so that the row-side factor is declared before the column-side one.
  for (std::size_t j = 0; j < b2.size(); ++j)
    for (std::size_t i = 0; i < b1.size(); ++i) {
      const auto& f1 = b1.factor(i);
      const auto& f2 = b2.factor(j);
      std::vector<int> labels(b1.N() * n2);
      for (std::size_t w1 = 0; w1 < b1.N(); ++w1)
        for (std::size_t w2 = 0; w2 < n2; ++w2)
          labels[w1 * n2 + w2] = f1.class_at(w1) * f2.n_classes() + f2.class_at(w2);
      std::string name;
      const bool u1 = is_u(b1, i), u2 = is_u(b2, j), e1 = is_e(b1, i), e2 = is_e(b2, j);
      if (u1 && u2)
        name = "U";
      else if (e1 && e2)
        name = "E";
      else if (e1 && u2)
        name = "R";
      else if (u1 && e2)
        name = "C";
      else if (u2)
        name = f1.name();
      else if (u1)
        name = f2.name();
      else
        name = f1.name() + f2.name();
      fs.emplace_back(name, std::move(labels));
    }
  return BlockStructure(unique_names(std::move(fs)), combine(StructureExpr::Kind::Cross, b1, b2));
}

BlockStructure nest(const BlockStructure& b1, const BlockStructure& b2) {
  const std::size_t n2 = b2.N();
  std::vector<UnitFactor> fs;
  auto build = [&](const UnitFactor& f1, const UnitFactor& f2, std::string name) {
    std::vector<int> labels(b1.N() * n2);
    for (std::size_t w1 = 0; w1 < b1.N(); ++w1)
      for (std::size_t w2 = 0; w2 < n2; ++w2)
        labels[w1 * n2 + w2] = f1.class_at(w1) * f2.n_classes() + f2.class_at(w2);
    fs.emplace_back(std::move(name), std::move(labels));
  };
  const std::size_t e1 = b1.size() - 1;
  const bool b1_trivial = b1.N() == 1;
  for (std::size_t i = 0; i < b1.size(); ++i)
    if (!is_e(b1, i) || b1_trivial) {
      if (b1_trivial && i > 0) break;
      build(b1.factor(i), UnitFactor::universal(n2), b1.factor(i).name());
    }
  for (std::size_t j = 0; j < b2.size(); ++j) {
    if (b1_trivial && is_u(b2, j)) continue;  // E1×U2 = U1×U2 when b1 has one unit
    std::string name = is_e(b2, j) ? "E" : is_u(b2, j) ? "B" : b2.factor(j).name();
    build(b1.factor(e1), b2.factor(j), name);
  }
  return BlockStructure(unique_names(std::move(fs)), combine(StructureExpr::Kind::Nest, b1, b2));
}

// ------------------------------------------------------------------- parser

namespace {

class Parser {
public:
  Parser(std::string_view text, ParseOptions opt) : s_(text), opt_(opt) {}

  BlockStructure parse() {
    BlockStructure b = nested();
    skip();
    if (pos_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
    return b;
  }

private:
  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  // S ::= T ("/" S)?   right-associative nesting.
  BlockStructure nested() {
    BlockStructure left = term();
    skip();
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      BlockStructure right = nested();
      return nest(left, right);
    }
    return left;
  }

  // T ::= INT | "(" S ("x" S)? ")"
  BlockStructure term() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    if (s_[pos_] == '(') {
      ++pos_;
      BlockStructure a = nested();
      skip();
      if (pos_ < s_.size() && (s_[pos_] == 'x' || s_[pos_] == 'X' || s_[pos_] == '*')) {
        ++pos_;
        BlockStructure b = nested();
        skip();
        expect(')');
        return cross(a, b);
      }
      expect(')');
      return a;
    }
    if (!std::isdigit(static_cast<unsigned char>(s_[pos_])))
      throw ParseError("expected an integer or '('", pos_);
    const std::size_t start = pos_;
    std::size_t n = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      n = n * 10 + static_cast<std::size_t>(s_[pos_] - '0');
      if (n > (std::size_t{1} << 24)) throw ParseError("unit count too large", start);
      ++pos_;
    }
    if (n == 0) throw ParseError("unit count must be positive", start);
    if (opt_.require_power_of_two && (n & (n - 1)) != 0)
      throw NonPowerOfTwo(std::to_string(n) + " is not a power of two (position " + std::to_string(start) + ")");
    return BlockStructure::unstructured(n);
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' before end of expression", pos_);
    if (s_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  std::string_view s_;
  ParseOptions opt_;
  std::size_t pos_ = 0;
};

}  // namespace

BlockStructure parse_structure(std::string_view expr, ParseOptions options) {
  return Parser(expr, options).parse();
}

// -------------------------------------------------------------- class table

BlockStructure from_class_columns(const std::vector<std::string>& names,
                                  const std::vector<std::vector<int>>& columns) {
  if (names.size() != columns.size()) throw DimensionMismatch("class table header and columns disagree");
  if (columns.empty()) throw FormatError("class table has no factor columns");
  const std::size_t n = columns.front().size();
  std::vector<UnitFactor> fs;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != n) throw DimensionMismatch("class table columns of different length");
    fs.emplace_back(names[c], columns[c]);
  }
  auto present = [&](const UnitFactor& g) {
    return std::any_of(fs.begin(), fs.end(), [&](const UnitFactor& f) { return f.equivalent(g); });
  };
  if (!present(UnitFactor::universal(n))) fs.insert(fs.begin(), UnitFactor::universal(n));
  if (!present(UnitFactor::equality(n))) fs.push_back(UnitFactor::equality(n));
  return BlockStructure(std::move(fs));
}

BlockStructure read_class_table(std::istream& in) {
  std::vector<std::string> names;
  std::vector<std::vector<int>> columns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    std::vector<std::string> cells;
    for (std::string cell; ls >> cell;) cells.push_back(cell);
    if (cells.empty()) continue;
    if (names.empty()) {
      names = cells;
      columns.assign(names.size(), {});
      continue;
    }
    if (cells.size() != names.size())
      throw FormatError("class table line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                        " entries, expected " + std::to_string(names.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        columns[c].push_back(std::stoi(cells[c], &used));
        if (used != cells[c].size()) throw std::invalid_argument(cells[c]);
      } catch (const std::exception&) {
        throw FormatError("class table line " + std::to_string(line_no) + ": '" + cells[c] + "' is not an integer");
      }
    }
  }
  if (names.empty()) throw FormatError("class table is empty");
  return from_class_columns(names, columns);
}

BlockStructure load_class_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open class table " + path);
  return read_class_table(in);
}

// --------------------------------------------------------------- validation

ValidationReport validate_obs(const BlockStructure& b) {
  ValidationReport rep;
  const std::size_t m = b.size();
  for (std::size_t i = 0; i < m; ++i)
    if (!b.factor(i).is_uniform()) rep.violations.push_back("factor " + b.name(i) + " is not uniform");
  if (!b.has_universal()) rep.violations.push_back("structure lacks the universal factor U");
  if (!b.has_equality()) rep.violations.push_back("structure lacks the equality factor E");

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto& fi = b.factor(i);
      const auto& fj = b.factor(j);
      if (fi.equivalent(fj)) {
        rep.violations.push_back("factors " + fi.name() + " and " + fj.name() + " are equivalent");
        continue;
      }
      // Within each class Γ of the join: n_ij = n_i+ n_+j / |Γ|.
      UnitFactor s = sup(fi, fj);
      std::map<std::pair<int, int>, std::int64_t> nij;
      std::map<int, std::int64_t> ni, nj;
      std::vector<std::int64_t> gamma(static_cast<std::size_t>(s.n_classes()), 0);
      for (std::size_t u = 0; u < b.N(); ++u) {
        ++nij[{fi.class_at(u), fj.class_at(u)}];
        ++ni[fi.class_at(u)];
        ++nj[fj.class_at(u)];
        ++gamma[static_cast<std::size_t>(s.class_at(u))];
      }
      std::map<int, int> sup_of_i, sup_of_j;
      for (std::size_t u = 0; u < b.N(); ++u) {
        sup_of_i[fi.class_at(u)] = s.class_at(u);
        sup_of_j[fj.class_at(u)] = s.class_at(u);
      }
      bool orth = true;
      for (auto [ci, cnt_i] : ni)
        for (auto [cj, cnt_j] : nj) {
          if (sup_of_i[ci] != sup_of_j[cj]) continue;
          auto it = nij.find({ci, cj});
          const std::int64_t observed = it == nij.end() ? 0 : it->second;
          if (observed * gamma[static_cast<std::size_t>(sup_of_i[ci])] != cnt_i * cnt_j) orth = false;
        }
      if (!orth) rep.violations.push_back("factors " + fi.name() + " and " + fj.name() + " are not orthogonal");
      if (b.find(s) < 0) rep.violations.push_back("sup(" + fi.name() + ", " + fj.name() + ") is not in the structure");
      if (b.find(inf(fi, fj)) < 0)
        rep.violations.push_back("inf(" + fi.name() + ", " + fj.name() + ") is not in the structure");
    }
  return rep;
}

// ---------------------------------------------------------------- projectors

StratumDecomposition::StratumDecomposition(std::size_t n, std::vector<std::vector<std::int64_t>> numerators)
    : n_(n), numerators_(std::move(numerators)) {
  for (const auto& m : numerators_) {
    std::int64_t trace = 0;
    for (std::size_t u = 0; u < n_; ++u) trace += m[u * n_ + u];
    dims_.push_back(static_cast<std::size_t>(trace / static_cast<std::int64_t>(n_)));
  }
}

Rational StratumDecomposition::entry(std::size_t f, std::size_t u, std::size_t v) const {
  return Rational(numerator(f, u, v), static_cast<std::int64_t>(n_));
}

std::vector<std::vector<Rational>> StratumDecomposition::projector(std::size_t f) const {
  std::vector<std::vector<Rational>> p(n_, std::vector<Rational>(n_));
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = 0; v < n_; ++v) p[u][v] = entry(f, u, v);
  return p;
}

StratumDecomposition strata_projectors(const BlockStructure& b) {
  auto rep = validate_obs(b);
  if (!rep.ok()) throw NotOrthogonal("not an orthogonal block structure: " + rep.violations.front());
  const std::size_t n = b.N();
  std::vector<std::vector<std::int64_t>> nums;
  // P_F = Σ_{G⪰F} μ(F,G) A_G with A_G(u,v) = n_G/N on shared G-classes.
  for (std::size_t f = 0; f < b.size(); ++f) {
    std::vector<std::int64_t> m(n * n, 0);
    for (std::size_t g = 0; g < b.size(); ++g) {
      const std::int64_t mu = b.mobius(f, g);
      if (mu == 0) continue;
      const auto& fg = b.factor(g);
      const std::int64_t w = mu * fg.n_classes();
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
          if (fg.class_at(u) == fg.class_at(v)) m[u * n + v] += w;
    }
    nums.push_back(std::move(m));
  }
  return StratumDecomposition(n, std::move(nums));
}

// ----------------------------------------------------------- criterion sets

std::vector<FactorSet> admissible_subsets(const BlockStructure& b) {
  // Candidates are the factors other than U and E; U is always present.
  const int m = static_cast<int>(b.size());
  std::vector<int> mid;
  for (int i = 1; i < m - 1; ++i) mid.push_back(i);
  if (mid.size() > 20) throw Infeasible("too many strata to enumerate criterion subsets");
  std::vector<FactorSet> out;
  for (std::uint32_t mask = 0; mask < (1U << mid.size()); ++mask) {
    FactorSet g{0};
    for (std::size_t k = 0; k < mid.size(); ++k)
      if ((mask >> k) & 1U) g.push_back(mid[k]);
    if (is_admissible(b, g)) out.push_back(std::move(g));
  }
  std::stable_sort(out.begin(), out.end(), [](const FactorSet& a, const FactorSet& c) {
    if (a.size() != c.size()) return a.size() < c.size();
    return a < c;
  });
  return out;
}

bool is_admissible(const BlockStructure& b, const FactorSet& g) {
  if (g.empty() || g.front() != 0) return false;
  if (!std::is_sorted(g.begin(), g.end()) || std::adjacent_find(g.begin(), g.end()) != g.end()) return false;
  for (int f : g)
    if (f < 0 || f >= static_cast<int>(b.size()) || f == b.equality_index()) return false;
  for (int f : g)
    for (std::size_t h = 0; h < b.size(); ++h)
      if (b.strictly_finer(static_cast<std::size_t>(f), h) && !std::binary_search(g.begin(), g.end(), static_cast<int>(h)))
        return false;
  return true;
}

int subset_label(const BlockStructure& b, const FactorSet& g) {
  auto all = admissible_subsets(b);
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] == g) return static_cast<int>(i) + 1;
  return 0;
}

std::string describe_set(const BlockStructure& b, const FactorSet& g) {
  std::string s = "{";
  for (std::size_t i = 0; i < g.size(); ++i) s += (i ? ", " : "") + b.name(static_cast<std::size_t>(g[i]));
  return s + "}";
}

namespace {

std::vector<FactorSet> sequence_for_ranking(const BlockStructure& b, Direction dir, const std::vector<int>& rank_of) {
  auto sets = admissible_subsets(b);
  auto key = [&](const FactorSet& g) {
    std::vector<int> r;
    for (int f : g) r.push_back(rank_of[static_cast<std::size_t>(f)]);
    std::sort(r.begin(), r.end());
    return r;
  };
  std::stable_sort(sets.begin(), sets.end(), [&](const FactorSet& a, const FactorSet& c) {
    if (a.size() != c.size()) return a.size() < c.size();
    return key(a) < key(c);
  });
  if (dir == Direction::Backward) std::reverse(sets.begin(), sets.end());
  return sets;
}

}  // namespace

std::vector<std::vector<FactorSet>> criterion_sequence_alternatives(const BlockStructure& b, Direction dir,
                                                                    const std::vector<int>& priority) {
  if (priority.size() != b.size()) throw DimensionMismatch("one priority per factor expected");
  // Base ranking: higher priority first, then declaration order.
  std::vector<int> order(b.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return priority[static_cast<std::size_t>(x)] > priority[static_cast<std::size_t>(y)]; });

  // Permute within groups of equal priority.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && priority[static_cast<std::size_t>(order[j])] == priority[static_cast<std::size_t>(order[i])]) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  std::vector<std::vector<FactorSet>> out;
  std::size_t produced = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t gi) {
    if (produced > 5040) return;
    if (gi == groups.size()) {
      ++produced;
      std::vector<int> rank_of(b.size());
      for (std::size_t r = 0; r < order.size(); ++r) rank_of[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
      auto seq = sequence_for_ranking(b, dir, rank_of);
      if (std::find(out.begin(), out.end(), seq) == out.end()) out.push_back(std::move(seq));
      return;
    }
    auto [lo, hi] = groups[gi];
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(lo), order.begin() + static_cast<std::ptrdiff_t>(hi));
    do {
      rec(gi + 1);
    } while (std::next_permutation(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                   order.begin() + static_cast<std::ptrdiff_t>(hi)));
  };
  rec(0);
  return out;
}

std::vector<FactorSet> criterion_sequence(const BlockStructure& b, Direction dir,
                                          const std::optional<std::vector<int>>& priority) {
  if (priority) {
    if (priority->size() != b.size()) throw DimensionMismatch("one priority per factor expected");
    std::vector<int> order(b.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return (*priority)[static_cast<std::size_t>(x)] > (*priority)[static_cast<std::size_t>(y)]; });
    std::vector<int> rank_of(b.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank_of[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
    return sequence_for_ranking(b, dir, rank_of);
  }
  auto alts = criterion_sequence_alternatives(b, dir, std::vector<int>(b.size(), 0));
  if (alts.size() > 1)
    throw AmbiguousOrder("incomparable strata tie and no tiebreak data was supplied (" +
                         std::to_string(alts.size()) + " possible orders)");
  return alts.front();
}

// ------------------------------------------------------------------ variances

bool VarianceVector::feasible(const BlockStructure& b) const {
  if (xi.size() != b.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!b.strictly_finer(i, j)) continue;
      const auto& a = xi[i];
      const auto& c = xi[j];
      if (c.infinite) continue;
      if (a.infinite || a.value > c.value) return false;
    }
  return true;
}

VarianceVector stratum_variance(const BlockStructure& b, std::span<const StratumVariance> sigma2) {
  if (sigma2.size() != b.size()) throw DimensionMismatch("one variance component per factor expected");
  VarianceVector v;
  for (std::size_t f = 0; f < b.size(); ++f) {
    StratumVariance xi;
    // ξ_F = Σ_{G⪯F} (N/n_G) σ²_G
    for (std::size_t g = 0; g < b.size(); ++g) {
      if (!b.finer_or_equal(g, f)) continue;
      if (sigma2[g].infinite) {
        xi.infinite = true;
        continue;
      }
      xi.value += Rational(static_cast<std::int64_t>(b.N()) / b.factor(g).n_classes()) * sigma2[g].value;
    }
    if (xi.infinite) xi.value = 0;
    v.xi.push_back(xi);
  }
  return v;
}

}  // namespace msd
