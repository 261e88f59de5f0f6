#include "msd/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "msd/aberration.hpp"
#include "msd/block_structure.hpp"
#include "msd/design_io.hpp"
#include "msd/design_key.hpp"
#include "msd/errors.hpp"
#include "msd/gf2.hpp"
#include "msd/sib.hpp"

namespace msd {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : Error {
  using Error::Error;
};

struct Config {
  std::string structure, class_table, split;
  std::string mode = "regular";
  std::string criterion = "forward";
  std::optional<std::size_t> n, l0;
  std::size_t S = 50, T = 50;
  std::string q_gb, q_lb, q_new;
  std::uint64_t seed = 1;
  bool reduce = true, distinct = false, distinct_rows = false, trace = false;
  unsigned threads = 1;
  std::string out_dir;
  std::optional<std::size_t> patience;
  std::string fixed_design, searched_side = "rows", searched_names;
  std::vector<std::string> forbid, constant;
  double max_space = 1e6;
  std::string design, groups;
  bool show_table = false;
};

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto a = cur.find_first_not_of(" \t");
    const auto b = cur.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(cur.substr(a, b - a + 1));
  }
  return out;
}

std::vector<int> int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (const auto& t : split_list(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad integer list for ") + what + ": " + s);
    }
  }
  return out;
}

int name_index(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw UsageError("unknown factor " + name);
}

BlockStructure load_structure(const Config& c, bool power_of_two) {
  if (!c.structure.empty() && !c.class_table.empty()) throw UsageError("give --structure or --class-table, not both");
  if (!c.class_table.empty()) return load_class_table(c.class_table);
  if (c.structure.empty()) throw UsageError("--structure or --class-table is required");
  return parse_structure(c.structure, {.require_power_of_two = power_of_two});
}

std::string sequence_text(const BlockStructure& b, const std::vector<FactorSet>& seq) {
  std::string s;
  for (const auto& g : seq) s += (s.empty() ? "G" : " -> G") + std::to_string(subset_label(b, g));
  return s;
}

std::vector<std::vector<FactorSet>> sequences(const BlockStructure& b, const std::string& crit,
                                              const std::optional<std::vector<int>>& priority) {
  if (crit == "forward" || crit == "backward") {
    const auto dir = crit == "forward" ? Direction::Forward : Direction::Backward;
    try {
      return {criterion_sequence(b, dir, priority)};
    } catch (const AmbiguousOrder&) {
      return criterion_sequence_alternatives(b, dir, priority.value_or(std::vector<int>(b.size(), 0)));
    }
  }
  const auto sets = admissible_subsets(b);
  std::vector<FactorSet> seq;
  for (auto tok : split_list(crit)) {
    if (!tok.empty() && (tok[0] == 'G' || tok[0] == 'g')) tok.erase(0, 1);
    const auto label = int_list(tok, "--criterion");
    if (label.size() != 1 || label[0] < 1 || static_cast<std::size_t>(label[0]) > sets.size())
      throw UsageError("--criterion must be forward, backward or a list of G labels 1.." +
                       std::to_string(sets.size()));
    seq.push_back(sets[static_cast<std::size_t>(label[0] - 1)]);
  }
  if (seq.empty()) throw UsageError("--criterion names no G sets");
  return {seq};
}

json rational_json(const Rational& r) {
  if (r.denominator() == 1) return r.numerator();
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

json table_json(const WordlengthTable& t, const BlockStructure& b) {
  json j;
  j["strata"] = t.strata_names();
  j["N"] = t.N();
  json bk = json::array();
  for (std::size_t k = 1; k <= t.n(); ++k) {
    json row = json::array();
    for (std::size_t i = 0; i < t.strata(); ++i) row.push_back(rational_json(t.at(k, i)));
    bk.push_back(row);
  }
  j["B"] = bk;
  json pats = json::object();
  const auto sets = admissible_subsets(b);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    json v = json::array();
    for (const auto& x : compute_WG(t, b, sets[i])) v.push_back(rational_json(x));
    pats["G" + std::to_string(i + 1)] = {{"set", describe_set(b, sets[i])}, {"pattern", v}};
  }
  j["patterns"] = pats;
  return j;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p);
  if (!f) throw FormatError("cannot write " + p.string());
  f << s;
}

std::string lines_text(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string s = "iteration,criterion\n";
  for (const auto& r : trace) {
    s += std::to_string(r.iteration) + ",\"";
    for (std::size_t i = 0; i < r.global_best.size(); ++i) s += (i ? " " : "") + format_rational(r.global_best[i]);
    s += "\"\n";
  }
  return s;
}

json q_json(const QVector& q) { return {{"gb", q.gb}, {"lb", q.lb}, {"new", q.nw}}; }

fs::path bundle_dir(const Config& c, std::size_t alt, std::size_t alts) {
  fs::path d = c.out_dir;
  if (alts > 1) d /= "order" + std::to_string(alt + 1);
  fs::create_directories(d);
  return d;
}

// ------------------------------------------------------------------ regular

QVector regular_q(const Config& c, const std::vector<int>& capacity) {
  auto pick = [](const std::string& s, int dflt, const char* what) {
    return s.empty() ? std::vector<int>{dflt} : int_list(s, what);
  };
  const auto gb = pick(c.q_gb, 4, "--q-gb"), lb = pick(c.q_lb, 1, "--q-lb"), nw = pick(c.q_new, 5, "--q-new");
  const std::size_t m = capacity.size();
  if (gb.size() == m && lb.size() == m && nw.size() == m && m != 1) return {gb, lb, nw};
  if (gb.size() == 1 && lb.size() == 1 && nw.size() == 1) {
    if (c.q_gb.empty() && c.q_lb.empty() && c.q_new.empty()) return distribute_q(gb[0], lb[0], nw[0], capacity);
    const int cap = std::accumulate(capacity.begin(), capacity.end(), 0);
    if (gb[0] + lb[0] + nw[0] > cap)
      throw InvalidQ("q totals " + std::to_string(gb[0] + lb[0] + nw[0]) + " exceed the " + std::to_string(cap) +
                     " searchable generators");
    return distribute_q(gb[0], lb[0], nw[0], capacity);
  }
  throw InvalidQ("q lists need one entry per stratum (" + std::to_string(m) + ") or a single total");
}

int run_regular(const Config& c, bool oracle, std::ostream& out, std::ostream& err) {
  const auto b = load_structure(c, true);
  if (!c.n) throw UsageError("--n is required");
  std::optional<FactorSplit> split;
  if (!c.split.empty()) split = parse_split(c.split, *c.n);
  const auto t = template_for(b, *c.n, c.l0, split);
  const KeyOptions ko{c.reduce, c.distinct};
  const auto seqs = sequences(b, c.criterion, t.priority);

  out << "structure: " << b.describe() << "\n";
  out << "template:\n" << t.render();
  for (std::size_t a = 0; a < seqs.size(); ++a) {
    const RegularProblem pr(b, t, ko, seqs[a]);
    out << "order: " << sequence_text(b, seqs[a]) << "\n";
    if (oracle) {
      const auto res = regular_oracle(pr, c.max_space);
      out << "space: " << static_cast<long long>(res.space) << " combinations, " << res.evaluated << " admissible\n";
      if (res.optimum_count == 0) {
        out << "no admissible design key\n";
        continue;
      }
      out << "optimum designs: " << res.optimum_count << "\n";
      out << lines_text(report_lines(pr.table(res.optima.front()), b));
      continue;
    }
    SearchOptions so;
    so.S = c.S;
    so.T = c.T;
    so.seed = c.seed;
    so.threads = c.threads;
    so.patience = c.patience;
    so.q = regular_q(c, pr.capacity());
    for (const auto& w : validate_q(so.q, pr.capacity())) err << "warning: " << w << "\n";
    const auto res = run_algorithm3(pr, so);
    const auto report = report_lines(res.table, b);
    out << lines_text(report);
    out << "co-optimal designs: " << res.co_optimal.size() << "\n";

    std::string key = "template:\n" + t.render() + "\nkey:\n" + design_key(t, res.best.gs).render() + "\ngenerators:\n";
    for (const auto& w : generator_words(t, res.best.gs))
      key += "  " + t.stratum_names.at(static_cast<std::size_t>(w.stratum)) + ": " + word_string(w.word, t.letters) +
             (w.derived ? " (derived)" : "") + "\n";
    out << key;

    if (!c.out_dir.empty()) {
      const auto dir = bundle_dir(c, a, seqs.size());
      save_design((dir / "design.csv").string(), expand_design(t, res.best.gs, b));
      write_text(dir / "design_key.txt", key);
      write_text(dir / "report.txt", lines_text(report));
      json rep = table_json(res.table, b);
      rep["order"] = sequence_text(b, seqs[a]);
      write_text(dir / "report.json", rep.dump(2) + "\n");
      json meta = {{"mode", "regular"},
                   {"structure", c.structure},
                   {"n", *c.n},
                   {"l0", t.l0},
                   {"criterion", c.criterion},
                   {"order", sequence_text(b, seqs[a])},
                   {"seed", c.seed},
                   {"S", c.S},
                   {"T", c.T},
                   {"q", q_json(so.q)},
                   {"reduced_pools", c.reduce},
                   {"iterations", res.iterations},
                   {"co_optimal", res.co_optimal.size()},
                   {"seconds", res.seconds}};
      write_text(dir / "metadata.json", meta.dump(2) + "\n");
      if (c.trace) write_text(dir / "trace.csv", trace_csv(res.trace));
    }
  }
  return 0;
}

// --------------------------------------------------------------- nonregular

int level_of(const std::string& s) {
  if (s == "-1" || s == "-") return -1;
  if (s == "1" || s == "+1" || s == "+") return 1;
  throw UsageError("levels must be -1 or 1, got " + s);
}

int run_nonregular(const Config& c, bool oracle, std::ostream& out, std::ostream& err) {
  const auto b = load_structure(c, false);
  std::vector<std::string> names;
  std::optional<CrossedLayout> layout;
  if (!c.fixed_design.empty()) {
    const auto fixed = load_design(c.fixed_design);
    std::vector<std::string> searched = split_list(c.searched_names);
    if (searched.empty()) {
      if (!c.n || *c.n <= fixed.cols()) throw UsageError("--n must exceed the fixed sub-design's factor count");
      for (const auto& l : default_letters(*c.n + fixed.cols()))
        if (searched.size() < *c.n - fixed.cols() && std::find(fixed.names.begin(), fixed.names.end(), l) == fixed.names.end())
          searched.push_back(l);
    }
    if (c.n && *c.n != searched.size() + fixed.cols())
      throw UsageError("--n disagrees with the searched and fixed factor names");
    CrossedLayout l;
    if (c.searched_side != "rows" && c.searched_side != "cols") throw UsageError("--searched-side is rows or cols");
    l.searched_outer = c.searched_side == "rows";
    const auto& outer = l.searched_outer ? searched : fixed.names;
    const auto& inner = l.searched_outer ? fixed.names : searched;
    names = outer;
    names.insert(names.end(), inner.begin(), inner.end());
    for (std::size_t i = 0; i < searched.size(); ++i) l.searched_factors.push_back(name_index(names, searched[i]));
    for (std::size_t i = 0; i < fixed.cols(); ++i) l.fixed_factors.push_back(name_index(names, fixed.names[i]));
    for (std::size_t r = 0; r < fixed.rows; ++r) {
      std::vector<int> run;
      for (std::size_t col = 0; col < fixed.cols(); ++col) run.push_back(fixed.at(r, col));
      l.fixed_runs.push_back(run);
    }
    layout = l;
  } else {
    if (!c.n) throw UsageError("--n is required");
    names = c.searched_names.empty() ? default_letters(*c.n) : split_list(c.searched_names);
    if (names.size() != *c.n) throw UsageError("--searched-names must list --n names");
  }

  Constraints cons;
  cons.distinct_rows = c.distinct_rows;
  for (const auto& f : c.forbid) {
    ForbiddenCombination fc;
    for (const auto& part : split_list(f)) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw UsageError("--forbid entries look like A=-1,B=1");
      fc.factors.push_back(name_index(names, part.substr(0, eq)));
      fc.levels.push_back(level_of(part.substr(eq + 1)));
    }
    cons.forbidden.push_back(fc);
  }
  for (const auto& k : c.constant) {
    const auto colon = k.find(':');
    if (colon == std::string::npos) throw UsageError("--constant entries look like A:R");
    const int uf = b.index_of(k.substr(colon + 1));
    if (uf < 0) throw UsageError("unknown unit factor in --constant " + k);
    cons.constant.push_back({name_index(names, k.substr(0, colon)), uf});
  }

  const auto seqs = sequences(b, c.criterion, std::nullopt);
  out << "structure: " << b.describe() << "\n";
  for (std::size_t a = 0; a < seqs.size(); ++a) {
    const NonregularProblem pr(b, names, seqs[a], cons, layout);
    out << "order: " << sequence_text(b, seqs[a]) << "\n";
    if (oracle) {
      const auto res = nonregular_oracle(pr, c.max_space);
      if (res.optimum_count == 0) {
        out << "no admissible assignment\n";
        continue;
      }
      out << "space: " << static_cast<long long>(res.space) << " assignments\n";
      out << "optimum designs: " << res.optimum_count << "\n";
      out << lines_text(report_lines(pr.table(res.optima.front()), b));
      continue;
    }
    SearchOptions so;
    so.S = c.S;
    so.T = c.T;
    so.seed = c.seed;
    so.threads = c.threads;
    so.patience = c.patience;
    auto one = [](const std::string& s, const char* what) {
      const auto v = int_list(s, what);
      if (v.size() != 1) throw InvalidQ(std::string(what) + " takes a single value in nonregular mode");
      return v[0];
    };
    int gb = c.q_gb.empty() ? 2 : one(c.q_gb, "--q-gb");
    int lb = c.q_lb.empty() ? 2 : one(c.q_lb, "--q-lb");
    int nw = c.q_new.empty() ? 4 : one(c.q_new, "--q-new");
    // Defaults shrink to fit small particles; explicit values are checked as given.
    const int P = static_cast<int>(pr.positions());
    for (int* v : {&nw, &gb, &lb})
      while (gb + lb + nw > P && *v > 0 &&
             ((v == &nw && c.q_new.empty()) || (v == &gb && c.q_gb.empty()) || (v == &lb && c.q_lb.empty())))
        --*v;
    so.q = QVector::scalar(gb, lb, nw);
    if (gb + lb + nw > P) throw InvalidQ("q_gb + q_lb + q_new exceeds " + std::to_string(P) + " positions");
    if (!(nw >= gb && gb >= lb)) err << "warning: suggested ordering q_new >= q_gb >= q_lb does not hold\n";

    const auto res = run_algorithm4(pr, so);
    const auto report = report_lines(res.table, b);
    out << lines_text(report);
    out << "co-optimal designs: " << res.co_optimal.size() << "\n";
    if (!c.out_dir.empty()) {
      const auto dir = bundle_dir(c, a, seqs.size());
      save_design((dir / "design.csv").string(), pr.design(res.best.rows));
      write_text(dir / "report.txt", lines_text(report));
      json rep = table_json(res.table, b);
      rep["order"] = sequence_text(b, seqs[a]);
      write_text(dir / "report.json", rep.dump(2) + "\n");
      json meta = {{"mode", "nonregular"},
                   {"structure", c.structure.empty() ? c.class_table : c.structure},
                   {"factors", names},
                   {"criterion", c.criterion},
                   {"order", sequence_text(b, seqs[a])},
                   {"seed", c.seed},
                   {"S", c.S},
                   {"T", c.T},
                   {"q", q_json(so.q)},
                   {"iterations", res.iterations},
                   {"co_optimal", res.co_optimal.size()},
                   {"seconds", res.seconds}};
      write_text(dir / "metadata.json", meta.dump(2) + "\n");
      if (c.trace) write_text(dir / "trace.csv", trace_csv(res.trace));
    }
  }
  return 0;
}

int run_evaluate(const Config& c, std::ostream& out) {
  if (c.design.empty()) throw UsageError("--design is required");
  const auto b = load_structure(c, false);
  const auto d = load_design(c.design);
  if (d.rows != b.N())
    throw DimensionMismatch("design has " + std::to_string(d.rows) + " runs but the structure has " +
                            std::to_string(b.N()) + " units");
  const auto table = ClassSumEvaluator(b, d.cols()).table(d);
  std::vector<int> labels;
  for (auto tok : split_list(c.groups)) {
    if (!tok.empty() && (tok[0] == 'G' || tok[0] == 'g')) tok.erase(0, 1);
    const auto v = int_list(tok, "--G");
    labels.insert(labels.end(), v.begin(), v.end());
  }
  const auto sets = admissible_subsets(b);
  for (int l : labels)
    if (l < 1 || static_cast<std::size_t>(l) > sets.size())
      throw UsageError("G label " + std::to_string(l) + " out of range 1.." + std::to_string(sets.size()));
  if (c.show_table) {
    out << "k";
    for (const auto& s : table.strata_names()) out << "\t" << s;
    out << "\n";
    for (std::size_t k = 1; k <= table.n(); ++k) {
      out << k;
      for (std::size_t i = 0; i < table.strata(); ++i) out << "\t" << format_rational(table.at(k, i));
      out << "\n";
    }
  }
  out << lines_text(report_lines(table, b, labels));
  return 0;
}

// JSON config values become leading "--key=value" arguments, so later flags win.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError("config " + path + " must hold an object");
  std::vector<std::string> out;
  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    return v.dump();
  };
  for (const auto& [k, v] : j.items()) {
    const std::string flag = "--" + k;
    if (v.is_array()) {
      if (k == "forbid" || k == "constant")
        for (const auto& e : v) out.push_back(flag + "=" + scalar(e));
      else {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : ",") + scalar(e);
        out.push_back(flag + "=" + s);
      }
    } else {
      out.push_back(flag + "=" + scalar(v));
    }
  }
  return out;
}

void add_structure_options(CLI::App* app, Config& c) {
  app->add_option("--structure", c.structure, "block structure, e.g. 8/4 or \"2/(4x4)\"");
  app->add_option("--class-table", c.class_table, "class table file (one integer column per unit factor)");
}

void add_search_options(CLI::App* app, Config& c) {
  add_structure_options(app, c);
  app->add_option("--n", c.n, "number of treatment factors");
  app->add_option("--l0", c.l0, "number of U-generators (fraction size)");
  app->add_option("--split", c.split, "factor split for crossed keys, rows=A..F,cols=G..J");
  app->add_option("--mode", c.mode, "regular or nonregular")->check(CLI::IsMember({"regular", "nonregular"}));
  app->add_option("--criterion", c.criterion, "forward, backward or a G label list such as G1,G3");
  app->add_option("--S", c.S, "swarm size")->check(CLI::PositiveNumber);
  app->add_option("--T", c.T, "iterations");
  app->add_option("--q-gb", c.q_gb, "generators or runs taken from the global best");
  app->add_option("--q-lb", c.q_lb, "generators or runs taken from the local best");
  app->add_option("--q-new", c.q_new, "generators or runs drawn fresh");
  app->add_option("--seed", c.seed, "master seed");
  app->add_flag("--reduce-pools,!--full-pools", c.reduce, "use the reduced pools (default on)");
  app->add_flag("--distinct", c.distinct, "distinct fill-ins within a stratum");
  app->add_flag("--distinct-rows", c.distinct_rows, "forbid repeated runs (nonregular)");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out-dir", c.out_dir, "write the result bundle here");
  app->add_flag("--trace", c.trace, "write trace.csv with the global best per iteration");
  app->add_option("--patience", c.patience, "stop after this many iterations without improvement");
  app->add_option("--fixed-design", c.fixed_design, "fixed sub-design crossed with the searched one (nonregular)");
  app->add_option("--searched-side", c.searched_side, "rows or cols: where the searched sub-design sits");
  app->add_option("--searched-names", c.searched_names, "names of the searched factors");
  app->add_option("--forbid", c.forbid, "forbidden level combination, e.g. x1=-1,x2=-1")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app->add_option("--constant", c.constant, "factor held constant within a unit factor, e.g. A:R")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app->add_option("--max-space", c.max_space, "largest search space the oracle will enumerate");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Multi-stratum two-level design search"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config;
  auto* search = app.add_subcommand("search", "search for a minimum aberration design");
  auto* oracle = app.add_subcommand("oracle", "exhaustively find the optimum of a small instance");
  auto* evaluate = app.add_subcommand("evaluate", "report the wordlength patterns of a design file");
  for (auto* sub : {search, oracle}) {
    add_search_options(sub, c);
    sub->add_option("--config", config, "JSON file of option values; flags override it");
  }
  add_structure_options(evaluate, c);
  evaluate->add_option("--design", c.design, "design table file")->required();
  evaluate->add_option("--G", c.groups, "G labels to report, e.g. 1,2 (default all)");
  evaluate->add_flag("--table", c.show_table, "also print the B_{k,i} table");

  try {
    std::vector<std::string> argv{"msdesign"};
    // Splice config values in right after the subcommand.
    for (std::size_t i = 0; i < args.size(); ++i) {
      const auto& a = args[i];
      std::string path;
      if (a == "--config" && i + 1 < args.size()) path = args[i + 1];
      else if (a.rfind("--config=", 0) == 0) path = a.substr(9);
      if (!path.empty()) {
        const auto extra = config_args(path);
        std::vector<std::string> spliced(args.begin(), args.begin() + (args.empty() ? 0 : 1));
        spliced.insert(spliced.end(), extra.begin(), extra.end());
        spliced.insert(spliced.end(), args.begin() + (args.empty() ? 0 : 1), args.end());
        argv.insert(argv.end(), spliced.begin(), spliced.end());
        break;
      }
    }
    if (argv.size() == 1) argv.insert(argv.end(), args.begin(), args.end());
    std::vector<const char*> raw;
    for (const auto& s : argv) raw.push_back(s.c_str());
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (evaluate->parsed()) return run_evaluate(c, out);
    const bool is_oracle = oracle->parsed();
    if (c.mode == "nonregular") return run_nonregular(c, is_oracle, out, err);
    return run_regular(c, is_oracle, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace msd
