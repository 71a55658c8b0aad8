// modal: batch front end for the workbench.
//
// Subcommands check proof corpus files and run the finite-model semantics
// (nuclei, sheafification, fracture, factorization) plus the full property
// suite.  Output is deterministic: no timestamps or durations unless
// --verbose is given, so repeated runs on identical inputs are byte-equal.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 usage or input error.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modal/kernel.hpp"
#include "modal/nuclei.hpp"
#include "modal/parser.hpp"
#include "modal/printer.hpp"
#include "modal/sheaves.hpp"
#include "modal/suite.hpp"

namespace {

using namespace modal::tt;
using namespace modal::sem;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_check(const std::string& path) {
  SourceFile file = parse(slurp(path));
  for (const auto& def : file.defs) {
    try {
      check({}, def.body, def.classifier);
    } catch (const TypeError& e) {
      std::cout << "FAIL  " << def.name << " (line " << def.line << ")\n"
                << e.rendered << "\n";
      return 1;
    }
    std::cout << "PASS  " << def.name << "\n";
  }
  std::cout << "ok (" << file.defs.size() << " definitions)\n";
  return 0;
}

int run_eval(const std::string& path, const std::string& name) {
  SourceFile file = parse(slurp(path));
  for (const auto& def : file.defs) {
    if (def.name != name) continue;
    std::cout << print_term(normalize({}, def.body, def.classifier)) << "\n";
    return 0;
  }
  std::cerr << "error: no definition named '" << name << "' in " << path << "\n";
  return 2;
}

// ---------------------------------------------------------------------------
// Semantics plumbing: loading posets, nuclei, presheaves, and maps

FinitePoset load_poset(const std::string& path) {
  return parse_poset(slurp(path));
}

std::string nucleus_str(const Frame& f, const Nucleus& j) {
  std::ostringstream ss;
  ss << "{";
  for (int a = 0; a < f.size(); ++a) {
    if (a) ss << ", ";
    ss << f.name(a) << ": " << f.name(j(a));
  }
  ss << "}";
  return ss.str();
}

// Named constructors: open:q | closed:q | dneg | id | top, with q a down-set
// written as a comma list of poset elements ("{a,b}", "a,b", or "{}").
Nucleus parse_nucleus_spec(const Frame& f, const std::string& spec) {
  if (spec == "id") return mk_id(f);
  if (spec == "top") return mk_top(f);
  if (spec == "dneg") return mk_dneg(f);
  if (spec.rfind("open:", 0) == 0)
    return mk_open(f, f.index_of(parse_downset(f.poset, spec.substr(5))));
  if (spec.rfind("closed:", 0) == 0)
    return mk_closed(f, f.index_of(parse_downset(f.poset, spec.substr(7))));
  throw ModelError("BadInput", "unknown nucleus specifier '" + spec +
                                   "' (expected open:q|closed:q|dneg|id|top)");
}

// Raw table file for negative tests: a JSON object mapping down-set names to
// down-set names, e.g. {"{}": "{}", "{a}": "{a,b}", "{a,b}": "{a,b}"}.
// The table must satisfy the nucleus laws or loading fails.
Nucleus load_nucleus_table(const Frame& f, const std::string& path) {
  json doc;
  try {
    doc = json::parse(slurp(path));
  } catch (const json::exception&) {
    throw ModelError("BadInput", "malformed nucleus table JSON in " + path);
  }
  if (!doc.is_object())
    throw ModelError("BadInput", "nucleus table must be a JSON object");
  std::vector<int> table(f.size(), -1);
  for (const auto& [key, val] : doc.items()) {
    if (!val.is_string())
      throw ModelError("BadInput", "nucleus table images must be down-set names");
    int a = f.index_of(parse_downset(f.poset, key));
    table[a] = f.index_of(parse_downset(f.poset, val.get<std::string>()));
  }
  for (int a = 0; a < f.size(); ++a)
    if (table[a] < 0)
      throw ModelError("BadInput",
                       "nucleus table has no image for " + f.name(a));
  LawWitness w;
  if (!is_nucleus(f, table, &w)) {
    std::string where;
    if (w.a >= 0) where += " at " + f.name(w.a);
    if (w.b >= 0) where += ", " + f.name(w.b);
    throw ModelError("BadInput", "the table is not a nucleus: it breaks the '" +
                                     w.law + "' law" + where);
  }
  return Nucleus{table};
}

// Presheaf file: {"poset": <name or inline>, "sets": ..., "restrictions": ...}.
// An inline poset object must agree with --poset; a string is just a label.
Presheaf load_presheaf(const FinitePoset& po, const std::string& path) {
  std::string text = slurp(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception&) {
    throw ModelError("BadInput", "malformed presheaf JSON in " + path);
  }
  if (doc.is_object() && doc.contains("poset") && doc["poset"].is_object()) {
    FinitePoset inner = parse_poset(doc["poset"].dump());
    if (!same_poset(po, inner))
      throw ModelError("BadInput",
                       "the presheaf's inline poset disagrees with --poset");
  }
  return parse_presheaf(po, text);
}

// Map file: {"source": <presheaf doc>, "target": <presheaf doc>,
//            "map": {"p": {"xid": "yid", ...}, ...}}.
struct LoadedMap {
  Presheaf X, Y;
  PresheafMap m;
};

LoadedMap load_map(const FinitePoset& po, const std::string& path) {
  json doc;
  try {
    doc = json::parse(slurp(path));
  } catch (const json::exception&) {
    throw ModelError("BadInput", "malformed map JSON in " + path);
  }
  if (!doc.is_object() || !doc.contains("source") || !doc.contains("target") ||
      !doc.contains("map") || !doc["map"].is_object())
    throw ModelError("BadInput",
                     "a map file needs 'source', 'target', and 'map' entries");
  Presheaf X = parse_presheaf(po, doc["source"].dump());
  Presheaf Y = parse_presheaf(po, doc["target"].dump());
  std::vector<std::vector<int>> comp(po.n());
  for (int p = 0; p < po.n(); ++p) {
    const std::string& elem = po.elements[p];
    json entry = doc["map"].contains(elem) ? doc["map"][elem] : json::object();
    comp[p].assign(X.stalk(p), -1);
    for (int x = 0; x < X.stalk(p); ++x) {
      const std::string& id = X.ids[p][x];
      if (!entry.contains(id) || !entry[id].is_string())
        throw ModelError("BadInput", "map gives no image for '" + id +
                                         "' at " + elem);
      std::string target = entry[id].get<std::string>();
      for (int y = 0; y < Y.stalk(p); ++y)
        if (Y.ids[p][y] == target) comp[p][x] = y;
      if (comp[p][x] < 0)
        throw ModelError("BadInput", "map sends '" + id + "' to unknown id '" +
                                         target + "' at " + elem);
    }
  }
  return LoadedMap{X, Y, make_presheaf_map(X, Y, comp)};
}

// ---------------------------------------------------------------------------
// Report printing

std::vector<std::pair<int, int>> cover_pairs(const FinitePoset& po) {
  std::vector<std::pair<int, int>> covers;  // (upper, lower)
  for (int p = 0; p < po.n(); ++p)
    for (int q = 0; q < po.n(); ++q) {
      if (p == q || !po.leq[q][p]) continue;
      bool direct = true;
      for (int r = 0; r < po.n(); ++r)
        if (r != p && r != q && po.leq[q][r] && po.leq[r][p]) direct = false;
      if (direct) covers.push_back({p, q});
    }
  return covers;
}

void print_presheaf(const Presheaf& X, const std::string& indent) {
  for (int p = 0; p < X.points(); ++p) {
    std::cout << indent << X.poset.elements[p] << ": [";
    for (int x = 0; x < X.stalk(p); ++x)
      std::cout << (x ? ", " : "") << X.ids[p][x];
    std::cout << "]\n";
  }
  for (auto [p, q] : cover_pairs(X.poset)) {
    std::cout << indent << "restriction " << X.poset.elements[p] << ">"
              << X.poset.elements[q] << ": {";
    for (int x = 0; x < X.stalk(p); ++x)
      std::cout << (x ? ", " : "") << X.ids[p][x] << ": "
                << X.ids[q][X.restrict(p, x, q)];
    std::cout << "}\n";
  }
}

void print_map(const Presheaf& X, const Presheaf& Y, const PresheafMap& m,
               const std::string& indent) {
  for (int p = 0; p < X.points(); ++p) {
    std::cout << indent << X.poset.elements[p] << ": {";
    for (int x = 0; x < X.stalk(p); ++x)
      std::cout << (x ? ", " : "") << X.ids[p][x] << ": "
                << Y.ids[p][m.comp[p][x]];
    std::cout << "}\n";
  }
}

std::string stalk_sizes(const Presheaf& X) {
  std::ostringstream ss;
  for (int p = 0; p < X.points(); ++p)
    ss << (p ? ", " : "") << X.poset.elements[p] << ": " << X.stalk(p);
  return ss.str();
}

// ---------------------------------------------------------------------------
// Semantics subcommands

int run_nuclei(const std::string& posetPath, bool coframe,
               const std::string& tautQ) {
  FinitePoset po = load_poset(posetPath);
  Frame f = downset_frame(po);
  if (coframe) {
    size_t count = enumerate_nuclei(f).size();
    bool ok = coframe_check(f);
    std::cout << (ok ? "PASS" : "FAIL")
              << ": join distributes over meets of nuclei (" << count
              << " nuclei)\n";
    return ok ? 0 : 1;
  }
  if (!tautQ.empty()) {
    int q = f.index_of(parse_downset(po, tautQ));
    bool ok = fracture_taut(f, q);
    std::cout << (ok ? "PASS" : "FAIL")
              << ": a = (q or a) and (q => a) for all a, at q = " << f.name(q)
              << "\n";
    return ok ? 0 : 1;
  }
  std::vector<Nucleus> nuclei = enumerate_nuclei(f);
  std::cout << f.size() << "-element frame of down-sets on " << po.n()
            << "-element poset\n";
  for (const Nucleus& j : nuclei)
    std::cout << "nucleus " << nucleus_str(f, j) << "\n";
  std::cout << "ok (" << nuclei.size() << " nuclei)\n";
  return 0;
}

int run_sheafify(const std::string& posetPath, const std::string& presheafPath,
                 const std::string& spec, const std::string& tablePath) {
  FinitePoset po = load_poset(posetPath);
  Frame f = downset_frame(po);
  Nucleus j = tablePath.empty() ? parse_nucleus_spec(f, spec)
                                : load_nucleus_table(f, tablePath);
  Presheaf X = load_presheaf(po, presheafPath);
  Sheafified s = sheafify(f, j, X);
  std::cout << "nucleus " << nucleus_str(f, j) << "\n";
  std::cout << "sheaf:\n";
  print_presheaf(s.sheaf, "  ");
  std::cout << "unit:\n";
  print_map(X, s.sheaf, s.unit, "  ");
  std::cout << "ok\n";
  return 0;
}

int run_fracture(const std::string& posetPath, const std::string& presheafPath,
                 const std::string& qText) {
  FinitePoset po = load_poset(posetPath);
  Presheaf X = load_presheaf(po, presheafPath);
  DownSet q = parse_downset(po, qText);
  FractureReport r = fracture_check(q, X);
  std::cout << "fracture at q = " << downset_name(po, q) << "\n";
  std::cout << "  X              " << stalk_sizes(r.X) << "\n";
  std::cout << "  open corner    " << stalk_sizes(r.openCorner) << "\n";
  std::cout << "  closed corner  " << stalk_sizes(r.closedCorner) << "\n";
  std::cout << "  mixed corner   " << stalk_sizes(r.mixedCorner) << "\n";
  if (r.verdict) {
    std::cout << "PASS: the fracture square is a pullback\n";
    return 0;
  }
  std::cout << "FAIL: " << r.witness << "\n";
  return 1;
}

int run_factorize(const std::string& posetPath, const std::string& mapPath,
                  const std::string& spec, const std::string& tablePath) {
  FinitePoset po = load_poset(posetPath);
  Frame f = downset_frame(po);
  Nucleus j = tablePath.empty() ? parse_nucleus_spec(f, spec)
                                : load_nucleus_table(f, tablePath);
  LoadedMap lm = load_map(po, mapPath);
  Factorization fac = factorize(f, j, lm.X, lm.Y, lm.m);
  std::cout << "nucleus " << nucleus_str(f, j) << "\n";
  std::cout << "factoring (" << stalk_sizes(lm.X) << ") -> ("
            << stalk_sizes(lm.Y) << ")\n";
  std::cout << "Z:\n";
  print_presheaf(fac.Z, "  ");
  std::cout << "pL:\n";
  print_map(lm.X, fac.Z, fac.pL, "  ");
  std::cout << "pR:\n";
  print_map(fac.Z, lm.Y, fac.pR, "  ");
  bool legs = true;
  for (int p = 0; p < lm.X.points(); ++p)
    for (int x = 0; x < lm.X.stalk(p); ++x)
      if (fac.pR.comp[p][fac.pL.comp[p][x]] != lm.m.comp[p][x]) legs = false;
  bool conn = fibers_are_connected(f, j, lm.X, fac.Z, fac.pL);
  bool shf = fibers_are_sheaves(f, j, fac.Z, lm.Y, fac.pR);
  std::cout << (legs ? "PASS" : "FAIL") << ": pR . pL equals the given map\n";
  std::cout << (conn ? "PASS" : "FAIL") << ": left-leg fibers are connected\n";
  std::cout << (shf ? "PASS" : "FAIL") << ": right-leg fibers are sheaves\n";
  return (legs && conn && shf) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modal homotopy workbench: proof checking and finite-model semantics"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("--verbose", verbose, "print elapsed time after the report");

  std::string file, defName;
  auto* cmdCheck = app.add_subcommand("check", "typecheck every definition in a file");
  cmdCheck->add_option("file", file, "input .mtt file")->required();

  auto* cmdEval = app.add_subcommand("eval", "print the normal form of one definition");
  cmdEval->add_option("file", file, "input .mtt file")->required();
  cmdEval->add_option("--def", defName, "definition name")->required();

  std::string posetPath, presheafPath, mapPath, nucleusSpec = "id";
  std::string tablePath, qText, tautQ;
  bool enumerate = false, coframe = false;

  auto* cmdNuclei = app.add_subcommand(
      "nuclei", "enumerate or test the nuclei of a poset's down-set frame");
  cmdNuclei->add_option("--poset", posetPath, "poset JSON file")->required();
  auto* optEnum = cmdNuclei->add_flag("--enumerate", enumerate,
                                      "list every nucleus (default)");
  auto* optCof = cmdNuclei->add_flag("--coframe", coframe,
                                     "check join-over-meet distributivity");
  auto* optTaut = cmdNuclei->add_option(
      "--fracture-taut", tautQ, "check a = (q or a) and (q => a) at this down-set");
  optEnum->excludes(optCof)->excludes(optTaut);
  optCof->excludes(optTaut);

  auto* cmdSheafify = app.add_subcommand(
      "sheafify", "sheafify a presheaf for a nucleus and print sheaf and unit");
  cmdSheafify->add_option("--poset", posetPath, "poset JSON file")->required();
  cmdSheafify->add_option("--presheaf", presheafPath, "presheaf JSON file")->required();
  auto* optSpec = cmdSheafify->add_option(
      "--nucleus", nucleusSpec, "nucleus: open:q|closed:q|dneg|id|top");
  auto* optTable = cmdSheafify->add_option(
      "--nucleus-table", tablePath, "raw nucleus table JSON (validated on load)");
  optSpec->excludes(optTable);

  auto* cmdFracture = app.add_subcommand(
      "fracture", "check the open/closed fracture square of a presheaf");
  cmdFracture->add_option("--poset", posetPath, "poset JSON file")->required();
  cmdFracture->add_option("--presheaf", presheafPath, "presheaf JSON file")->required();
  cmdFracture->add_option("--q", qText, "down-set, e.g. 'a' or '{a,b}'")->required();

  auto* cmdFactorize = app.add_subcommand(
      "factorize", "factor a presheaf map as connected-then-sheaf");
  cmdFactorize->add_option("--poset", posetPath, "poset JSON file")->required();
  cmdFactorize->add_option("--map", mapPath, "map JSON file (source/target/map)")->required();
  auto* optSpec2 = cmdFactorize->add_option(
      "--nucleus", nucleusSpec, "nucleus: open:q|closed:q|dneg|id|top");
  auto* optTable2 = cmdFactorize->add_option(
      "--nucleus-table", tablePath, "raw nucleus table JSON (validated on load)");
  optSpec2->excludes(optTable2);

  std::string root = ".";
  auto* cmdSuite = app.add_subcommand(
      "suite", "run the full acceptance suite (one PASS/FAIL line per criterion)");
  cmdSuite->add_option("--root", root,
                       "repository root containing stdlib/ and tests/");
  cmdSuite->add_flag("--verbose", verbose, "print check counts and timings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  int code = 2;
  try {
    if (*cmdCheck) code = run_check(file);
    else if (*cmdEval) code = run_eval(file, defName);
    else if (*cmdNuclei) code = run_nuclei(posetPath, coframe, tautQ);
    else if (*cmdSheafify) code = run_sheafify(posetPath, presheafPath, nucleusSpec, tablePath);
    else if (*cmdFracture) code = run_fracture(posetPath, presheafPath, qText);
    else if (*cmdFactorize) code = run_factorize(posetPath, mapPath, nucleusSpec, tablePath);
    else if (*cmdSuite) code = modal::run_acceptance(root, std::cout, verbose) == 0 ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << e.rendered << "\n";
    return 2;
  } catch (const TypeError& e) {
    std::cout << e.rendered << "\n";
    return 1;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.rendered << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (verbose) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << "elapsed: " << ms << " ms\n";
  }
  return code;
}
