#ifndef DDLKANT_HARNESS_HPP
#define DDLKANT_HARNESS_HPP

#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kantian.hpp"
#include "scenario.hpp"
#include "search.hpp"
#include "syntax.hpp"

namespace ddlkant {

enum class CellResult { Pass, Fail, Error };

inline const char* cell_name(CellResult c) {
  switch (c) {
    case CellResult::Pass: return "pass";
    case CellResult::Fail: return "fail";
    case CellResult::Error: return "error";
  }
  return "?";
}

inline CellResult cell_from_name(const std::string& s) {
  if (s == "pass") return CellResult::Pass;
  if (s == "fail") return CellResult::Fail;
  if (s == "error") return CellResult::Error;
  throw Error("bad cell result '" + s + "'");
}

enum class TestKind { Validity, CountermodelExistence, Scenario, Capability };

struct FaithfulnessTest {
  std::string id;
  std::string title;
  TestKind kind;
  /// Formula for validity tests, corpus file name for scenario tests.
  std::string payload;
  std::map<std::string, CellResult> expected;
};

struct Cell {
  CellResult result = CellResult::Error;
  /// Human-readable justification: search outcome, verdict, or error reason.
  std::string witness;
  /// Countermodel or model backing the witness, if any.
  nlohmann::json model;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct TestReport {
  int n_worlds = 0;
  int n_subjects = 0;
  std::vector<std::string> tests;    // T1..T8
  std::vector<std::string> systems;  // naive, kroy, custom
  /// cells[test][system]
  std::map<std::string, std::map<std::string, Cell>> cells;
  std::map<std::string, std::vector<std::string>> axiom_sets;
  std::vector<std::string> warnings;
  long long runtime_ms = 0;

  const Cell& at(const std::string& t, const std::string& s) const { return cells.at(t).at(s); }
  int passes(const std::string& sys) const {
    int n = 0;
    for (const auto& t : tests) n += at(t, sys).result == CellResult::Pass;
    return n;
  }
};

inline bool same_matrix(const TestReport& a, const TestReport& b) {
  if (a.tests != b.tests || a.systems != b.systems) return false;
  for (const auto& t : a.tests)
    for (const auto& s : a.systems)
      if (a.at(t, s).result != b.at(t, s).result) return false;
  return true;
}

inline const std::vector<FaithfulnessTest>& faithfulness_tests() {
  using C = CellResult;
  auto row = [](C n, C k, C c) { return std::map<std::string, C>{{"naive", n}, {"kroy", k}, {"custom", c}}; };
  static const std::vector<FaithfulnessTest> tests = {
      {"T1", "FUL stronger than DDL", TestKind::CountermodelExistence, "", row(C::Fail, C::Pass, C::Pass)},
      {"T2", "obligation universalizes", TestKind::Validity,
       "(forall-open a (forall-term c (forall-subject s (forall-subject p "
       "(implies (ob (act a s) c) (ob (act a p) c))))))",
       row(C::Fail, C::Pass, C::Pass)},
      {"T3", "no contradictory obligations", TestKind::Validity,
       "(forall-term a (forall-term c (not (and (ob a c) (ob (not a) c)))))", row(C::Fail, C::Fail, C::Pass)},
      {"T4", "distributive", TestKind::Validity, "", row(C::Fail, C::Fail, C::Pass)},
      {"T5", "un-universalizable maxims prohibited", TestKind::Scenario, "unreachable-goal.ked",
       row(C::Fail, C::Fail, C::Pass)},
      {"T6", "evaluates maxims", TestKind::Capability, "", row(C::Fail, C::Fail, C::Pass)},
      {"T7", "conventional acts", TestKind::Scenario, "false-promising.ked", row(C::Fail, C::Fail, C::Pass)},
      {"T8", "natural acts", TestKind::Scenario, "killing-for-sleep.ked", row(C::Fail, C::Fail, C::Pass)},
  };
  return tests;
}

struct SuiteOptions {
  int n_worlds = 3;
  int n_subjects = 2;
#ifdef DDLKANT_CORPUS_DIR
  std::string corpus_dir = DDLKANT_CORPUS_DIR;
#else
  std::string corpus_dir = "corpus";
#endif
  KantOptions kant;
  SearchOptions search;
};

namespace detail {

inline Cell validity_cell(const System& sys, const Formula& goal, const Bounds& b, const SearchOptions& so) {
  SearchResult r = check_valid(sys.axioms, goal, b, so);
  Cell c;
  c.witness = describe(r);
  if (r.model) c.model = to_json(*r.model);
  c.result = r.outcome == Outcome::ValidAtBounds      ? CellResult::Pass
             : r.outcome == Outcome::CountermodelFound ? CellResult::Fail
                                                       : CellResult::Error;
  return c;
}

/// Passes when some axiom of the system has a countermodel in base DDL.
inline Cell independence_cell(const System& sys, const Bounds& b, const SearchOptions& so) {
  Cell c;
  if (sys.axioms.empty()) {
    c.result = CellResult::Fail;
    c.witness = "no axioms beyond base DDL";
    return c;
  }
  for (std::size_t i = 0; i < sys.axioms.size(); ++i) {
    SearchResult r = check_valid({}, sys.axioms[i], b, so);
    if (r.outcome == Outcome::BudgetExceeded) {
      c.result = CellResult::Error;
      c.witness = describe(r);
      return c;
    }
    if (r.outcome == Outcome::CountermodelFound) {
      c.result = CellResult::Pass;
      c.witness = sys.axiom_names[i] + ": " + describe(r) + " in base DDL";
      c.model = to_json(*r.model);
      return c;
    }
  }
  c.result = CellResult::Fail;
  c.witness = "every axiom valid in base DDL at bounds (" + bounds_label(b.n_worlds, b.n_subjects) + ")";
  return c;
}

inline Cell scenario_cell(const std::string& system, const Scenario& base, const SuiteOptions& o) {
  Scenario sc = base;
  sc.system = system;
  sc.bounds.n_worlds = o.n_worlds;
  sc.bounds.n_subjects = o.n_subjects;
  JudgeOptions jo;
  jo.kant = o.kant;
  jo.search = o.search;
  jo.facts_used = false;
  Cell c;
  try {
    Verdict v = judge(sc, jo);
    c.result = v.status == Status::Prohibited ? CellResult::Pass : CellResult::Fail;
    c.witness = std::string(status_name(v.status)) + ": " + describe(v.witnesses.back().result);
    if (v.witnesses.back().result.model) c.model = to_json(*v.witnesses.back().result.model);
  } catch (const InconsistentAssumptions& e) {
    c.result = CellResult::Fail;
    c.witness = e.what();
  } catch (const BudgetExceeded&) {
    c.result = CellResult::Error;
    c.witness = "budget exceeded";
  }
  return c;
}

}  // namespace detail

inline TestReport run_suite(const SuiteOptions& o = {}) {
  auto t0 = std::chrono::steady_clock::now();
  TestReport rep;
  rep.n_worlds = o.n_worlds;
  rep.n_subjects = o.n_subjects;
  rep.systems = system_names();
  Bounds b;
  b.n_worlds = o.n_worlds;
  b.n_subjects = o.n_subjects;
  b.validate();
  if (o.n_subjects < 2)
    rep.warnings.push_back("bounds below the discriminating minimum: with fewer than 2 subjects T2 is trivially valid");
  if (o.n_worlds < 2)
    rep.warnings.push_back("bounds below the discriminating minimum: with 1 world obligations cannot vary across worlds");

  std::map<std::string, System> systems;
  for (const auto& s : rep.systems) {
    systems.emplace(s, make_system(s, o.kant));
    rep.axiom_sets[s] = systems.at(s).axiom_names;
  }
  for (const auto& t : faithfulness_tests()) {
    rep.tests.push_back(t.id);
    std::optional<Scenario> sc;
    if (t.kind == TestKind::Scenario) sc = load_scenario(o.corpus_dir + "/" + t.payload);
    for (const auto& s : rep.systems) {
      const System& sys = systems.at(s);
      Cell c;
      switch (t.kind) {
        case TestKind::CountermodelExistence: c = detail::independence_cell(sys, b, o.search); break;
        case TestKind::Validity: {
          Formula goal = t.id == "T4" ? distributive_background() : parse(t.payload);
          c = detail::validity_cell(sys, goal, b, o.search);
          break;
        }
        case TestKind::Scenario: c = detail::scenario_cell(s, *sc, o); break;
        case TestKind::Capability:
          c.result = sys.evaluates_maxims ? CellResult::Pass : CellResult::Fail;
          c.witness = sys.evaluates_maxims ? "evaluates maxims" : "evaluates bare acts only";
          break;
      }
      rep.cells[t.id][s] = std::move(c);
    }
  }
  rep.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// The published matrix: naive passes nothing, kroy T1 and T2, custom everything.
inline TestReport expected_report() {
  TestReport rep;
  rep.systems = system_names();
  for (const auto& t : faithfulness_tests()) {
    rep.tests.push_back(t.id);
    for (const auto& s : rep.systems) rep.cells[t.id][s].result = t.expected.at(s);
  }
  return rep;
}

inline bool matches_expected(const TestReport& r) { return same_matrix(r, expected_report()); }

// ---------------------------------------------------------------------------
// Rendering

inline std::string system_title(const std::string& s) {
  std::string t = s;
  if (!t.empty()) t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
  return t;
}

inline nlohmann::json to_json(const TestReport& r, bool timings = false) {
  nlohmann::json j;
  nlohmann::json matrix = nlohmann::json::object();
  nlohmann::json cells = nlohmann::json::object();
  for (const auto& t : r.tests)
    for (const auto& s : r.systems) {
      const Cell& c = r.at(t, s);
      matrix[t][s] = cell_name(c.result);
      nlohmann::json e = {{"result", cell_name(c.result)}, {"witness", c.witness}};
      if (!c.model.is_null()) e["model"] = c.model;
      cells[t][s] = e;
    }
  j["matrix"] = matrix;
  j["bounds"] = {{"worlds", r.n_worlds}, {"subjects", r.n_subjects}};
  j["tests"] = r.tests;
  j["systems"] = r.systems;
  j["axiom_sets"] = r.axiom_sets;
  j["warnings"] = r.warnings;
  j["cells"] = cells;
  if (timings) j["runtime_ms"] = r.runtime_ms;
  return j;
}

inline TestReport report_from_json(const nlohmann::json& j) {
  TestReport r;
  r.n_worlds = j.at("bounds").at("worlds").get<int>();
  r.n_subjects = j.at("bounds").at("subjects").get<int>();
  r.tests = j.at("tests").get<std::vector<std::string>>();
  r.systems = j.at("systems").get<std::vector<std::string>>();
  r.axiom_sets = j.at("axiom_sets").get<std::map<std::string, std::vector<std::string>>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("runtime_ms")) r.runtime_ms = j.at("runtime_ms").get<long long>();
  for (const auto& t : r.tests)
    for (const auto& s : r.systems) {
      const auto& e = j.at("cells").at(t).at(s);
      Cell c;
      c.result = cell_from_name(e.at("result").get<std::string>());
      if (c.result != cell_from_name(j.at("matrix").at(t).at(s).get<std::string>()))
        throw Error("matrix and cells disagree at " + t + "/" + s);
      c.witness = e.at("witness").get<std::string>();
      if (e.contains("model")) c.model = e.at("model");
      r.cells[t][s] = c;
    }
  return r;
}

inline std::string title_of(const std::string& id) {
  for (const auto& t : faithfulness_tests())
    if (t.id == id) return t.title;
  return id;
}

inline std::string render_table(const TestReport& r, const std::string& fmt, bool timings = false) {
  if (fmt == "json") return to_json(r, timings).dump(2) + "\n";
  std::ostringstream os;
  auto mark = [](CellResult c) { return c == CellResult::Pass ? "✓" : c == CellResult::Fail ? "×" : "!"; };
  if (fmt == "markdown") {
    os << "| Test |";
    for (const auto& s : r.systems) os << " " << system_title(s) << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < r.systems.size(); ++i) os << "---|";
    os << "\n";
    for (const auto& t : r.tests) {
      os << "| " << t << " " << title_of(t) << " |";
      for (const auto& s : r.systems) os << " " << mark(r.at(t, s).result) << " |";
      os << "\n";
    }
  } else {
    std::size_t width = 0;
    for (const auto& t : r.tests) width = std::max(width, t.size() + 1 + title_of(t).size());
    os << std::string(width, ' ');
    for (const auto& s : r.systems) os << "  " << system_title(s);
    os << "\n";
    for (const auto& t : r.tests) {
      std::string label = t + " " + title_of(t);
      os << label << std::string(width - label.size(), ' ');
      for (const auto& s : r.systems) {
        std::string name = system_title(s);
        os << "  " << mark(r.at(t, s).result) << std::string(name.size() - 1, ' ');
      }
      os << "\n";
    }
  }
  os << "\nbounds: " << bounds_label(r.n_worlds, r.n_subjects) << "\n";
  for (const auto& s : r.systems) {
    os << system_title(s) << " axioms:";
    if (r.axiom_sets.at(s).empty()) os << " (none)";
    for (const auto& a : r.axiom_sets.at(s)) os << " " << a;
    os << "  [" << r.passes(s) << "/" << r.tests.size() << "]\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  if (timings) os << "runtime: " << r.runtime_ms << " ms\n";
  return os.str();
}

/// Per-cell witnesses, one line each.
inline std::string render_witnesses(const TestReport& r) {
  std::ostringstream os;
  for (const auto& t : r.tests)
    for (const auto& s : r.systems) {
      const Cell& c = r.at(t, s);
      os << t << " " << s << ": " << cell_name(c.result) << " (" << c.witness << ")\n";
    }
  return os.str();
}

}  // namespace ddlkant

#endif  // DDLKANT_HARNESS_HPP
