// ddl-kant: command-line front end.
//
// Exit codes:
//   0   success (valid / model found / decided verdict / matrix matches)
//   1   malformed input (syntax, sorts, undeclared symbols) or matrix mismatch
//   2   countermodel found / no model / undetermined verdict
//   3   search budget exceeded
//   4   scenario assumptions inconsistent
//   64  usage error
//   66  file cannot be read
//   70  internal error

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddlkant/harness.hpp"
#include "ddlkant/kantian.hpp"
#include "ddlkant/scenario.hpp"
#include "ddlkant/search.hpp"
#include "ddlkant/syntax.hpp"

namespace {

using namespace ddlkant;

constexpr int kExitMismatch = 1;
constexpr int kExitNegative = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInconsistent = 4;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;
constexpr int kExitInternal = 70;

struct Common {
  int worlds = 3;
  int subjects = 2;
  long long budget_ms = 60'000;
  bool json = false;
  bool timings = false;
  bool no_universalization = false;
  std::string well_formed = "non-entailment";

  SearchOptions search() const {
    SearchOptions o;
    o.max_millis = budget_ms;
    return o;
  }
  KantOptions kant() const {
    KantOptions k;
    k.universalization_background = !no_universalization;
    k.well_formed = well_formed == "pointwise" ? WellFormedReading::Pointwise : WellFormedReading::NonEntailment;
    return k;
  }
  Bounds bounds() const {
    Bounds b;
    b.n_worlds = worlds;
    b.n_subjects = subjects;
    return b;
  }
};

void add_bounds(CLI::App* cmd, Common& c) {
  cmd->add_option("--worlds", c.worlds, "Maximum number of worlds")->check(CLI::Range(1, kMaxWorlds))->capture_default_str();
  cmd->add_option("--subjects", c.subjects, "Maximum number of subjects")->check(CLI::Range(1, 8))->capture_default_str();
}

void add_search(CLI::App* cmd, Common& c) {
  cmd->add_option("--budget-ms", c.budget_ms, "Time budget per query in milliseconds (env DDLKANT_BUDGET_MS)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--no-universalization", c.no_universalization,
                "Drop the universalization background from the custom system");
  cmd->add_option("--well-formed", c.well_formed, "Reading of the well-formedness guard")
      ->check(CLI::IsMember({"non-entailment", "pointwise"}))
      ->capture_default_str();
}

std::vector<Formula> read_formulas(const std::string& path, const KantOptions& k) {
  std::vector<Formula> out;
  for (const auto& fm : parse_all(read_file(path))) out.push_back(expand(fm, k));
  return out;
}

void print_result(const SearchResult& r, const Common& c) {
  if (c.json) {
    nlohmann::json j = to_json(r, true);
    if (!c.timings) j["stats"].erase("millis");
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << describe(r) << "\n";
  if (r.model) std::cout << model_table(*r.model);
  if (c.timings) std::cout << "nodes: " << r.stats.nodes << ", " << r.stats.millis << " ms\n";
}

int exit_for(const SearchResult& r) {
  switch (r.outcome) {
    case Outcome::ValidAtBounds:
    case Outcome::ModelFound: return 0;
    case Outcome::CountermodelFound:
    case Outcome::NoModelAtBounds: return kExitNegative;
    case Outcome::BudgetExceeded: return kExitBudget;
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic deontic logic and the formula of universal law: bounded checking and maxim judgement"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Common c;
  if (const char* env = std::getenv("DDLKANT_BUDGET_MS")) {
    try {
      c.budget_ms = std::stoll(env);
    } catch (const std::exception&) {
      std::cerr << "ddl-kant: ignoring malformed DDLKANT_BUDGET_MS='" << env << "'\n";
    }
  }

  std::string file;
  auto* parse_cmd = app.add_subcommand("parse", "Parse a formula file (.l) or scenario (.ked) and print it canonically");
  parse_cmd->add_option("file", file, "Input file")->required();

  std::string system = "naive";
  std::string formula_file;
  auto* check_cmd = app.add_subcommand("check", "Check validity of a formula under a system within bounds");
  check_cmd->add_option("--system", system, "naive, kroy or custom")
      ->check(CLI::IsMember(system_names()))
      ->capture_default_str();
  check_cmd->add_option("--formula-file", formula_file, "Formula file; several formulas are conjoined")->required();
  add_bounds(check_cmd, c);
  add_search(check_cmd, c);
  check_cmd->add_flag("--json", c.json, "JSON output");
  check_cmd->add_flag("--timings", c.timings, "Include timings");

  std::string axioms_file, constraints_file;
  std::string fm_system = "naive";
  auto* find_cmd = app.add_subcommand("find-model", "Search for a model of axioms and constraints within bounds");
  find_cmd->add_option("--axioms-file", axioms_file, "Axioms (true at every world)")->required();
  find_cmd->add_option("--constraints-file", constraints_file, "Additional constraints (true at every world)");
  find_cmd->add_option("--system", fm_system, "System whose axioms are added")
      ->check(CLI::IsMember(system_names()))
      ->capture_default_str();
  add_bounds(find_cmd, c);
  add_search(find_cmd, c);
  find_cmd->add_flag("--json", c.json, "JSON output");
  find_cmd->add_flag("--timings", c.timings, "Include timings");

  std::string scenario_file;
  std::string judge_system;
  int j_worlds = 0, j_subjects = 0;
  auto* judge_cmd = app.add_subcommand("judge", "Judge the maxim of a scenario (.ked)");
  judge_cmd->add_option("scenario", scenario_file, "Scenario file")->required();
  judge_cmd->add_option("--system", judge_system, "Override the scenario's system")
      ->check(CLI::IsMember(system_names()));
  judge_cmd->add_option("--worlds", j_worlds, "Override the scenario's world bound")->check(CLI::Range(1, kMaxWorlds));
  judge_cmd->add_option("--subjects", j_subjects, "Override the scenario's subject bound")->check(CLI::Range(1, 8));
  add_search(judge_cmd, c);
  judge_cmd->add_flag("--json", c.json, "JSON output");

  std::string suite_bounds;
  bool markdown = false, witnesses = false;
  SuiteOptions suite;
  auto* suite_cmd = app.add_subcommand("test-suite", "Run the eight faithfulness tests on all three systems");
  add_bounds(suite_cmd, c);
  suite_cmd->add_option("--bounds", suite_bounds, "Bounds as WORLDS,SUBJECTS (alternative to --worlds/--subjects)");
  add_search(suite_cmd, c);
  auto* json_flag = suite_cmd->add_flag("--json", c.json, "JSON output");
  suite_cmd->add_flag("--markdown", markdown, "Markdown table")->excludes(json_flag);
  suite_cmd->add_flag("--witnesses", witnesses, "List the witness of every cell (text mode)");
  suite_cmd->add_flag("--timings", c.timings, "Include the runtime");
  suite_cmd->add_option("--corpus", suite.corpus_dir, "Directory holding the scenario files")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "ddl-kant: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*parse_cmd) {
      std::string text = read_file(file);
      if (file.size() > 4 && file.substr(file.size() - 4) == ".ked") {
        std::cout << print_scenario(parse_scenario(text));
      } else {
        for (const auto& fm : parse_all(text)) std::cout << print(fm) << "\n";
      }
      return 0;
    }
    if (*check_cmd) {
      Bounds b = c.bounds();
      b.validate();
      System sys = make_system(system, c.kant());
      SearchResult r = check_valid(sys.axioms, f::conj_all(read_formulas(formula_file, c.kant())), b, c.search());
      print_result(r, c);
      return exit_for(r);
    }
    if (*find_cmd) {
      Bounds b = c.bounds();
      b.validate();
      System sys = make_system(fm_system, c.kant());
      std::vector<Formula> axioms = sys.axioms;
      for (auto& a : read_formulas(axioms_file, c.kant())) axioms.push_back(a);
      std::vector<Formula> constraints;
      if (!constraints_file.empty()) constraints = read_formulas(constraints_file, c.kant());
      SearchResult r = find_model(axioms, constraints, b, c.search());
      print_result(r, c);
      return exit_for(r);
    }
    if (*judge_cmd) {
      Scenario sc = load_scenario(scenario_file);
      if (!judge_system.empty()) sc.system = judge_system;
      if (j_worlds) sc.bounds.n_worlds = j_worlds;
      if (j_subjects) sc.bounds.n_subjects = j_subjects;
      JudgeOptions jo;
      jo.kant = c.kant();
      jo.search = c.search();
      try {
        Verdict v = judge(sc, jo);
        std::cout << render_verdict(v, c.json ? "json" : "text");
        return v.status == Status::Undetermined ? kExitNegative : 0;
      } catch (const InconsistentAssumptions& e) {
        if (c.json)
          std::cout << nlohmann::json{{"scenario", sc.name}, {"status", "inconsistent"}, {"error", e.what()}}.dump(2)
                    << "\n";
        else
          std::cout << "INCONSISTENT: " << e.what() << "\n";
        return kExitInconsistent;
      }
    }
    if (*suite_cmd) {
      suite.n_worlds = c.worlds;
      suite.n_subjects = c.subjects;
      if (!suite_bounds.empty()) {
        auto comma = suite_bounds.find(',');
        try {
          if (comma == std::string::npos) throw std::invalid_argument(suite_bounds);
          suite.n_worlds = std::stoi(suite_bounds.substr(0, comma));
          suite.n_subjects = std::stoi(suite_bounds.substr(comma + 1));
        } catch (const std::exception&) {
          std::cerr << "ddl-kant: --bounds expects WORLDS,SUBJECTS\n\n" << suite_cmd->help();
          return kExitUsage;
        }
      }
      suite.kant = c.kant();
      suite.search = c.search();
      TestReport r = run_suite(suite);
      const std::string fmt = c.json ? "json" : markdown ? "markdown" : "text";
      std::cout << render_table(r, fmt, c.timings);
      if (witnesses && fmt != "json") std::cout << "\n" << render_witnesses(r);
      bool ok = matches_expected(r);
      if (!ok) std::cerr << "ddl-kant: matrix differs from the expected matrix\n";
      return ok ? 0 : kExitMismatch;
    }
  } catch (const FileError& e) {
    std::cerr << "ddl-kant: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const BudgetExceeded& e) {
    std::cerr << "ddl-kant: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InternalError& e) {
    std::cerr << "ddl-kant: internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    std::cerr << "ddl-kant: " << e.what() << "\n";
    return kExitMismatch;
  }
  return kExitUsage;
}
