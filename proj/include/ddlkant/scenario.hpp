#ifndef DDLKANT_SCENARIO_HPP
#define DDLKANT_SCENARIO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "formula.hpp"
#include "kantian.hpp"
#include "search.hpp"
#include "syntax.hpp"

namespace ddlkant {

/// Subject constant every scenario judges the maxim for; implicitly declared.
inline constexpr const char* kAgent = "agent";

class UndeclaredSymbol : public Error {
 public:
  UndeclaredSymbol(const std::string& kind, const std::string& name)
      : Error("undeclared " + kind + " '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class InconsistentAssumptions : public Error {
 public:
  InconsistentAssumptions(const std::string& scenario, int n_worlds, int n_subjects)
      : Error("assumptions of '" + scenario + "' have no model with the system axioms at bounds (" +
              bounds_label(n_worlds, n_subjects) + ")") {}
};

enum class Query { Status, CheckProhibited, CheckPermissible, CheckObligatory };

struct Scenario {
  std::string name;
  std::vector<std::string> atoms;
  std::vector<std::string> actions;
  std::vector<std::string> subjects;
  std::shared_ptr<const MaximExpr> maxim;
  /// As written (macros unexpanded).
  std::vector<Formula> assumptions;
  std::string system = "custom";
  Bounds bounds;
  Query query = Query::Status;
};

namespace detail {

inline void check_declared(const Scenario& sc, const Symbols& s) {
  auto has = [](const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  for (const auto& a : s.atoms)
    if (!has(sc.atoms, a)) throw UndeclaredSymbol("atom", a);
  for (const auto& a : s.actions)
    if (!has(sc.actions, a)) throw UndeclaredSymbol("action", a);
  for (const auto& a : s.subjects)
    if (a != kAgent && !has(sc.subjects, a)) throw UndeclaredSymbol("subject", a);
}

inline int keyword_int(const Sexp& form, std::size_t i) {
  if (i >= form.items.size() || form.items[i].is_list)
    throw ParseError(form.line, form.column, "missing number", {"integer"});
  const Sexp& t = form.items[i];
  try {
    std::size_t used = 0;
    int v = std::stoi(t.token, &used);
    if (used != t.token.size()) throw std::invalid_argument(t.token);
    return v;
  } catch (const std::exception&) {
    throw ParseError(t.line, t.column, "expected an integer, got '" + t.token + "'", {"integer"});
  }
}

inline std::string form_ident(const Sexp& form, std::size_t i) {
  if (i >= form.items.size() || form.items[i].is_list || !is_identifier(form.items[i].token))
    throw ParseError(form.line, form.column, "expected an identifier", {"identifier"});
  return form.items[i].token;
}

}  // namespace detail

/// Parses and checks a scenario (.ked) from text.
inline Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  bool have_maxim = false;
  for (const Sexp& form : read_sexprs(text)) {
    if (!form.is_list || form.items.empty() || form.items[0].is_list)
      throw ParseError(form.line, form.column, "expected a scenario form",
                       {"scenario", "declare-atom", "declare-action", "declare-subject", "system", "bounds", "maxim",
                        "assume", "query"});
    const std::string& head = form.items[0].token;
    if (head == "scenario") {
      sc.name = detail::form_ident(form, 1);
    } else if (head == "declare-atom" || head == "declare-action" || head == "declare-subject") {
      if (form.items.size() < 2) throw ParseError(form.line, form.column, "missing name", {"identifier"});
      for (std::size_t i = 1; i < form.items.size(); ++i) {
        std::string n = detail::form_ident(form, i);
        if (is_keyword(n)) throw ParseError(form.items[i].line, form.items[i].column, "reserved word '" + n + "'");
        auto& target = head == "declare-atom" ? sc.atoms : head == "declare-action" ? sc.actions : sc.subjects;
        target.push_back(n);
      }
    } else if (head == "system") {
      sc.system = detail::form_ident(form, 1);
      make_system(sc.system);  // UnknownSystem
    } else if (head == "bounds") {
      for (std::size_t i = 1; i < form.items.size(); i += 2) {
        const Sexp& k = form.items[i];
        if (k.is_token(":worlds"))
          sc.bounds.n_worlds = detail::keyword_int(form, i + 1);
        else if (k.is_token(":subjects"))
          sc.bounds.n_subjects = detail::keyword_int(form, i + 1);
        else
          throw ParseError(k.line, k.column, "unknown bound", {":worlds", ":subjects"});
      }
      sc.bounds.validate();
    } else if (head == "maxim") {
      sc.maxim = parse_maxim(form);
      have_maxim = true;
    } else if (head == "assume") {
      if (form.items.size() != 2) throw ParseError(form.line, form.column, "'assume' takes one formula");
      sc.assumptions.push_back(parse(form.items[1]));
    } else if (head == "query") {
      std::string q = detail::form_ident(form, 1);
      if (q == "status")
        sc.query = Query::Status;
      else if (q == "check-prohibited")
        sc.query = Query::CheckProhibited;
      else if (q == "check-permissible")
        sc.query = Query::CheckPermissible;
      else if (q == "check-obligatory")
        sc.query = Query::CheckObligatory;
      else
        throw ParseError(form.items[1].line, form.items[1].column, "unknown query '" + q + "'",
                         {"status", "check-prohibited", "check-permissible", "check-obligatory"});
    } else {
      throw ParseError(form.items[0].line, form.items[0].column, "unknown scenario form '" + head + "'",
                       {"scenario", "declare-atom", "declare-action", "declare-subject", "system", "bounds", "maxim",
                        "assume", "query"});
    }
  }
  if (sc.name.empty()) throw ParseError(1, 1, "scenario has no (scenario <name>) header", {"scenario"});
  if (!have_maxim) throw ParseError(1, 1, "scenario has no (maxim C A G) form", {"maxim"});
  std::vector<Formula> all = sc.assumptions;
  all.push_back(f::macro("will", sc.maxim, SubjectRef{kAgent, false}));
  detail::check_declared(sc, symbols_of(all));
  return sc;
}

/// Input file missing or unreadable; kept apart from Error, which means malformed content.
class FileError : public std::runtime_error {
 public:
  explicit FileError(const std::string& path) : std::runtime_error("cannot read '" + path + "'") {}
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

inline const char* query_name(Query q) {
  switch (q) {
    case Query::Status: return "status";
    case Query::CheckProhibited: return "check-prohibited";
    case Query::CheckPermissible: return "check-permissible";
    case Query::CheckObligatory: return "check-obligatory";
  }
  return "?";
}

/// Canonical .ked text; parse_scenario(print_scenario(sc)) reproduces sc.
inline std::string print_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "(scenario " << sc.name << ")\n";
  auto decl = [&](const char* head, const std::vector<std::string>& names) {
    if (names.empty()) return;
    os << "(" << head;
    for (const auto& n : names) os << " " << n;
    os << ")\n";
  };
  decl("declare-atom", sc.atoms);
  decl("declare-action", sc.actions);
  decl("declare-subject", sc.subjects);
  os << "(system " << sc.system << ")\n";
  os << "(bounds :worlds " << sc.bounds.n_worlds << " :subjects " << sc.bounds.n_subjects << ")\n";
  os << print(*sc.maxim) << "\n";
  for (const auto& a : sc.assumptions) os << "(assume " << print(a) << ")\n";
  os << "(query " << query_name(sc.query) << ")\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Judgement

enum class Status { Obligatory, Permissible, Prohibited, Undetermined };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Obligatory: return "obligatory";
    case Status::Permissible: return "permissible";
    case Status::Prohibited: return "prohibited";
    case Status::Undetermined: return "undetermined";
  }
  return "?";
}

struct Witness {
  std::string claim;  // prohibited | obligatory | permissible
  Formula goal;       // expanded
  SearchResult result;
};

struct Verdict {
  std::string scenario;
  std::string system;
  Status status = Status::Undetermined;
  std::vector<Witness> witnesses;
  /// Exactly the scenario's assumptions, as written.
  std::vector<std::string> assumptions;
  /// Smallest-by-deletion subset of the assumptions that still certifies the status
  /// (empty for Undetermined).
  std::vector<std::string> facts_used;
  int n_worlds = 0;
  int n_subjects = 0;
};

struct JudgeOptions {
  KantOptions kant;
  SearchOptions search;
  bool facts_used = true;
};

/// Verdict status derived from the recorded witnesses in check order.
inline Status status_from(const std::vector<Witness>& ws) {
  for (const auto& w : ws) {
    if (w.result.outcome != Outcome::ValidAtBounds) continue;
    if (w.claim == "prohibited") return Status::Prohibited;
    if (w.claim == "obligatory") return Status::Obligatory;
    if (w.claim == "permissible") return Status::Permissible;
  }
  return Status::Undetermined;
}

inline Verdict judge(const Scenario& sc, const JudgeOptions& opts = {}) {
  const System sys = make_system(sc.system, opts.kant);
  Bounds b = sc.bounds;
  b.atoms = sc.atoms;
  b.actions = sc.actions;
  b.subjects = sc.subjects;
  b.subjects.push_back(kAgent);

  std::vector<Formula> axioms = sys.axioms;
  std::vector<Formula> assumptions;
  for (const auto& a : sc.assumptions) assumptions.push_back(expand(a, opts.kant));
  axioms.insert(axioms.end(), assumptions.begin(), assumptions.end());

  Verdict v;
  v.scenario = sc.name;
  v.system = sys.name;
  v.n_worlds = b.n_worlds;
  v.n_subjects = b.n_subjects;
  for (const auto& a : sc.assumptions) v.assumptions.push_back(print(a));

  auto consistent = find_model(axioms, {}, b, opts.search);
  if (consistent.outcome == Outcome::BudgetExceeded) throw BudgetExceeded();
  if (!consistent.found()) throw InconsistentAssumptions(sc.name, b.n_worlds, b.n_subjects);

  const SubjectRef agent{kAgent, false};
  std::vector<std::string> claims;
  switch (sc.query) {
    case Query::Status: claims = {"prohibited", "obligatory", "permissible"}; break;
    case Query::CheckProhibited: claims = {"prohibited"}; break;
    case Query::CheckPermissible: claims = {"permissible"}; break;
    case Query::CheckObligatory: claims = {"obligatory"}; break;
  }
  for (const auto& claim : claims) {
    Formula goal = expand(f::macro(claim, sc.maxim, agent), opts.kant);
    SearchResult r = check_valid(axioms, goal, b, opts.search);
    if (r.outcome == Outcome::BudgetExceeded) throw BudgetExceeded();
    bool decided = r.outcome == Outcome::ValidAtBounds;
    v.witnesses.push_back({claim, goal, std::move(r)});
    if (decided) break;
  }
  v.status = status_from(v.witnesses);

  if (opts.facts_used && v.status != Status::Undetermined) {
    const Formula& goal = v.witnesses.back().goal;
    std::vector<std::size_t> keep(assumptions.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
    for (std::size_t i = 0; i < keep.size();) {
      std::vector<Formula> trial = sys.axioms;
      for (std::size_t j = 0; j < keep.size(); ++j)
        if (j != i) trial.push_back(assumptions[keep[j]]);
      SearchResult r = check_valid(trial, goal, b, opts.search);
      if (r.outcome == Outcome::ValidAtBounds)
        keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(i));
      else
        ++i;
    }
    for (std::size_t k : keep) v.facts_used.push_back(v.assumptions[k]);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

/// World-by-symbol table of a model, plus its non-empty ob entries.
inline std::string model_table(const Model& m) {
  std::ostringstream os;
  std::vector<std::pair<std::string, std::vector<bool>>> rows;
  for (const auto& [p, s] : m.val) {
    std::vector<bool> r;
    for (int w = 0; w < m.n_worlds(); ++w) r.push_back((s >> w) & 1u);
    rows.emplace_back(p, r);
  }
  for (const auto& [a, per] : m.act_val)
    for (std::size_t i = 0; i < per.size(); ++i) {
      std::vector<bool> r;
      for (int w = 0; w < m.n_worlds(); ++w) r.push_back((per[i] >> w) & 1u);
      rows.emplace_back(a + "(" + m.subjects[i] + ")", r);
    }
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  os << "    " << std::string(width, ' ');
  for (const auto& w : m.worlds) os << "  " << w;
  os << "\n";
  for (const auto& [label, r] : rows) {
    os << "    " << label << std::string(width - label.size(), ' ');
    for (std::size_t w = 0; w < r.size(); ++w)
      os << "  " << std::string(m.worlds[w].size() - 1, ' ') << (r[w] ? "T" : ".");
    os << "\n";
  }
  if (!m.subj_interp.empty()) {
    os << "    subjects:";
    for (const auto& [c, s] : m.subj_interp) os << " " << c << "=" << m.subjects[static_cast<std::size_t>(s)];
    os << "\n";
  }
  for (WorldSet x = 0; x <= m.all(); ++x) {
    if (!m.ob[x]) continue;
    os << "    ob(" << world_set_json(m, x).dump() << ") =";
    for (WorldSet y = 0; y <= m.all(); ++y)
      if (m.obligatory(x, y)) os << " " << world_set_json(m, y).dump();
    os << "\n";
  }
  return os.str();
}

inline std::string render_text(const Verdict& v) {
  std::ostringstream os;
  const std::string b = bounds_label(v.n_worlds, v.n_subjects);
  if (v.status == Status::Undetermined)
    os << "UNDETERMINED (no claim valid at bounds " << b << ")\n";
  else
    os << upper(status_name(v.status)) << " (valid at bounds " << b << ")\n";
  os << "scenario: " << v.scenario << "\nsystem: " << v.system << "\n";
  os << "assumptions:\n";
  if (v.assumptions.empty()) os << "  (none)\n";
  for (const auto& a : v.assumptions) os << "  " << a << "\n";
  if (!v.facts_used.empty() || v.status != Status::Undetermined) {
    os << "facts used:\n";
    if (v.facts_used.empty()) os << "  (none beyond the system axioms)\n";
    for (const auto& a : v.facts_used) os << "  " << a << "\n";
  }
  os << "witnesses:\n";
  for (const auto& w : v.witnesses) {
    os << "  " << w.claim << ": " << describe(w.result) << "\n";
    if (w.result.model) os << model_table(*w.result.model);
  }
  return os.str();
}

inline nlohmann::json to_json(const Verdict& v, bool timings = false) {
  nlohmann::json j;
  j["scenario"] = v.scenario;
  j["system"] = v.system;
  j["status"] = status_name(v.status);
  j["bounds"] = {{"worlds", v.n_worlds}, {"subjects", v.n_subjects}};
  j["assumptions"] = v.assumptions;
  j["facts_used"] = v.facts_used;
  auto ws = nlohmann::json::array();
  for (const auto& w : v.witnesses) {
    nlohmann::json e = to_json(w.result, true);
    if (!timings) e["stats"].erase("millis");
    e["claim"] = w.claim;
    e["goal"] = print(w.goal);
    ws.push_back(e);
  }
  j["witnesses"] = ws;
  return j;
}

inline std::string render_verdict(const Verdict& v, const std::string& fmt) {
  if (fmt == "json") return to_json(v).dump(2) + "\n";
  return render_text(v);
}

}  // namespace ddlkant

#endif  // DDLKANT_SCENARIO_HPP
