#ifndef DDLKANT_SEARCH_HPP
#define DDLKANT_SEARCH_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "formula.hpp"
#include "ground.hpp"
#include "model.hpp"
#include "sat.hpp"

namespace ddlkant {

/// Upper limits on model size; every size from (1,1) up to these is searched.
struct Bounds {
  int n_worlds = 3;
  int n_subjects = 2;
  /// Symbols interpreted even if no formula mentions them (e.g. scenario declarations).
  std::vector<std::string> atoms;
  std::vector<std::string> actions;
  std::vector<std::string> subjects;

  void validate() const {
    if (n_worlds < 1 || n_worlds > kMaxWorlds)
      throw Error("world bound must be in 1.." + std::to_string(kMaxWorlds) + ", got " + std::to_string(n_worlds));
    if (n_subjects < 1) throw Error("subject bound must be >= 1, got " + std::to_string(n_subjects));
  }
};

struct SearchOptions {
  FrameConditions frame;
  std::uint64_t max_nodes = 10'000'000;
  std::int64_t max_millis = 60'000;
  std::uint64_t max_instances = 1'000'000;
};

enum class Outcome { ModelFound, NoModelAtBounds, ValidAtBounds, CountermodelFound, BudgetExceeded };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::ModelFound: return "model-found";
    case Outcome::NoModelAtBounds: return "no-model-at-bounds";
    case Outcome::ValidAtBounds: return "valid-at-bounds";
    case Outcome::CountermodelFound: return "countermodel-found";
    case Outcome::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

struct SearchStats {
  std::uint64_t nodes = 0;
  std::int64_t millis = 0;
  int max_worlds = 0;
  int max_subjects = 0;
  /// Number of (n_w, n_s, interpretation) cases examined.
  int cases = 0;
};

struct SearchResult {
  Outcome outcome = Outcome::NoModelAtBounds;
  std::optional<Model> model;
  SearchStats stats;

  bool found() const { return model.has_value(); }
};

/// Kernel re-verification of a returned model failed. Always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

inline std::string bounds_label(int n_worlds, int n_subjects) {
  return "w=" + std::to_string(n_worlds) + ", s=" + std::to_string(n_subjects);
}

/// Human label for an outcome. Bounded validity is never reported as plain validity.
inline std::string describe(const SearchResult& r) {
  const std::string b = bounds_label(r.stats.max_worlds, r.stats.max_subjects);
  switch (r.outcome) {
    case Outcome::ValidAtBounds: return "valid at bounds (" + b + ")";
    case Outcome::NoModelAtBounds: return "no model at bounds (" + b + ")";
    case Outcome::ModelFound:
      return "model found (" + std::to_string(r.model->n_worlds()) + " worlds, " +
             std::to_string(r.model->n_subjects()) + " subjects)";
    case Outcome::CountermodelFound:
      return "countermodel found (" + std::to_string(r.model->n_worlds()) + " worlds, " +
             std::to_string(r.model->n_subjects()) + " subjects)";
    case Outcome::BudgetExceeded: return "budget exceeded";
  }
  return "?";
}

inline nlohmann::json stats_json(const SearchStats& s) {
  return {{"nodes", s.nodes}, {"millis", s.millis}, {"bounds", {{"worlds", s.max_worlds}, {"subjects", s.max_subjects}}}};
}

/// Deterministic fields only (no timings), for reproducible output.
inline nlohmann::json to_json(const SearchResult& r, bool with_stats = true) {
  nlohmann::json j;
  j["outcome"] = outcome_name(r.outcome);
  j["label"] = describe(r);
  j["model"] = r.model ? to_json(*r.model) : nlohmann::json(nullptr);
  if (with_stats) j["stats"] = stats_json(r.stats);
  return j;
}

namespace detail {

inline std::vector<std::string> sorted_union(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

/// Restricted-growth assignments of constants to subjects: constant i may use any subject
/// already used by constants < i, or the next unused one. Complete up to renaming subjects.
template <class Fn>
bool for_each_interp(const std::vector<std::string>& consts, int n_subjects, Fn&& fn) {
  std::map<std::string, int> interp;
  std::function<bool(std::size_t, int)> rec = [&](std::size_t i, int used) -> bool {
    if (i == consts.size()) return fn(interp);
    for (int s = 0; s <= std::min(used, n_subjects - 1); ++s) {
      interp[consts[i]] = s;
      if (!rec(i + 1, std::max(used, s + 1))) return false;
    }
    return true;
  };
  return rec(0, 0);
}

/// Tseitin translation of the cone of `root` into a fresh solver. Decision inputs map to
/// solver variables 1..k in canonical order; variable 0 stands for the constant node.
class Encoder {
 public:
  Encoder(const Grounder& g, sat::Solver& s) : g_(g), s_(s) {
    for (Aig::Lit in : g.vars().inputs()) map_[in >> 1] = s_.new_var();
  }

  sat::Lit lit(Aig::Lit a) {
    std::uint32_t node = a >> 1;
    auto it = map_.find(node);
    std::uint32_t v;
    if (it != map_.end()) {
      v = it->second;
    } else {
      v = encode(node);
    }
    return sat::mk(v, a & 1u);
  }

 private:
  std::uint32_t encode(std::uint32_t root) {
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
      std::uint32_t n = stack.back();
      if (map_.count(n)) {
        stack.pop_back();
        continue;
      }
      auto [a, b] = g_.aig().gate(n);
      bool ready = true;
      for (Aig::Lit c : {a, b})
        if (!map_.count(c >> 1)) {
          stack.push_back(c >> 1);
          ready = false;
        }
      if (!ready) continue;
      stack.pop_back();
      std::uint32_t v = s_.new_var();
      map_[n] = v;
      sat::Lit g = sat::mk(v), la = lit(a), lb = lit(b);
      s_.add_clause({sat::negate(g), la});
      s_.add_clause({sat::negate(g), lb});
      s_.add_clause({g, sat::negate(la), sat::negate(lb)});
    }
    return map_.at(root);
  }

  const Grounder& g_;
  sat::Solver& s_;
  std::unordered_map<std::uint32_t, std::uint32_t> map_{{0u, 0u}};
};

/// Solves `root` over the grounder's decision variables. Returns the lexicographically
/// least satisfying assignment of the decision bits (false < true), if any.
inline std::optional<std::vector<char>> solve_lexmin(const Grounder& g, Aig::Lit root, Budget& budget) {
  if (root == Aig::kFalse) return std::nullopt;
  sat::Solver s;
  // variable 0 is reserved as constant false so that the AIG constant maps cleanly
  std::uint32_t zero = s.new_var();
  s.add_clause({sat::mk(zero, true)});
  Encoder enc(g, s);
  s.add_clause({enc.lit(root)});
  const std::size_t k = g.vars().inputs().size();
  auto input_var = [&](std::size_t i) { return static_cast<std::uint32_t>(i + 1); };
  budget.tick();
  if (!s.solve({}, budget)) return std::nullopt;
  std::vector<bool> model = s.model();
  std::vector<sat::Lit> fixed;
  for (std::size_t i = 0; i < k; ++i) {
    std::uint32_t v = input_var(i);
    if (!model[v]) {
      fixed.push_back(sat::mk(v, true));
      continue;
    }
    fixed.push_back(sat::mk(v, true));
    budget.tick();
    if (s.solve(fixed, budget)) {
      model = s.model();
    } else {
      fixed.back() = sat::mk(v, false);
    }
  }
  std::vector<char> bits(k);
  for (std::size_t i = 0; i < k; ++i) bits[i] = model[input_var(i)] ? 1 : 0;
  return bits;
}

}  // namespace detail

/// Drives the canonical enumeration: n_w ascending, then n_s ascending, then subject
/// interpretations in restricted-growth order; within a case, the least assignment.
class ModelSearch {
 public:
  ModelSearch(std::vector<Formula> axioms, Bounds b, SearchOptions opts = {})
      : axioms_(std::move(axioms)), bounds_(std::move(b)), opts_(opts) {
    bounds_.validate();
    for (const auto& f : axioms_) require_closed(f);
  }

  /// Models of axioms + constraints, all true at every world.
  SearchResult find_model(const std::vector<Formula>& constraints) const {
    for (const auto& f : constraints) require_closed(f);
    auto res = run(constraints, std::nullopt);
    res.outcome = res.model ? Outcome::ModelFound : Outcome::NoModelAtBounds;
    return res;
  }

  /// Countermodel: axioms true everywhere, goal false at some world.
  SearchResult check_valid(const Formula& goal) const {
    require_closed(goal);
    auto res = run({}, goal);
    res.outcome = res.model ? Outcome::CountermodelFound : Outcome::ValidAtBounds;
    return res;
  }

 private:
  SearchResult run(const std::vector<Formula>& constraints, const std::optional<Formula>& refute) const {
    std::vector<Formula> all = axioms_;
    all.insert(all.end(), constraints.begin(), constraints.end());
    if (refute) all.push_back(*refute);
    Symbols sym = symbols_of(all);
    if (sym.has_macros) throw UnexpandedMacro("(in search input)");
    const auto atoms = detail::sorted_union(sym.atoms, bounds_.atoms);
    const auto actions = detail::sorted_union(sym.actions, bounds_.actions);
    const auto consts = detail::sorted_union(sym.subjects, bounds_.subjects);

    Budget budget;
    budget.max_nodes = opts_.max_nodes;
    budget.max_millis = opts_.max_millis;
    SearchResult res;
    for (int nw = 1; nw <= bounds_.n_worlds && !res.model; ++nw) {
      for (int ns = 1; ns <= bounds_.n_subjects && !res.model; ++ns) {
        res.stats.max_worlds = nw;
        res.stats.max_subjects = ns;
        detail::for_each_interp(consts, ns, [&](const std::map<std::string, int>& interp) {
          ++res.stats.cases;
          if (budget.elapsed_ms() > budget.max_millis) throw BudgetExceeded();
          Grounder g(Shape{nw, ns, atoms, actions, interp}, opts_.max_instances);
          Aig::Lit root = g.frame(opts_.frame);
          for (const auto& f : axioms_) root = g.aig().conj(root, g.ground_valid(f));
          for (const auto& f : constraints) root = g.aig().conj(root, g.ground_valid(f));
          if (refute) root = g.aig().conj(root, Aig::neg(g.ground_valid(*refute)));
          if (auto bits = detail::solve_lexmin(g, root, budget)) {
            res.model = g.vars().decode(*bits);
            verify(*res.model, constraints, refute);
            return false;
          }
          return true;
        });
      }
    }
    res.stats.nodes = budget.nodes;
    res.stats.millis = budget.elapsed_ms();
    if (res.model) {
      res.stats.max_worlds = res.model->n_worlds();
      res.stats.max_subjects = res.model->n_subjects();
    } else {
      res.stats.max_worlds = bounds_.n_worlds;
      res.stats.max_subjects = bounds_.n_subjects;
    }
    return res;
  }

  void verify(const Model& m, const std::vector<Formula>& constraints, const std::optional<Formula>& refute) const {
    auto violations = check_frame(m, opts_.frame);
    if (!violations.empty()) throw InternalError("search returned a model violating " + describe(m, violations.front()));
    Evaluator ev(m);
    for (const auto& f : axioms_)
      if (!ev.holds(f)) throw InternalError("search returned a model falsifying axiom " + print(f));
    for (const auto& f : constraints)
      if (!ev.holds(f)) throw InternalError("search returned a model falsifying constraint " + print(f));
    if (refute && ev.holds(*refute)) throw InternalError("search returned a non-countermodel for " + print(*refute));
  }

  std::vector<Formula> axioms_;
  Bounds bounds_;
  SearchOptions opts_;
};

/// Budget overruns are reported as an outcome, not thrown.
inline SearchResult find_model(const std::vector<Formula>& axioms, const std::vector<Formula>& constraints,
                               const Bounds& b, const SearchOptions& opts = {}) {
  try {
    return ModelSearch(axioms, b, opts).find_model(constraints);
  } catch (const BudgetExceeded&) {
    return SearchResult{Outcome::BudgetExceeded, std::nullopt, {}};
  }
}

inline SearchResult check_valid(const std::vector<Formula>& axioms, const Formula& goal, const Bounds& b,
                                const SearchOptions& opts = {}) {
  try {
    return ModelSearch(axioms, b, opts).check_valid(goal);
  } catch (const BudgetExceeded&) {
    return SearchResult{Outcome::BudgetExceeded, std::nullopt, {}};
  }
}

/// Per-world grounding of f for a fixed model shape (quantifier-free, over decision bits).
inline Grounder::Ext ground(Grounder& g, const Formula& f) { return g.ground(f); }

}  // namespace ddlkant

#endif  // DDLKANT_SEARCH_HPP
