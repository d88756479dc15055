#ifndef DDLKANT_KANTIAN_HPP
#define DDLKANT_KANTIAN_HPP

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "formula.hpp"
#include "syntax.hpp"

namespace ddlkant {

class UnknownMacro : public Error {
 public:
  explicit UnknownMacro(const std::string& name) : Error("unknown macro '" + name + "'") {}
};

class ArityMismatch : public Error {
 public:
  explicit ArityMismatch(const std::string& what) : Error("arity mismatch: " + what) {}
};

class UnknownSystem : public Error {
 public:
  explicit UnknownSystem(const std::string& name)
      : Error("unknown system '" + name + "' (expected naive, kroy or custom)") {}
};

/// Scoping of the well-formedness guard.
enum class WellFormedReading {
  /// not box(C -> G) and not box(C -> A(s)): the circumstances do not entail act or goal.
  NonEntailment,
  /// box(not(C -> G) and not(C -> A(s))): the literal pointwise reading.
  Pointwise,
};

struct KantOptions {
  WellFormedReading well_formed = WellFormedReading::NonEntailment;
  /// Adds the universalization principle (permissibility is the same for every subject)
  /// to the custom system's background. Without it obligations may be person-specific.
  bool universalization_background = true;
};

namespace detail {

inline void collect_names(const Formula& fm, std::set<std::string>& out) {
  const Node& n = *fm;
  if (!n.name.empty()) out.insert(n.name);
  if (!n.subject.name.empty()) out.insert(n.subject.name);
  if (n.maxim) {
    if (n.maxim->var) out.insert(*n.maxim->var);
    out.insert(n.maxim->act.name);
    collect_names(n.maxim->circumstances, out);
    collect_names(n.maxim->goal, out);
  }
  for (const auto& a : n.args) collect_names(a, out);
}

inline std::string fresh(const std::set<std::string>& taken, const std::string& base) {
  if (!taken.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string c = base + std::to_string(i);
    if (!taken.count(c)) return c;
  }
}

class Expander {
 public:
  explicit Expander(KantOptions opts) : opts_(opts) {}

  Formula expand(const Formula& fm) {
    const Node& n = *fm;
    if (n.kind == Kind::MacroCall) return call(n);
    if (n.args.empty()) return fm;
    Node copy = n;
    bool changed = false;
    for (auto& a : copy.args) {
      Formula e = expand(a);
      if (e.get() != a.get()) changed = true;
      a = e;
    }
    return changed ? f::make(std::move(copy)) : fm;
  }

 private:
  struct Parts {
    Formula c;
    Formula g;
    std::function<Formula(const SubjectRef&)> act;
  };

  Parts parts(const MaximExpr& m) {
    if (m.var) {
      std::string v = *m.var;
      return {f::maxim_circ(v), f::maxim_goal(v), [v](const SubjectRef& s) { return f::maxim_act(v, s); }};
    }
    ActRef a = m.act;
    return {expand(m.circumstances), expand(m.goal), [a](const SubjectRef& s) {
              return a.is_var ? f::open_apply(a.name, s) : f::apply(a.name, s);
            }};
  }

  Formula will(const Parts& p, const SubjectRef& s) { return f::box(f::implies(p.c, p.act(s))); }
  Formula effective(const Parts& p, const SubjectRef& s) { return f::box(f::iff(will(p, s), p.g)); }
  Formula prohibited(const Parts& p, const SubjectRef& s) { return f::ob(f::neg(p.act(s)), p.c); }

  Formula call(const Node& n) {
    if (!n.maxim) throw ArityMismatch("'" + n.name + "' expects a maxim and a subject");
    Parts p = parts(*n.maxim);
    const SubjectRef& s = n.subject;
    const std::string& k = n.name;
    if (k == "will") return will(p, s);
    if (k == "effective") return effective(p, s);
    if (k == "not-universalizable") {
      std::set<std::string> taken;
      collect_names(f::make(n), taken);
      SubjectRef q{fresh(taken, "p"), true};
      return f::box(f::implies(f::forall_subject(q.name, will(p, q)), f::neg(effective(p, s))));
    }
    if (k == "well-formed") {
      Formula to_goal = f::implies(p.c, p.g);
      Formula to_act = f::implies(p.c, p.act(s));
      if (opts_.well_formed == WellFormedReading::Pointwise)
        return f::box(f::conj(f::neg(to_goal), f::neg(to_act)));
      return f::conj(f::neg(f::box(to_goal)), f::neg(f::box(to_act)));
    }
    if (k == "prohibited") return prohibited(p, s);
    if (k == "permissible") return f::neg(prohibited(p, s));
    if (k == "obligatory") return f::ob(p.act(s), p.c);
    throw UnknownMacro(k);
  }

  KantOptions opts_;
};

}  // namespace detail

/// Replaces every macro call by its definition. Idempotent; the result is macro-free.
inline Formula expand(const Formula& fm, KantOptions opts = {}) { return detail::Expander(opts).expand(fm); }

// ---------------------------------------------------------------------------
// Axioms

/// For every well-formed maxim and subject: if the maxim is not universalizable, it is prohibited.
/// With `guarded = false` the well-formedness premise is dropped.
inline Formula custom_ful(KantOptions opts = {}, bool guarded = true) {
  auto m = f::maxim_var("m");
  SubjectRef s{"s", true};
  Formula conclusion =
      f::implies(f::macro("not-universalizable", m, s), f::box(f::macro("prohibited", m, s)));
  Formula body = guarded ? f::implies(f::box(f::macro("well-formed", m, s)), conclusion) : conclusion;
  return expand(f::forall_maxim("m", f::forall_subject("s", body)), opts);
}

/// Monadic permissibility of an open sentence for a subject: not O{not a(x) | true}.
inline Formula permissible_monadic(const std::string& open_var, const SubjectRef& x) {
  return f::neg(f::ob(f::neg(f::open_apply(open_var, x))));
}

/// If an act is permissible for someone, it is permissible for everyone.
inline Formula kroy_ful() {
  SubjectRef s{"s", true};
  SubjectRef p{"p", true};
  return f::forall_open(
      "a", f::forall_subject("s", f::implies(permissible_monadic("a", s),
                                             f::forall_subject("p", permissible_monadic("a", p)))));
}

/// O{A|C} and O{B|C} iff O{A and B | C}.
inline Formula distributive_background() {
  using f::term_var;
  Formula lhs = f::conj(f::ob(term_var("a"), term_var("c")), f::ob(term_var("b"), term_var("c")));
  Formula rhs = f::ob(f::conj(term_var("a"), term_var("b")), term_var("c"));
  return f::forall_term("a", f::forall_term("b", f::forall_term("c", f::iff(lhs, rhs))));
}

// ---------------------------------------------------------------------------
// Systems

struct System {
  std::string name;
  /// Closed, macro-free axioms added on top of the frame conditions.
  std::vector<Formula> axioms;
  /// One label per axiom, for reports.
  std::vector<std::string> axiom_names;
  bool evaluates_maxims = false;
};

inline const std::vector<std::string>& system_names() {
  static const std::vector<std::string> names = {"naive", "kroy", "custom"};
  return names;
}

inline System make_system(const std::string& name, KantOptions opts = {}) {
  if (name == "naive") return {"naive", {}, {}, false};
  if (name == "kroy") return {"kroy", {kroy_ful()}, {"kroy-ful"}, false};
  if (name == "custom") {
    System s{"custom", {custom_ful(opts), distributive_background()}, {"custom-ful", "distributive"}, true};
    if (opts.universalization_background) {
      s.axioms.push_back(kroy_ful());
      s.axiom_names.push_back("universalization");
    }
    return s;
  }
  throw UnknownSystem(name);
}

}  // namespace ddlkant

#endif  // DDLKANT_KANTIAN_HPP
