#ifndef DDLKANT_FORMULA_HPP
#define DDLKANT_FORMULA_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddlkant {

/// Sort of a bound variable.
enum class Sort { Subject, Term, Open, Maxim };

inline const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Subject: return "subject";
    case Sort::Term: return "term";
    case Sort::Open: return "open";
    case Sort::Maxim: return "maxim";
  }
  return "?";
}

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A subject position: either a declared constant or a bound subject variable.
struct SubjectRef {
  std::string name;
  bool is_var = false;

  friend bool operator==(const SubjectRef&, const SubjectRef&) = default;
};

/// The act slot of a maxim: an action atom or a bound open-sentence variable.
struct ActRef {
  std::string name;
  bool is_var = false;

  friend bool operator==(const ActRef&, const ActRef&) = default;
};

enum class Kind {
  True,
  False,
  Atom,         // name
  Apply,        // name = action atom, subject
  OpenApply,    // name = open variable, subject
  TermVar,      // name
  MaximCirc,    // name = maxim variable
  MaximGoal,    // name = maxim variable
  MaximAct,     // name = maxim variable, subject
  Not,
  And,
  Or,
  Implies,
  Iff,
  Box,
  Ob,           // args = {body, context}
  ForallSubject,
  ForallTerm,
  ForallOpen,
  ForallMaxim,  // name = bound variable, args = {body}
  MacroCall,    // name = macro, maxim, subject
};

class Formula;
struct MaximExpr;
struct Node;

/// Immutable, shareable handle to a formula tree. Equality is structural.
class Formula {
 public:
  Formula();  // the constant true
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  const Node& operator*() const { return *node_; }
  const Node* operator->() const { return node_.get(); }
  const Node* get() const { return node_.get(); }
  Kind kind() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  std::shared_ptr<const Node> node_;
};

/// Maxim (circumstances, act, goal), or a reference to a bound maxim variable.
struct MaximExpr {
  std::optional<std::string> var;
  Formula circumstances;
  ActRef act;
  Formula goal;

  bool is_var() const { return var.has_value(); }
  friend bool operator==(const MaximExpr& a, const MaximExpr& b) {
    if (a.var || b.var) return a.var == b.var;
    return a.circumstances == b.circumstances && a.act == b.act && a.goal == b.goal;
  }
};

struct Node {
  Kind kind = Kind::True;
  std::string name;
  SubjectRef subject;
  std::shared_ptr<const MaximExpr> maxim;
  std::vector<Formula> args;
};

inline Formula::Formula() : node_(std::make_shared<const Node>()) {}
inline Kind Formula::kind() const { return node_->kind; }

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind || x.name != y.name || x.args.size() != y.args.size()) return false;
  if (!(x.subject == y.subject)) return false;
  if (static_cast<bool>(x.maxim) != static_cast<bool>(y.maxim)) return false;
  if (x.maxim && !(*x.maxim == *y.maxim)) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!(x.args[i] == y.args[i])) return false;
  return true;
}

namespace f {

inline Formula make(Node n) { return Formula(std::make_shared<const Node>(std::move(n))); }

inline Formula top() { return make(Node{Kind::True, {}, {}, {}, {}}); }
inline Formula bottom() { return make(Node{Kind::False, {}, {}, {}, {}}); }
inline Formula atom(std::string p) { return make(Node{Kind::Atom, std::move(p), {}, {}, {}}); }

inline Formula apply(std::string action, SubjectRef s) {
  return make(Node{Kind::Apply, std::move(action), std::move(s), {}, {}});
}
inline Formula apply(std::string action, std::string subject_const) {
  return apply(std::move(action), SubjectRef{std::move(subject_const), false});
}
inline Formula open_apply(std::string var, SubjectRef s) {
  return make(Node{Kind::OpenApply, std::move(var), std::move(s), {}, {}});
}
inline Formula term_var(std::string x) { return make(Node{Kind::TermVar, std::move(x), {}, {}, {}}); }
inline Formula maxim_circ(std::string m) { return make(Node{Kind::MaximCirc, std::move(m), {}, {}, {}}); }
inline Formula maxim_goal(std::string m) { return make(Node{Kind::MaximGoal, std::move(m), {}, {}, {}}); }
inline Formula maxim_act(std::string m, SubjectRef s) {
  return make(Node{Kind::MaximAct, std::move(m), std::move(s), {}, {}});
}

inline Formula unary(Kind k, Formula a) { return make(Node{k, {}, {}, {}, {std::move(a)}}); }
inline Formula binary(Kind k, Formula a, Formula b) {
  return make(Node{k, {}, {}, {}, {std::move(a), std::move(b)}});
}

inline Formula neg(Formula a) { return unary(Kind::Not, std::move(a)); }
inline Formula conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
inline Formula disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }
inline Formula implies(Formula a, Formula b) { return binary(Kind::Implies, std::move(a), std::move(b)); }
inline Formula iff(Formula a, Formula b) { return binary(Kind::Iff, std::move(a), std::move(b)); }
inline Formula box(Formula a) { return unary(Kind::Box, std::move(a)); }
inline Formula dia(Formula a) { return neg(box(neg(std::move(a)))); }

/// O{body | context}
inline Formula ob(Formula body, Formula context) { return binary(Kind::Ob, std::move(body), std::move(context)); }
inline Formula ob(Formula body) { return ob(std::move(body), top()); }

inline Formula forall(Kind k, std::string var, Formula body) {
  return make(Node{k, std::move(var), {}, {}, {std::move(body)}});
}
inline Formula forall_subject(std::string v, Formula b) { return forall(Kind::ForallSubject, std::move(v), std::move(b)); }
inline Formula forall_term(std::string v, Formula b) { return forall(Kind::ForallTerm, std::move(v), std::move(b)); }
inline Formula forall_open(std::string v, Formula b) { return forall(Kind::ForallOpen, std::move(v), std::move(b)); }
inline Formula forall_maxim(std::string v, Formula b) { return forall(Kind::ForallMaxim, std::move(v), std::move(b)); }

inline Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return top();
  Formula acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = conj(fs[i], acc);
  return acc;
}

inline std::shared_ptr<const MaximExpr> maxim(Formula c, ActRef a, Formula g) {
  return std::make_shared<const MaximExpr>(MaximExpr{std::nullopt, std::move(c), std::move(a), std::move(g)});
}
inline std::shared_ptr<const MaximExpr> maxim_var(std::string m) {
  return std::make_shared<const MaximExpr>(MaximExpr{std::move(m), top(), {}, top()});
}

inline Formula macro(std::string name, std::shared_ptr<const MaximExpr> m, SubjectRef s) {
  return make(Node{Kind::MacroCall, std::move(name), std::move(s), std::move(m), {}});
}

}  // namespace f

inline bool is_quantifier(Kind k) {
  return k == Kind::ForallSubject || k == Kind::ForallTerm || k == Kind::ForallOpen || k == Kind::ForallMaxim;
}

inline Sort quantifier_sort(Kind k) {
  switch (k) {
    case Kind::ForallSubject: return Sort::Subject;
    case Kind::ForallTerm: return Sort::Term;
    case Kind::ForallOpen: return Sort::Open;
    default: return Sort::Maxim;
  }
}

inline Kind quantifier_kind(Sort s) {
  switch (s) {
    case Sort::Subject: return Kind::ForallSubject;
    case Sort::Term: return Kind::ForallTerm;
    case Sort::Open: return Kind::ForallOpen;
    case Sort::Maxim: return Kind::ForallMaxim;
  }
  return Kind::ForallMaxim;
}

/// Symbols a closed formula refers to, by category.
struct Symbols {
  std::vector<std::string> atoms;
  std::vector<std::string> actions;
  std::vector<std::string> subjects;
  bool has_macros = false;
};

namespace detail {

inline void add_unique(std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v)
    if (x == s) return;
  v.push_back(s);
}

inline void collect(const Formula& f, Symbols& out) {
  const Node& n = *f;
  auto subj = [&](const SubjectRef& s) {
    if (!s.is_var) add_unique(out.subjects, s.name);
  };
  switch (n.kind) {
    case Kind::Atom: add_unique(out.atoms, n.name); break;
    case Kind::Apply:
      add_unique(out.actions, n.name);
      subj(n.subject);
      break;
    case Kind::OpenApply:
    case Kind::MaximAct: subj(n.subject); break;
    case Kind::MacroCall:
      out.has_macros = true;
      subj(n.subject);
      if (!n.maxim->is_var()) {
        collect(n.maxim->circumstances, out);
        collect(n.maxim->goal, out);
        if (!n.maxim->act.is_var) add_unique(out.actions, n.maxim->act.name);
      }
      break;
    default: break;
  }
  for (const auto& a : n.args) collect(a, out);
}

}  // namespace detail

inline Symbols symbols_of(const Formula& f) {
  Symbols s;
  detail::collect(f, s);
  return s;
}

inline Symbols symbols_of(const std::vector<Formula>& fs) {
  Symbols s;
  for (const auto& f : fs) detail::collect(f, s);
  return s;
}

}  // namespace ddlkant

#endif  // DDLKANT_FORMULA_HPP
