#ifndef DDLKANT_GROUND_HPP
#define DDLKANT_GROUND_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "formula.hpp"
#include "model.hpp"
#include "sat.hpp"

namespace ddlkant {

class GroundingBlowup : public Error {
 public:
  explicit GroundingBlowup(std::uint64_t cap)
      : Error("grounding exceeded " + std::to_string(cap) + " quantifier instances") {}
};

/// And-inverter graph. Literal 0 is false, 1 is true; node i has literals 2i and 2i+1.
class Aig {
 public:
  using Lit = std::uint32_t;
  static constexpr Lit kFalse = 0;
  static constexpr Lit kTrue = 1;

  Aig() { nodes_.push_back({0, 0}); }  // node 0: constant

  Lit input() {
    nodes_.push_back({kInput, kInput});
    return static_cast<Lit>(nodes_.size() - 1) << 1;
  }

  static Lit neg(Lit a) { return a ^ 1u; }
  static bool is_const(Lit a) { return a <= 1; }

  Lit conj(Lit a, Lit b) {
    if (a == kFalse || b == kFalse || a == neg(b)) return kFalse;
    if (a == kTrue) return b;
    if (b == kTrue || a == b) return a;
    if (a > b) std::swap(a, b);
    std::uint64_t key = (std::uint64_t{a} << 32) | b;
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    nodes_.push_back({a, b});
    Lit out = static_cast<Lit>(nodes_.size() - 1) << 1;
    table_.emplace(key, out);
    return out;
  }
  Lit disj(Lit a, Lit b) { return neg(conj(neg(a), neg(b))); }
  Lit implies(Lit a, Lit b) { return disj(neg(a), b); }
  Lit iff(Lit a, Lit b) { return disj(conj(a, b), conj(neg(a), neg(b))); }

  bool is_input(Lit a) const { return nodes_[a >> 1].first == kInput; }
  std::size_t size() const { return nodes_.size(); }
  const std::pair<Lit, Lit>& gate(std::uint32_t node) const { return nodes_[node]; }

  /// Evaluates `root` under an assignment to input nodes (indexed by node id).
  bool evaluate(Lit root, const std::vector<char>& inputs) const {
    std::vector<signed char> memo(nodes_.size(), -1);
    memo[0] = 0;
    return eval_node(root >> 1, inputs, memo) != static_cast<bool>(root & 1u);
  }

 private:
  static constexpr Lit kInput = 0xffffffffu;

  bool eval_node(std::uint32_t n, const std::vector<char>& inputs, std::vector<signed char>& memo) const {
    if (memo[n] >= 0) return memo[n];
    std::vector<std::uint32_t> stack{n};
    while (!stack.empty()) {
      std::uint32_t cur = stack.back();
      if (memo[cur] >= 0) {
        stack.pop_back();
        continue;
      }
      const auto& [a, b] = nodes_[cur];
      if (a == kInput) {
        memo[cur] = inputs.at(cur) ? 1 : 0;
        stack.pop_back();
        continue;
      }
      std::uint32_t na = a >> 1, nb = b >> 1;
      if (memo[na] < 0) {
        stack.push_back(na);
        continue;
      }
      if (memo[nb] < 0) {
        stack.push_back(nb);
        continue;
      }
      bool va = memo[na] != static_cast<signed char>(a & 1u);
      bool vb = memo[nb] != static_cast<signed char>(b & 1u);
      memo[cur] = (va && vb) ? 1 : 0;
      stack.pop_back();
    }
    return memo[n];
  }

  std::vector<std::pair<Lit, Lit>> nodes_;
  std::unordered_map<std::uint64_t, Lit> table_;
};

/// Dimensions and symbols of the models a grounding ranges over.
struct Shape {
  int n_worlds = 1;
  int n_subjects = 1;
  std::vector<std::string> atoms;
  std::vector<std::string> actions;
  /// Subject constant -> subject index; fixed for the whole grounding.
  std::map<std::string, int> subj_interp;
};

/// Decision variables of a model shape, allocated in canonical order:
/// atom bits (atom, world), action bits (action, subject, world), ob bits (context, candidate).
class DecisionVars {
 public:
  DecisionVars(const Shape& s, Aig& aig) : shape_(s) {
    for (std::size_t a = 0; a < s.atoms.size(); ++a)
      for (int w = 0; w < s.n_worlds; ++w) push(aig);
    for (std::size_t a = 0; a < s.actions.size(); ++a)
      for (int i = 0; i < s.n_subjects; ++i)
        for (int w = 0; w < s.n_worlds; ++w) push(aig);
    ob_base_ = inputs_.size();
    const int sets = 1 << s.n_worlds;
    for (int x = 0; x < sets; ++x)
      for (int y = 0; y < sets; ++y) push(aig);
  }

  const std::vector<Aig::Lit>& inputs() const { return inputs_; }
  std::size_t ob_base() const { return ob_base_; }

  Aig::Lit atom(std::size_t a, int w) const { return inputs_[a * static_cast<std::size_t>(shape_.n_worlds) + static_cast<std::size_t>(w)]; }
  Aig::Lit action(std::size_t a, int subj, int w) const {
    std::size_t base = shape_.atoms.size() * static_cast<std::size_t>(shape_.n_worlds);
    return inputs_[base + (a * static_cast<std::size_t>(shape_.n_subjects) + static_cast<std::size_t>(subj)) *
                              static_cast<std::size_t>(shape_.n_worlds) +
                   static_cast<std::size_t>(w)];
  }
  Aig::Lit ob(WorldSet x, WorldSet y) const {
    return inputs_[ob_base_ + (static_cast<std::size_t>(x) << shape_.n_worlds) + y];
  }

  /// Model whose decision bits are given by `bits` (one per input, canonical order).
  Model decode(const std::vector<char>& bits) const {
    Model m = Model::empty(shape_.n_worlds, shape_.n_subjects);
    std::size_t k = 0;
    for (const auto& p : shape_.atoms) {
      WorldSet s = 0;
      for (int w = 0; w < shape_.n_worlds; ++w)
        if (bits[k++]) s |= WorldSet{1} << w;
      m.val[p] = s;
    }
    for (const auto& a : shape_.actions) {
      std::vector<WorldSet> per(static_cast<std::size_t>(shape_.n_subjects), 0);
      for (int i = 0; i < shape_.n_subjects; ++i)
        for (int w = 0; w < shape_.n_worlds; ++w)
          if (bits[k++]) per[static_cast<std::size_t>(i)] |= WorldSet{1} << w;
      m.act_val[a] = per;
    }
    const int sets = 1 << shape_.n_worlds;
    for (int x = 0; x < sets; ++x)
      for (int y = 0; y < sets; ++y)
        if (bits[k++]) m.set_obligatory(static_cast<WorldSet>(x), static_cast<WorldSet>(y));
    m.subj_interp = shape_.subj_interp;
    return m;
  }

  /// Inverse of decode: the decision bits describing m.
  std::vector<char> encode(const Model& m) const {
    std::vector<char> bits;
    for (const auto& p : shape_.atoms)
      for (int w = 0; w < shape_.n_worlds; ++w) bits.push_back((m.val.at(p) >> w) & 1u);
    for (const auto& a : shape_.actions)
      for (int i = 0; i < shape_.n_subjects; ++i)
        for (int w = 0; w < shape_.n_worlds; ++w) bits.push_back((m.act_val.at(a)[static_cast<std::size_t>(i)] >> w) & 1u);
    const int sets = 1 << shape_.n_worlds;
    for (int x = 0; x < sets; ++x)
      for (int y = 0; y < sets; ++y) bits.push_back(m.obligatory(static_cast<WorldSet>(x), static_cast<WorldSet>(y)));
    return bits;
  }

 private:
  void push(Aig& aig) { inputs_.push_back(aig.input()); }

  const Shape& shape_;
  std::vector<Aig::Lit> inputs_;
  std::size_t ob_base_ = 0;
};

/// Grounds closed, macro-free formulas into per-world AIG literals over decision variables.
/// Quantifiers are instantiated over the finite domains of the shape; rigid subformulas
/// (box, ob, and anything built only from them) are grounded once.
class Grounder {
 public:
  using Lit = Aig::Lit;
  using Ext = std::vector<Lit>;  // one literal per world

  Grounder(Shape shape, std::uint64_t max_instances = 1'000'000)
      : shape_(std::move(shape)), vars_(shape_, aig_), max_instances_(max_instances) {
    for (std::size_t i = 0; i < shape_.atoms.size(); ++i) atom_index_[shape_.atoms[i]] = i;
    for (std::size_t i = 0; i < shape_.actions.size(); ++i) action_index_[shape_.actions[i]] = i;
  }

  Grounder(const Grounder&) = delete;
  Grounder& operator=(const Grounder&) = delete;

  Aig& aig() { return aig_; }
  const Aig& aig() const { return aig_; }
  const Shape& shape() const { return shape_; }
  const DecisionVars& vars() const { return vars_; }
  std::uint64_t instances() const { return instances_; }

  /// Per-world truth of f.
  Ext ground(const Formula& fm) {
    Env env;
    return ext(fm, env);
  }

  /// f holds at every world.
  Lit ground_valid(const Formula& fm) { return all_of(ground(fm)); }

  /// Frame conditions as a single literal over the ob bits.
  Lit frame(const FrameConditions& fc) {
    const WorldSet all = all_worlds(shape_.n_worlds);
    Lit acc = Aig::kTrue;
    auto ob = [&](WorldSet x, WorldSet y) { return vars_.ob(x, y); };
    for (WorldSet x = 0; x <= all; ++x) {
      if (fc.c1) acc = aig_.conj(acc, Aig::neg(ob(x, 0)));
      for (WorldSet y = 0; y <= all; ++y) {
        if (fc.c2 && (y & x) != y) acc = aig_.conj(acc, aig_.iff(ob(x, y), ob(x, y & x)));
        if (fc.c4 && subset(y, x))
          for (WorldSet z = 0; z <= all; ++z)
            if (subset(x, z)) acc = aig_.conj(acc, aig_.implies(ob(x, y), ob(z, (z & ~x) | y)));
        for (WorldSet z = 0; z <= all; ++z) {
          if (fc.c3 && y < z && (x & y & z))
            acc = aig_.conj(acc, aig_.implies(aig_.conj(ob(x, y), ob(x, z)), ob(x, y & z)));
          if (fc.c5 && subset(y, x) && y != x && (y & z)) acc = aig_.conj(acc, aig_.implies(ob(x, z), ob(y, z)));
        }
      }
    }
    return acc;
  }

 private:
  Lit all_of(const Ext& e) {
    Lit acc = Aig::kTrue;
    for (Lit l : e) acc = aig_.conj(acc, l);
    return acc;
  }

  static bool all_false(const Ext& e) {
    for (Lit l : e)
      if (l != Aig::kFalse) return false;
    return true;
  }

  Ext rigid(Lit l) const { return Ext(static_cast<std::size_t>(shape_.n_worlds), l); }

  Ext constant(WorldSet s) const {
    Ext e(static_cast<std::size_t>(shape_.n_worlds));
    for (int w = 0; w < shape_.n_worlds; ++w) e[static_cast<std::size_t>(w)] = ((s >> w) & 1u) ? Aig::kTrue : Aig::kFalse;
    return e;
  }

  int subject_of(const SubjectRef& s, const Env& env) const {
    if (s.is_var) return std::get<int>(env.get(s.name));
    auto it = shape_.subj_interp.find(s.name);
    if (it == shape_.subj_interp.end()) throw UninterpretedSymbol("subject constant '" + s.name + "'");
    return it->second;
  }

  bool closed(const Formula& fm) {
    auto it = closed_.find(fm.get());
    if (it != closed_.end()) return it->second;
    bool c = free_sorts(fm).empty();
    closed_.emplace(fm.get(), c);
    return c;
  }

  void count() {
    if (++instances_ > max_instances_) throw GroundingBlowup(max_instances_);
  }

  Ext ext(const Formula& fm, Env& env) {
    const Node& n = *fm;
    const bool cacheable = n.kind >= Kind::Not && (env.empty() || closed(fm));
    if (cacheable) {
      auto it = cache_.find(fm.get());
      if (it != cache_.end()) return it->second;
    }
    Ext r = compute(fm, env);
    if (cacheable) cache_.emplace(fm.get(), r);
    return r;
  }

  Ext pointwise(const Ext& a, const Ext& b, Lit (Aig::*op)(Lit, Lit)) {
    Ext r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = (aig_.*op)(a[i], b[i]);
    return r;
  }

  // Literal for "the extension described by `e` equals the concrete set s".
  Lit equals(const Ext& e, WorldSet s) {
    Lit acc = Aig::kTrue;
    for (std::size_t w = 0; w < e.size() && acc != Aig::kFalse; ++w)
      acc = aig_.conj(acc, ((s >> w) & 1u) ? e[w] : Aig::neg(e[w]));
    return acc;
  }

  std::vector<WorldSet> candidates(const Ext& e) const {
    std::vector<WorldSet> out;
    const WorldSet all = all_worlds(shape_.n_worlds);
    for (WorldSet s = 0; s <= all; ++s) {
      bool ok = true;
      for (std::size_t w = 0; w < e.size() && ok; ++w)
        if (Aig::is_const(e[w]) && (e[w] == Aig::kTrue) != static_cast<bool>((s >> w) & 1u)) ok = false;
      if (ok) out.push_back(s);
    }
    return out;
  }

  Ext compute(const Formula& fm, Env& env) {
    const Node& n = *fm;
    switch (n.kind) {
      case Kind::True: return rigid(Aig::kTrue);
      case Kind::False: return rigid(Aig::kFalse);
      case Kind::Atom: {
        auto it = atom_index_.find(n.name);
        if (it == atom_index_.end()) throw UninterpretedSymbol("atom '" + n.name + "'");
        Ext e(static_cast<std::size_t>(shape_.n_worlds));
        for (int w = 0; w < shape_.n_worlds; ++w) e[static_cast<std::size_t>(w)] = vars_.atom(it->second, w);
        return e;
      }
      case Kind::Apply: {
        auto it = action_index_.find(n.name);
        if (it == action_index_.end()) throw UninterpretedSymbol("action '" + n.name + "'");
        int s = subject_of(n.subject, env);
        Ext e(static_cast<std::size_t>(shape_.n_worlds));
        for (int w = 0; w < shape_.n_worlds; ++w) e[static_cast<std::size_t>(w)] = vars_.action(it->second, s, w);
        return e;
      }
      case Kind::OpenApply:
        return constant(std::get<std::vector<WorldSet>>(env.get(n.name)).at(static_cast<std::size_t>(subject_of(n.subject, env))));
      case Kind::TermVar: return constant(std::get<WorldSet>(env.get(n.name)));
      case Kind::MaximCirc: return constant(std::get<MaximValue>(env.get(n.name)).circumstances);
      case Kind::MaximGoal: return constant(std::get<MaximValue>(env.get(n.name)).goal);
      case Kind::MaximAct:
        return constant(std::get<MaximValue>(env.get(n.name)).act.at(static_cast<std::size_t>(subject_of(n.subject, env))));
      case Kind::Not: {
        Ext a = ext(n.args[0], env);
        for (auto& l : a) l = Aig::neg(l);
        return a;
      }
      case Kind::And: return pointwise(ext(n.args[0], env), ext(n.args[1], env), &Aig::conj);
      case Kind::Or: return pointwise(ext(n.args[0], env), ext(n.args[1], env), &Aig::disj);
      case Kind::Implies: return pointwise(ext(n.args[0], env), ext(n.args[1], env), &Aig::implies);
      case Kind::Iff: return pointwise(ext(n.args[0], env), ext(n.args[1], env), &Aig::iff);
      case Kind::Box: return rigid(all_of(ext(n.args[0], env)));
      case Kind::Ob: {
        Ext body = ext(n.args[0], env);
        Ext ctx = ext(n.args[1], env);
        Lit acc = Aig::kFalse;
        for (WorldSet x : candidates(ctx)) {
          Lit cx = equals(ctx, x);
          if (cx == Aig::kFalse) continue;
          Lit inner = Aig::kFalse;
          for (WorldSet y : candidates(body)) inner = aig_.disj(inner, aig_.conj(equals(body, y), vars_.ob(x, y)));
          acc = aig_.disj(acc, aig_.conj(cx, inner));
        }
        return rigid(acc);
      }
      case Kind::ForallSubject: {
        Ext acc = rigid(Aig::kTrue);
        for (int s = 0; s < shape_.n_subjects; ++s) acc = pointwise(acc, bind(n, Value{s}, env), &Aig::conj);
        return acc;
      }
      case Kind::ForallTerm: {
        Ext acc = rigid(Aig::kTrue);
        const WorldSet all = all_worlds(shape_.n_worlds);
        for (WorldSet x = 0; x <= all; ++x) acc = pointwise(acc, bind(n, Value{x}, env), &Aig::conj);
        return acc;
      }
      case Kind::ForallOpen: {
        Ext acc = rigid(Aig::kTrue);
        for_each_open(shape_.n_subjects, shape_.n_worlds, [&](const std::vector<WorldSet>& a) {
          acc = pointwise(acc, bind(n, Value{a}, env), &Aig::conj);
          return !all_false(acc);
        });
        return acc;
      }
      case Kind::ForallMaxim: {
        Ext acc = rigid(Aig::kTrue);
        const WorldSet all = all_worlds(shape_.n_worlds);
        for (WorldSet c = 0; c <= all; ++c)
          for_each_open(shape_.n_subjects, shape_.n_worlds, [&](const std::vector<WorldSet>& a) {
            for (WorldSet g = 0; g <= all && !all_false(acc); ++g)
              acc = pointwise(acc, bind(n, Value{MaximValue{c, a, g}}, env), &Aig::conj);
            return !all_false(acc);
          });
        return acc;
      }
      case Kind::MacroCall: throw UnexpandedMacro(n.name);
    }
    return rigid(Aig::kFalse);
  }

  Ext bind(const Node& q, Value v, Env& env) {
    count();
    env.push(q.name, std::move(v));
    Ext r = ext(q.args[0], env);
    env.pop();
    return r;
  }

  Shape shape_;
  Aig aig_;
  DecisionVars vars_;
  std::uint64_t max_instances_;
  std::uint64_t instances_ = 0;
  std::map<std::string, std::size_t> atom_index_;
  std::map<std::string, std::size_t> action_index_;
  std::unordered_map<const Node*, Ext> cache_;
  std::unordered_map<const Node*, bool> closed_;
};

}  // namespace ddlkant

#endif  // DDLKANT_GROUND_HPP
