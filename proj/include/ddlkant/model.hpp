#ifndef DDLKANT_MODEL_HPP
#define DDLKANT_MODEL_HPP

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "formula.hpp"
#include "syntax.hpp"

namespace ddlkant {

/// Set of worlds as a bitmask; bit i is world i.
using WorldSet = std::uint32_t;

/// ob(X) needs one bit per candidate set, so 2^n_w must fit in 64 bits.
inline constexpr int kMaxWorlds = 6;

inline WorldSet all_worlds(int n) { return n >= 32 ? ~WorldSet{0} : ((WorldSet{1} << n) - 1); }
inline bool subset(WorldSet a, WorldSet b) { return (a & ~b) == 0; }

class UninterpretedSymbol : public Error {
 public:
  explicit UninterpretedSymbol(const std::string& what) : Error("uninterpreted symbol: " + what) {}
};

class UnexpandedMacro : public Error {
 public:
  explicit UnexpandedMacro(const std::string& name) : Error("unexpanded macro '" + name + "' reached the kernel") {}
};

/// Finite Carmo-Jones structure.
struct Model {
  std::vector<std::string> worlds;
  std::vector<std::string> subjects;
  /// ob[X] is a bitset over candidate sets Y: bit Y set iff Y is obligatory in context X.
  std::vector<std::uint64_t> ob;
  std::map<std::string, WorldSet> val;
  std::map<std::string, std::vector<WorldSet>> act_val;
  std::map<std::string, int> subj_interp;

  static Model empty(int n_worlds, int n_subjects) {
    Model m;
    for (int i = 0; i < n_worlds; ++i) m.worlds.push_back("w" + std::to_string(i + 1));
    for (int i = 0; i < n_subjects; ++i) m.subjects.push_back("s" + std::to_string(i + 1));
    m.ob.assign(std::size_t{1} << n_worlds, 0);
    return m;
  }

  int n_worlds() const { return static_cast<int>(worlds.size()); }
  int n_subjects() const { return static_cast<int>(subjects.size()); }
  WorldSet all() const { return all_worlds(n_worlds()); }
  int n_sets() const { return 1 << n_worlds(); }

  bool obligatory(WorldSet context, WorldSet body) const { return (ob[context] >> body) & 1u; }
  void set_obligatory(WorldSet context, WorldSet body, bool on = true) {
    if (on)
      ob[context] |= std::uint64_t{1} << body;
    else
      ob[context] &= ~(std::uint64_t{1} << body);
  }

  friend bool operator==(const Model&, const Model&) = default;
};

// ---------------------------------------------------------------------------
// Evaluation

/// Concrete value of a maxim variable: circumstances, act (one set per subject), goal.
struct MaximValue {
  WorldSet circumstances = 0;
  std::vector<WorldSet> act;
  WorldSet goal = 0;
};

using Value = std::variant<int, WorldSet, std::vector<WorldSet>, MaximValue>;

/// Variable bindings, innermost last.
class Env {
 public:
  void push(const std::string& v, Value val) { items_.emplace_back(v, std::move(val)); }
  void pop() { items_.pop_back(); }
  bool empty() const { return items_.empty(); }

  const Value& get(const std::string& v) const {
    for (auto it = items_.rbegin(); it != items_.rend(); ++it)
      if (it->first == v) return it->second;
    throw Error("unbound variable '" + v + "' during evaluation");
  }

 private:
  std::vector<std::pair<std::string, Value>> items_;
};

/// Calls `fn(std::vector<WorldSet>&)` for every function subjects -> world sets, in little-endian counting order.
template <class Fn>
void for_each_open(int n_subjects, int n_worlds, Fn&& fn) {
  const WorldSet sets = WorldSet{1} << n_worlds;
  std::vector<WorldSet> v(static_cast<std::size_t>(n_subjects), 0);
  for (;;) {
    if (!fn(v)) return;
    int i = 0;
    while (i < n_subjects && ++v[i] == sets) v[i++] = 0;
    if (i == n_subjects) return;
  }
}

inline std::uint64_t open_count(int n_subjects, int n_worlds) {
  return std::uint64_t{1} << (n_subjects * n_worlds);
}

/// Extension-based evaluator. Closed subformulas are cached per node; the cache is
/// private to this object so separate evaluators over one model never share state.
class Evaluator {
 public:
  explicit Evaluator(const Model& m, bool memoize = true) : m_(m), memoize_(memoize) {}

  WorldSet extension(const Formula& fm) {
    Env env;
    return ext(fm, env);
  }

  WorldSet extension(const Formula& fm, Env& env) { return ext(fm, env); }

  bool eval(const Formula& fm, int world) { return (extension(fm) >> world) & 1u; }

  /// True at every world.
  bool holds(const Formula& fm) { return extension(fm) == m_.all(); }

 private:
  int subject_of(const SubjectRef& s, const Env& env) const {
    if (s.is_var) return std::get<int>(env.get(s.name));
    auto it = m_.subj_interp.find(s.name);
    if (it == m_.subj_interp.end()) throw UninterpretedSymbol("subject constant '" + s.name + "'");
    return it->second;
  }

  bool closed(const Formula& fm) {
    auto it = closed_.find(fm.get());
    if (it != closed_.end()) return it->second;
    bool c = free_sorts(fm).empty();
    closed_.emplace(fm.get(), c);
    return c;
  }

  WorldSet ext(const Formula& fm, Env& env) {
    const Node& n = *fm;
    const bool cacheable = memoize_ && n.kind >= Kind::Not && (env.empty() || closed(fm));
    if (cacheable) {
      auto it = cache_.find(fm.get());
      if (it != cache_.end()) return it->second;
    }
    WorldSet r = compute(fm, env);
    if (cacheable) cache_.emplace(fm.get(), r);
    return r;
  }

  WorldSet compute(const Formula& fm, Env& env) {
    const Node& n = *fm;
    const WorldSet all = m_.all();
    switch (n.kind) {
      case Kind::True: return all;
      case Kind::False: return 0;
      case Kind::Atom: {
        auto it = m_.val.find(n.name);
        if (it == m_.val.end()) throw UninterpretedSymbol("atom '" + n.name + "'");
        return it->second;
      }
      case Kind::Apply: {
        auto it = m_.act_val.find(n.name);
        if (it == m_.act_val.end()) throw UninterpretedSymbol("action '" + n.name + "'");
        return it->second.at(static_cast<std::size_t>(subject_of(n.subject, env)));
      }
      case Kind::OpenApply:
        return std::get<std::vector<WorldSet>>(env.get(n.name)).at(static_cast<std::size_t>(subject_of(n.subject, env)));
      case Kind::TermVar: return std::get<WorldSet>(env.get(n.name));
      case Kind::MaximCirc: return std::get<MaximValue>(env.get(n.name)).circumstances;
      case Kind::MaximGoal: return std::get<MaximValue>(env.get(n.name)).goal;
      case Kind::MaximAct:
        return std::get<MaximValue>(env.get(n.name)).act.at(static_cast<std::size_t>(subject_of(n.subject, env)));
      case Kind::Not: return all & ~ext(n.args[0], env);
      case Kind::And: {
        WorldSet a = ext(n.args[0], env);
        return a == 0 ? 0 : a & ext(n.args[1], env);
      }
      case Kind::Or: {
        WorldSet a = ext(n.args[0], env);
        return a == all ? all : a | ext(n.args[1], env);
      }
      case Kind::Implies: return all & (~ext(n.args[0], env) | ext(n.args[1], env));
      case Kind::Iff: return all & ~(ext(n.args[0], env) ^ ext(n.args[1], env));
      case Kind::Box: return ext(n.args[0], env) == all ? all : 0;
      case Kind::Ob: {
        WorldSet body = ext(n.args[0], env);
        WorldSet ctx = ext(n.args[1], env);
        return m_.obligatory(ctx, body) ? all : 0;
      }
      case Kind::ForallSubject: {
        WorldSet acc = all;
        for (int s = 0; s < m_.n_subjects() && acc; ++s) acc &= bind(n, Value{s}, env);
        return acc;
      }
      case Kind::ForallTerm: {
        WorldSet acc = all;
        for (WorldSet x = 0; x <= all && acc; ++x) acc &= bind(n, Value{x}, env);
        return acc;
      }
      case Kind::ForallOpen: {
        WorldSet acc = all;
        for_each_open(m_.n_subjects(), m_.n_worlds(), [&](const std::vector<WorldSet>& a) {
          acc &= bind(n, Value{a}, env);
          return acc != 0;
        });
        return acc;
      }
      case Kind::ForallMaxim: {
        WorldSet acc = all;
        for (WorldSet c = 0; c <= all && acc; ++c)
          for_each_open(m_.n_subjects(), m_.n_worlds(), [&](const std::vector<WorldSet>& a) {
            for (WorldSet g = 0; g <= all && acc; ++g) acc &= bind(n, Value{MaximValue{c, a, g}}, env);
            return acc != 0;
          });
        return acc;
      }
      case Kind::MacroCall: throw UnexpandedMacro(n.name);
    }
    return 0;
  }

  WorldSet bind(const Node& q, Value v, Env& env) {
    env.push(q.name, std::move(v));
    WorldSet r = ext(q.args[0], env);
    env.pop();
    return r;
  }

  const Model& m_;
  bool memoize_;
  std::unordered_map<const Node*, WorldSet> cache_;
  std::unordered_map<const Node*, bool> closed_;
};

inline WorldSet extension(const Formula& fm, const Model& m) { return Evaluator(m).extension(fm); }
inline bool eval(const Formula& fm, const Model& m, int world) { return Evaluator(m).eval(fm, world); }

// ---------------------------------------------------------------------------
// Frame conditions

struct FrameConditions {
  bool c1 = true;  // the empty set is never obligatory
  bool c2 = true;  // only the part inside the context matters
  bool c3 = true;  // closure under consistent intersection
  bool c4 = true;  // upward transfer to wider contexts
  bool c5 = true;  // downward transfer to narrower contexts

  bool enabled(int c) const {
    switch (c) {
      case 1: return c1;
      case 2: return c2;
      case 3: return c3;
      case 4: return c4;
      default: return c5;
    }
  }
  static FrameConditions only(std::initializer_list<int> cs) {
    FrameConditions fc{false, false, false, false, false};
    for (int c : cs) {
      if (c == 1) fc.c1 = true;
      if (c == 2) fc.c2 = true;
      if (c == 3) fc.c3 = true;
      if (c == 4) fc.c4 = true;
      if (c == 5) fc.c5 = true;
    }
    return fc;
  }
  friend bool operator==(const FrameConditions&, const FrameConditions&) = default;
};

struct FrameViolation {
  int condition = 0;
  WorldSet x = 0;
  WorldSet y = 0;
  WorldSet z = 0;
};

/// Lists every violated instance of the enabled conditions.
/// C1: {} not in ob(X).  C2: Y&X == Z&X implies (Y in ob(X) <=> Z in ob(X)).
/// C3: Y,Z in ob(X), X&Y&Z != {} implies Y&Z in ob(X).
/// C4: Y <= X <= Z, Y in ob(X) implies (Z\X)|Y in ob(Z).
/// C5: Y <= X, Z in ob(X), Y&Z != {} implies Z in ob(Y).
inline std::vector<FrameViolation> check_frame(const Model& m, const FrameConditions& fc = {}) {
  std::vector<FrameViolation> out;
  const WorldSet all = m.all();
  auto ob = [&](WorldSet x, WorldSet y) { return m.obligatory(x, y); };
  for (WorldSet x = 0; x <= all; ++x) {
    if (fc.c1 && ob(x, 0)) out.push_back({1, x, 0, 0});
    for (WorldSet y = 0; y <= all; ++y) {
      if (fc.c2 && ob(x, y) != ob(x, y & x)) out.push_back({2, x, y, y & x});
      if (fc.c4 && subset(y, x) && ob(x, y)) {
        for (WorldSet z = 0; z <= all; ++z)
          if (subset(x, z) && !ob(z, (z & ~x) | y)) out.push_back({4, x, y, z});
      }
      for (WorldSet z = 0; z <= all; ++z) {
        if (fc.c3 && ob(x, y) && ob(x, z) && (x & y & z) && !ob(x, y & z)) out.push_back({3, x, y, z});
        if (fc.c5 && subset(y, x) && ob(x, z) && (y & z) && !ob(y, z)) out.push_back({5, x, y, z});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json world_set_json(const Model& m, WorldSet s) {
  auto arr = nlohmann::json::array();
  for (int i = 0; i < m.n_worlds(); ++i)
    if ((s >> i) & 1u) arr.push_back(m.worlds[static_cast<std::size_t>(i)]);
  return arr;
}

inline std::string describe(const Model& m, const FrameViolation& v) {
  auto set = [&](WorldSet s) { return world_set_json(m, s).dump(); };
  return "C" + std::to_string(v.condition) + " X=" + set(v.x) + " Y=" + set(v.y) + " Z=" + set(v.z);
}

inline nlohmann::json to_json(const Model& m) {
  using nlohmann::json;
  json j;
  j["worlds"] = m.worlds;
  j["subjects"] = m.subjects;
  json ob = json::array();
  for (WorldSet x = 0; x <= m.all(); ++x) {
    if (m.ob[x] == 0) continue;
    json obligatory = json::array();
    for (WorldSet y = 0; y <= m.all(); ++y)
      if (m.obligatory(x, y)) obligatory.push_back(world_set_json(m, y));
    ob.push_back({{"context", world_set_json(m, x)}, {"obligatory", obligatory}});
  }
  j["ob"] = ob;
  json val = json::object();
  for (const auto& [p, s] : m.val) val[p] = world_set_json(m, s);
  j["val"] = val;
  json act = json::object();
  for (const auto& [a, per] : m.act_val) {
    json row = json::object();
    for (std::size_t i = 0; i < per.size(); ++i) row[m.subjects[i]] = world_set_json(m, per[i]);
    act[a] = row;
  }
  j["act_val"] = act;
  json interp = json::object();
  for (const auto& [c, s] : m.subj_interp) interp[c] = m.subjects[static_cast<std::size_t>(s)];
  j["subjects_interp"] = interp;
  return j;
}

inline Model model_from_json(const nlohmann::json& j) {
  Model m;
  m.worlds = j.at("worlds").get<std::vector<std::string>>();
  m.subjects = j.at("subjects").get<std::vector<std::string>>();
  if (m.worlds.empty() || m.n_worlds() > kMaxWorlds) throw Error("model must have 1.." + std::to_string(kMaxWorlds) + " worlds");
  if (m.subjects.empty()) throw Error("model must have at least one subject");
  m.ob.assign(std::size_t{1} << m.n_worlds(), 0);
  auto index_of = [](const std::vector<std::string>& names, const std::string& n) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return static_cast<int>(i);
    throw Error("unknown name '" + n + "' in model JSON");
  };
  auto set_of = [&](const nlohmann::json& arr) {
    WorldSet s = 0;
    for (const auto& w : arr) s |= WorldSet{1} << index_of(m.worlds, w.get<std::string>());
    return s;
  };
  for (const auto& e : j.at("ob"))
    for (const auto& y : e.at("obligatory")) m.set_obligatory(set_of(e.at("context")), set_of(y));
  for (const auto& [p, s] : j.at("val").items()) m.val[p] = set_of(s);
  for (const auto& [a, row] : j.at("act_val").items()) {
    std::vector<WorldSet> per(m.subjects.size(), 0);
    for (const auto& [s, ws] : row.items()) per[static_cast<std::size_t>(index_of(m.subjects, s))] = set_of(ws);
    m.act_val[a] = per;
  }
  for (const auto& [c, s] : j.at("subjects_interp").items()) m.subj_interp[c] = index_of(m.subjects, s.get<std::string>());
  return m;
}

}  // namespace ddlkant

#endif  // DDLKANT_MODEL_HPP
