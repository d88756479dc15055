#ifndef DDLKANT_SAT_HPP
#define DDLKANT_SAT_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "formula.hpp"

namespace ddlkant {

class BudgetExceeded : public Error {
 public:
  BudgetExceeded() : Error("search budget exceeded") {}
};

/// Node/time cap shared by every solver call of one query.
struct Budget {
  std::uint64_t max_nodes = 10'000'000;
  std::int64_t max_millis = 60'000;

  std::uint64_t nodes = 0;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }

  void tick() {
    ++nodes;
    if (nodes > max_nodes) throw BudgetExceeded();
    if ((nodes & 0x3ff) == 0 && elapsed_ms() > max_millis) throw BudgetExceeded();
  }
};

namespace sat {

// Literal encoding: 2*var + (negated ? 1 : 0).
using Lit = std::uint32_t;
inline Lit mk(std::uint32_t var, bool neg = false) { return (var << 1) | (neg ? 1u : 0u); }
inline std::uint32_t var(Lit l) { return l >> 1; }
inline bool sign(Lit l) { return l & 1u; }
inline Lit negate(Lit l) { return l ^ 1u; }

enum class Value : std::int8_t { False = 0, True = 1, Undef = 2 };

/// Conflict-driven clause-learning solver with two watched literals, 1UIP learning,
/// activity-ordered decisions and solving under assumptions.
class Solver {
 public:
  std::uint32_t new_var() {
    std::uint32_t v = static_cast<std::uint32_t>(assign_.size());
    assign_.push_back(Value::Undef);
    level_.push_back(0);
    reason_.push_back(-1);
    activity_.push_back(0.0);
    seen_.push_back(0);
    heap_pos_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
  }

  std::uint32_t num_vars() const { return static_cast<std::uint32_t>(assign_.size()); }

  /// Adds a clause at decision level 0. Returns false if the formula became trivially unsatisfiable.
  bool add_clause(std::vector<Lit> c) {
    if (!ok_) return false;
    backtrack(0);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i + 1 < c.size() && c[i + 1] == negate(c[i])) return true;  // tautology
      Value v = value(c[i]);
      if (v == Value::True) return true;
      if (v == Value::Undef) kept.push_back(c[i]);
    }
    if (kept.empty()) return ok_ = false;
    if (kept.size() == 1) {
      enqueue(kept[0], -1);
      if (propagate() >= 0) ok_ = false;
      return ok_;
    }
    attach(std::move(kept), false);
    return true;
  }

  /// Returns true iff satisfiable under the given assumptions. Ticks `budget` once per decision and conflict.
  bool solve(const std::vector<Lit>& assumptions, Budget& budget) {
    if (!ok_) return false;
    backtrack(0);
    if (propagate() >= 0) return ok_ = false;
    std::uint64_t conflicts = 0;
    std::uint64_t restart_at = 100;
    for (;;) {
      int confl = propagate();
      if (confl >= 0) {
        budget.tick();
        ++conflicts;
        if (decision_level() == 0) return ok_ = false;
        std::vector<Lit> learnt;
        int back = analyze(confl, learnt);
        backtrack(back);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int idx = attach(learnt, true);
          enqueue(learnt[0], idx);
        }
        decay();
        continue;
      }
      if (conflicts >= restart_at) {
        restart_at += restart_at / 2 + 100;
        backtrack(0);
        continue;
      }
      // Assumptions first, in order.
      Lit next = 0;
      bool have = false;
      while (decision_level() < static_cast<int>(assumptions.size())) {
        Lit a = assumptions[static_cast<std::size_t>(decision_level())];
        Value v = value(a);
        if (v == Value::True) {
          new_level();
        } else if (v == Value::False) {
          backtrack(0);
          return false;
        } else {
          next = a;
          have = true;
          break;
        }
      }
      if (!have) {
        std::optional<std::uint32_t> v = pick();
        if (!v) {
          model_.assign(assign_.size(), false);
          for (std::size_t i = 0; i < assign_.size(); ++i) model_[i] = assign_[i] == Value::True;
          backtrack(0);
          return true;
        }
        next = mk(*v, true);  // false first
      }
      budget.tick();
      new_level();
      enqueue(next, -1);
    }
  }

  const std::vector<bool>& model() const { return model_; }
  bool okay() const { return ok_; }

 private:
  struct Clause {
    std::vector<Lit> lits;
    bool learnt;
  };

  Value value(Lit l) const {
    Value v = assign_[var(l)];
    if (v == Value::Undef) return v;
    return (v == Value::True) != sign(l) ? Value::True : Value::False;
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  void new_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }

  int attach(std::vector<Lit> lits, bool learnt) {
    int idx = static_cast<int>(clauses_.size());
    watches_[negate(lits[0])].push_back(idx);
    watches_[negate(lits[1])].push_back(idx);
    clauses_.push_back({std::move(lits), learnt});
    return idx;
  }

  void enqueue(Lit l, int reason) {
    std::uint32_t v = var(l);
    assign_[v] = sign(l) ? Value::False : Value::True;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  // Returns the index of a conflicting clause, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];  // p became true; clauses watching ~p must move
      std::vector<int>& ws = watches_[p];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        int ci = ws[i++];
        Clause& c = clauses_[static_cast<std::size_t>(ci)];
        Lit false_lit = negate(p);
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        if (value(c.lits[0]) == Value::True) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != Value::False) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[negate(c.lits[1])].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = ci;
        if (value(c.lits[0]) == Value::False) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead_ = trail_.size();
          return ci;
        }
        enqueue(c.lits[0], ci);
      }
      ws.resize(j);
    }
    return -1;
  }

  int analyze(int confl, std::vector<Lit>& learnt) {
    learnt.assign(1, 0);
    int pathc = 0;
    Lit p = 0;
    bool first = true;
    std::size_t idx = trail_.size();
    for (;;) {
      const Clause& c = clauses_[static_cast<std::size_t>(confl)];
      for (std::size_t k = first ? 0 : 1; k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        std::uint32_t v = var(q);
        if (!seen_[v] && level_[v] > 0) {
          seen_[v] = 1;
          bump(v);
          if (level_[v] >= decision_level())
            ++pathc;
          else
            learnt.push_back(q);
        }
      }
      first = false;
      do {
        p = trail_[--idx];
      } while (!seen_[var(p)]);
      seen_[var(p)] = 0;
      --pathc;
      if (pathc <= 0) break;
      confl = reason_[var(p)];
    }
    learnt[0] = negate(p);
    int back = 0;
    std::size_t max_i = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      seen_[var(learnt[k])] = 0;
      if (level_[var(learnt[k])] > back) {
        back = level_[var(learnt[k])];
        max_i = k;
      }
    }
    if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
    return back;
  }

  void backtrack(int level) {
    if (decision_level() <= level) return;
    for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);) {
      std::uint32_t v = var(trail_[i]);
      assign_[v] = Value::Undef;
      reason_[v] = -1;
      if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]));
    trail_lim_.resize(static_cast<std::size_t>(level));
    qhead_ = trail_.size();
  }

  std::optional<std::uint32_t> pick() {
    while (!heap_.empty()) {
      std::uint32_t v = heap_pop();
      if (assign_[v] == Value::Undef) return v;
    }
    return std::nullopt;
  }

  void bump(std::uint32_t v) {
    activity_[v] += inc_;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) sift_up(heap_pos_[v]);
  }
  void decay() { inc_ /= 0.95; }

  // Max-heap on activity; ties broken by lower variable index.
  bool before(std::uint32_t a, std::uint32_t b) const {
    return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
  }
  void heap_insert(std::uint32_t v) {
    heap_pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    sift_up(heap_pos_[v]);
  }
  std::uint32_t heap_pop() {
    std::uint32_t top = heap_.front();
    heap_pos_[top] = -1;
    std::uint32_t last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_pos_[last] = 0;
      sift_down(0);
    }
    return top;
  }
  void sift_up(int i) {
    std::uint32_t v = heap_[static_cast<std::size_t>(i)];
    while (i > 0) {
      int parent = (i - 1) / 2;
      std::uint32_t pv = heap_[static_cast<std::size_t>(parent)];
      if (!before(v, pv)) break;
      heap_[static_cast<std::size_t>(i)] = pv;
      heap_pos_[pv] = i;
      i = parent;
    }
    heap_[static_cast<std::size_t>(i)] = v;
    heap_pos_[v] = i;
  }
  void sift_down(int i) {
    std::uint32_t v = heap_[static_cast<std::size_t>(i)];
    const int n = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && before(heap_[static_cast<std::size_t>(child + 1)], heap_[static_cast<std::size_t>(child)]))
        ++child;
      std::uint32_t cv = heap_[static_cast<std::size_t>(child)];
      if (!before(cv, v)) break;
      heap_[static_cast<std::size_t>(i)] = cv;
      heap_pos_[cv] = i;
      i = child;
    }
    heap_[static_cast<std::size_t>(i)] = v;
    heap_pos_[v] = i;
  }

  bool ok_ = true;
  std::vector<Value> assign_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<int> heap_pos_;
  std::vector<std::uint32_t> heap_;
  std::vector<std::vector<int>> watches_;
  std::vector<Clause> clauses_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  double inc_ = 1.0;
  std::vector<bool> model_;
};

}  // namespace sat
}  // namespace ddlkant

#endif  // DDLKANT_SAT_HPP
