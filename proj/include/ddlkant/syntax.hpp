#ifndef DDLKANT_SYNTAX_HPP
#define DDLKANT_SYNTAX_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "formula.hpp"

namespace ddlkant {

/// Syntax error with a 1-based source location and the set of tokens that would have been accepted.
class ParseError : public Error {
 public:
  ParseError(int line, int column, std::string message, std::vector<std::string> expected = {})
      : Error(format(line, column, message, expected)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string format(int line, int column, const std::string& msg, const std::vector<std::string>& exp) {
    std::ostringstream os;
    os << line << ":" << column << ": " << msg;
    if (!exp.empty()) {
      os << " (expected ";
      for (std::size_t i = 0; i < exp.size(); ++i) os << (i ? ", " : "") << exp[i];
      os << ")";
    }
    return os.str();
  }

  int line_;
  int column_;
  std::vector<std::string> expected_;
};

/// A variable is used at a sort other than the one its quantifier binds.
class SortError : public Error {
 public:
  SortError(int line, int column, const std::string& msg)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg) {}
};

class UnboundVariable : public Error {
 public:
  UnboundVariable(std::string var, Sort s)
      : Error("unbound " + std::string(sort_name(s)) + " variable '" + var + "'"), var_(std::move(var)), sort_(s) {}
  const std::string& variable() const { return var_; }
  Sort sort() const { return sort_; }

 private:
  std::string var_;
  Sort sort_;
};

// ---------------------------------------------------------------------------
// S-expressions

struct Sexp {
  bool is_list = false;
  std::string token;
  std::vector<Sexp> items;
  int line = 1;
  int column = 1;

  bool is_token(std::string_view t) const { return !is_list && token == t; }
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip();
    }
    return out;
  }

 private:
  Sexp read() {
    skip();
    if (pos_ >= text_.size()) throw ParseError(line_, col_, "unexpected end of input", {"(", "identifier"});
    Sexp s;
    s.line = line_;
    s.column = col_;
    char c = text_[pos_];
    if (c == ')') throw ParseError(line_, col_, "unexpected ')'", {"(", "identifier"});
    if (c == '(') {
      advance();
      s.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw ParseError(line_, col_, "unexpected end of input", {")"});
        if (text_[pos_] == ')') {
          advance();
          return s;
        }
        s.items.push_back(read());
      }
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !delimiter(text_[pos_])) advance();
    s.token = std::string(text_.substr(start, pos_ - start));
    return s;
  }

  static bool delimiter(char c) {
    return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace detail

/// Reads every top-level s-expression in `text`. Comments run from ';' to end of line.
inline std::vector<Sexp> read_sexprs(std::string_view text) { return detail::Reader(text).read_all(); }

inline bool is_identifier(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

inline const std::vector<std::string>& macro_names() {
  static const std::vector<std::string> names = {"will",        "effective",  "not-universalizable",
                                                 "well-formed", "prohibited", "permissible",
                                                 "obligatory"};
  return names;
}

inline bool is_macro_name(std::string_view s) {
  const auto& n = macro_names();
  return std::find(n.begin(), n.end(), s) != n.end();
}

inline bool is_keyword(std::string_view s) {
  static const std::set<std::string, std::less<>> kw = {
      "true",        "false",       "not",        "and",          "or",   "implies", "iff",  "box",
      "dia",         "ob",          "act",        "circ",         "goal", "maxim",   "forall-subject",
      "forall-term", "forall-open", "forall-maxim"};
  return kw.count(s) > 0 || is_macro_name(s);
}

// ---------------------------------------------------------------------------
// Formula parser

struct ParseOptions {
  /// Accept free maxim variables (e.g. "(will m s1)" with m unbound).
  bool allow_free = false;
};

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(ParseOptions opts) : opts_(opts) {}

  Formula formula(const Sexp& s) {
    if (!s.is_list) return leaf(s);
    if (s.items.empty()) throw ParseError(s.line, s.column, "empty list", {"keyword"});
    const Sexp& head = s.items.front();
    if (head.is_list) throw ParseError(head.line, head.column, "expected a keyword", {"keyword"});
    const std::string& k = head.token;
    std::size_t n = s.items.size() - 1;

    if (k == "not") return f::neg(formula(arg(s, 1, 1)));
    if (k == "box") return f::box(formula(arg(s, 1, 1)));
    if (k == "dia") return f::dia(formula(arg(s, 1, 1)));
    if (k == "and" || k == "or") {
      if (n < 2) arity(s, "at least 2");
      Kind kind = k == "and" ? Kind::And : Kind::Or;
      std::vector<Formula> parts;
      for (std::size_t i = 1; i < s.items.size(); ++i) parts.push_back(formula(s.items[i]));
      Formula acc = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) acc = f::binary(kind, parts[i], acc);
      return acc;
    }
    if (k == "implies" || k == "iff") {
      if (n != 2) arity(s, "2");
      return f::binary(k == "implies" ? Kind::Implies : Kind::Iff, formula(s.items[1]), formula(s.items[2]));
    }
    if (k == "ob") {
      if (n == 1) return f::ob(formula(s.items[1]));
      if (n != 2) arity(s, "1 or 2");
      return f::ob(formula(s.items[1]), formula(s.items[2]));
    }
    if (k == "act") {
      if (n != 2) arity(s, "2");
      const Sexp& a = s.items[1];
      SubjectRef subj = subject(s.items[2]);
      std::string name = ident(a);
      if (auto sort = lookup(name)) {
        if (*sort == Sort::Open) return f::open_apply(name, subj);
        if (*sort == Sort::Maxim) return f::maxim_act(name, subj);
        throw SortError(a.line, a.column,
                        "'" + name + "' is a " + sort_name(*sort) + " variable used as an act");
      }
      return f::apply(name, subj);
    }
    if (k == "circ" || k == "goal") {
      std::string m = maxim_var(arg(s, 1, 1));
      return k == "circ" ? f::maxim_circ(m) : f::maxim_goal(m);
    }
    if (k == "forall-subject" || k == "forall-term" || k == "forall-open" || k == "forall-maxim") {
      if (n != 2) arity(s, "2");
      Sort sort = k == "forall-subject" ? Sort::Subject
                  : k == "forall-term"  ? Sort::Term
                  : k == "forall-open"  ? Sort::Open
                                        : Sort::Maxim;
      std::string v = ident(s.items[1]);
      scope_.emplace_back(v, sort);
      Formula body = formula(s.items[2]);
      scope_.pop_back();
      return f::forall(quantifier_kind(sort), v, body);
    }
    if (is_macro_name(k)) {
      if (n != 2) arity(s, "2");
      auto m = maxim(s.items[1]);
      return f::macro(k, m, subject(s.items[2]));
    }
    throw ParseError(head.line, head.column, "unknown form '" + k + "'",
                     {"not", "and", "or", "implies", "iff", "box", "dia", "ob", "act", "forall-*", "macro"});
  }

  std::shared_ptr<const MaximExpr> maxim(const Sexp& s) {
    if (!s.is_list) return f::maxim_var(maxim_var(s));
    if (s.items.size() != 4 || !s.items[0].is_token("maxim"))
      throw ParseError(s.line, s.column, "expected a maxim", {"(maxim C A G)", "maxim variable"});
    Formula c = formula(s.items[1]);
    const Sexp& a = s.items[2];
    std::string act = ident(a);
    ActRef ref{act, false};
    if (auto sort = lookup(act)) {
      if (*sort != Sort::Open)
        throw SortError(a.line, a.column, "'" + act + "' is a " + sort_name(*sort) + " variable used as an act");
      ref.is_var = true;
    }
    Formula g = formula(s.items[3]);
    return f::maxim(c, ref, g);
  }

 private:
  [[noreturn]] void arity(const Sexp& s, const std::string& want) {
    throw ParseError(s.line, s.column,
                     "'" + s.items[0].token + "' takes " + want + " argument(s), got " +
                         std::to_string(s.items.size() - 1));
  }

  const Sexp& arg(const Sexp& s, std::size_t i, std::size_t count) {
    if (s.items.size() - 1 != count) arity(s, std::to_string(count));
    return s.items[i];
  }

  std::string ident(const Sexp& s) {
    if (s.is_list || !is_identifier(s.token) || is_keyword(s.token))
      throw ParseError(s.line, s.column, s.is_list ? "expected an identifier" : "invalid identifier '" + s.token + "'",
                       {"identifier"});
    return s.token;
  }

  std::optional<Sort> lookup(const std::string& v) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == v) return it->second;
    return std::nullopt;
  }

  Formula leaf(const Sexp& s) {
    if (s.token == "true") return f::top();
    if (s.token == "false") return f::bottom();
    std::string name = ident(s);
    if (auto sort = lookup(name)) {
      if (*sort == Sort::Term) return f::term_var(name);
      throw SortError(s.line, s.column,
                      "'" + name + "' is a " + sort_name(*sort) + " variable used as a proposition");
    }
    return f::atom(name);
  }

  SubjectRef subject(const Sexp& s) {
    std::string name = ident(s);
    if (auto sort = lookup(name)) {
      if (*sort != Sort::Subject)
        throw SortError(s.line, s.column, "'" + name + "' is a " + sort_name(*sort) + " variable used as a subject");
      return {name, true};
    }
    return {name, false};
  }

  std::string maxim_var(const Sexp& s) {
    std::string name = ident(s);
    if (auto sort = lookup(name)) {
      if (*sort != Sort::Maxim)
        throw SortError(s.line, s.column, "'" + name + "' is a " + sort_name(*sort) + " variable used as a maxim");
      return name;
    }
    if (!opts_.allow_free) throw UnboundVariable(name, Sort::Maxim);
    return name;
  }

  ParseOptions opts_;
  std::vector<std::pair<std::string, Sort>> scope_;
};

}  // namespace detail

/// Parses one formula from an s-expression already read.
inline Formula parse(const Sexp& s, ParseOptions opts = {}) { return detail::FormulaParser(opts).formula(s); }

/// Parses exactly one formula from text.
inline Formula parse(std::string_view text, ParseOptions opts = {}) {
  auto forms = read_sexprs(text);
  if (forms.empty()) throw ParseError(1, 1, "unexpected end of input", {"(", "identifier"});
  if (forms.size() > 1)
    throw ParseError(forms[1].line, forms[1].column, "trailing input after formula", {"end of input"});
  return parse(forms[0], opts);
}

/// Parses every top-level form in text as a formula (formula files hold one or more).
inline std::vector<Formula> parse_all(std::string_view text, ParseOptions opts = {}) {
  std::vector<Formula> out;
  for (const auto& s : read_sexprs(text)) out.push_back(parse(s, opts));
  return out;
}

inline std::shared_ptr<const MaximExpr> parse_maxim(const Sexp& s, ParseOptions opts = {}) {
  return detail::FormulaParser(opts).maxim(s);
}

// ---------------------------------------------------------------------------
// Printer

namespace detail {

inline void print_to(std::string& out, const Formula& fm);

inline void print_maxim(std::string& out, const MaximExpr& m) {
  if (m.var) {
    out += *m.var;
    return;
  }
  out += "(maxim ";
  print_to(out, m.circumstances);
  out += ' ';
  out += m.act.name;
  out += ' ';
  print_to(out, m.goal);
  out += ')';
}

inline const char* keyword(Kind k) {
  switch (k) {
    case Kind::Not: return "not";
    case Kind::And: return "and";
    case Kind::Or: return "or";
    case Kind::Implies: return "implies";
    case Kind::Iff: return "iff";
    case Kind::Box: return "box";
    case Kind::Ob: return "ob";
    case Kind::ForallSubject: return "forall-subject";
    case Kind::ForallTerm: return "forall-term";
    case Kind::ForallOpen: return "forall-open";
    case Kind::ForallMaxim: return "forall-maxim";
    default: return "?";
  }
}

inline void print_to(std::string& out, const Formula& fm) {
  const Node& n = *fm;
  switch (n.kind) {
    case Kind::True: out += "true"; return;
    case Kind::False: out += "false"; return;
    case Kind::Atom:
    case Kind::TermVar: out += n.name; return;
    case Kind::Apply:
    case Kind::OpenApply:
    case Kind::MaximAct: out += "(act " + n.name + " " + n.subject.name + ")"; return;
    case Kind::MaximCirc: out += "(circ " + n.name + ")"; return;
    case Kind::MaximGoal: out += "(goal " + n.name + ")"; return;
    case Kind::MacroCall:
      out += "(" + n.name + " ";
      print_maxim(out, *n.maxim);
      out += " " + n.subject.name + ")";
      return;
    default: break;
  }
  out += '(';
  out += keyword(n.kind);
  if (is_quantifier(n.kind)) {
    out += ' ';
    out += n.name;
  }
  for (const auto& a : n.args) {
    out += ' ';
    print_to(out, a);
  }
  out += ')';
}

}  // namespace detail

/// Canonical text; parse(print(f)) == f for every well-sorted f.
inline std::string print(const Formula& fm) {
  std::string out;
  detail::print_to(out, fm);
  return out;
}

inline std::string print(const MaximExpr& m) {
  std::string out;
  detail::print_maxim(out, m);
  return out;
}

// ---------------------------------------------------------------------------
// Free variables

namespace detail {

using Bound = std::vector<std::pair<std::string, Sort>>;

inline bool bound(const Bound& b, const std::string& v) {
  return std::any_of(b.begin(), b.end(), [&](const auto& p) { return p.first == v; });
}

inline void free_vars(const Formula& fm, Bound& b, std::map<std::string, Sort>& out) {
  const Node& n = *fm;
  auto note = [&](const std::string& v, Sort s) {
    if (!bound(b, v)) out.emplace(v, s);
  };
  auto note_subject = [&](const SubjectRef& s) {
    if (s.is_var) note(s.name, Sort::Subject);
  };
  switch (n.kind) {
    case Kind::TermVar: note(n.name, Sort::Term); break;
    case Kind::OpenApply:
      note(n.name, Sort::Open);
      note_subject(n.subject);
      break;
    case Kind::MaximAct:
      note(n.name, Sort::Maxim);
      note_subject(n.subject);
      break;
    case Kind::MaximCirc:
    case Kind::MaximGoal: note(n.name, Sort::Maxim); break;
    case Kind::Apply: note_subject(n.subject); break;
    case Kind::MacroCall:
      note_subject(n.subject);
      if (n.maxim->var) {
        note(*n.maxim->var, Sort::Maxim);
      } else {
        if (n.maxim->act.is_var) note(n.maxim->act.name, Sort::Open);
        free_vars(n.maxim->circumstances, b, out);
        free_vars(n.maxim->goal, b, out);
      }
      break;
    default: break;
  }
  if (is_quantifier(n.kind)) {
    b.emplace_back(n.name, quantifier_sort(n.kind));
    free_vars(n.args[0], b, out);
    b.pop_back();
    return;
  }
  for (const auto& a : n.args) free_vars(a, b, out);
}

}  // namespace detail

/// Free variables of f with their sorts; empty iff f is closed.
inline std::map<std::string, Sort> free_sorts(const Formula& fm) {
  std::map<std::string, Sort> out;
  detail::Bound b;
  detail::free_vars(fm, b, out);
  return out;
}

/// Throws UnboundVariable on the first free variable.
inline void require_closed(const Formula& fm) {
  auto fv = free_sorts(fm);
  if (!fv.empty()) throw UnboundVariable(fv.begin()->first, fv.begin()->second);
}

}  // namespace ddlkant

#endif  // DDLKANT_SYNTAX_HPP
