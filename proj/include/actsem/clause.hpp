#pragma once

// Reader and writer for the Prolog-style clause dialect:
//
//   state_spec(31, [[r_pos, [9,14]:pos], [obj_grab, [none]:obj, 0:truthVal]]).
//   action(move_forward, 32, [3:dist]).
//   action_theory(move_forward, [D:dist], relation_is([[r_pos, [...]]])).
//
// Only the subset of Prolog term syntax these facts need is supported:
// atoms, quoted atoms, variables, numbers, lists, compound terms and the
// infix operators `:` and `=`. `%` starts a comment.

#include <actsem/error.hpp>
#include <actsem/induction.hpp>
#include <actsem/text.hpp>
#include <actsem/trace.hpp>
#include <actsem/types.hpp>

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace actsem::clause {

struct Term {
  enum class Kind { Atom, Var, Number, List, Compound };

  Kind kind = Kind::Atom;
  std::string name;  // atom text, variable name or functor
  double number = 0.0;
  std::vector<Term> args;  // list elements or compound arguments
  std::size_t line = 0;

  bool is_atom() const { return kind == Kind::Atom; }
  bool is(std::string_view functor, std::size_t arity) const {
    return kind == Kind::Compound && name == functor && args.size() == arity;
  }
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  /// Next clause (terminated by '.'), or false at end of input.
  bool next(Term& out) {
    skip();
    if (pos_ >= src_.size()) return false;
    out = term();
    skip();
    if (!eat('.')) fail("expected '.' after clause");
    return true;
  }

 private:
  Term term() {
    Term lhs = typed();
    skip();
    if (peek() == '=') {
      ++pos_;
      Term rhs = typed();
      return op("=", std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Term typed() {
    Term lhs = primary();
    skip();
    while (peek() == ':') {
      ++pos_;
      Term rhs = primary();
      lhs = op(":", std::move(lhs), std::move(rhs));
      skip();
    }
    return lhs;
  }

  Term op(const char* name, Term lhs, Term rhs) {
    Term t;
    t.kind = Term::Kind::Compound;
    t.name = name;
    t.line = lhs.line;
    t.args.push_back(std::move(lhs));
    t.args.push_back(std::move(rhs));
    return t;
  }

  Term primary() {
    skip();
    Term t;
    t.line = line_;
    char c = peek();
    if (c == '[') {
      ++pos_;
      t.kind = Term::Kind::List;
      skip();
      if (!eat(']')) {
        t.args = arguments();
        if (!eat(']')) fail("expected ']'");
      }
      return t;
    }
    if (c == '(') {
      ++pos_;
      Term inner = term();
      skip();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '+') {
      std::size_t start = pos_++;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) != 0 || src_[pos_] == '.' ||
                                    ((src_[pos_] == '-' || src_[pos_] == '+') &&
                                     (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
        // a '.' not followed by a digit ends the clause
        if (src_[pos_] == '.' &&
            (pos_ + 1 >= src_.size() || std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) == 0))
          break;
        ++pos_;
      }
      auto x = text::parse_number(src_.substr(start, pos_ - start));
      if (!x) fail("malformed number");
      t.kind = Term::Kind::Number;
      t.number = *x;
      return t;
    }
    if (c == '\'') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '\'') ++pos_;
      if (pos_ >= src_.size()) fail("unterminated quoted atom");
      t.name = std::string(src_.substr(start, pos_ - start));
      ++pos_;
    } else if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) != 0 || src_[pos_] == '_'))
        ++pos_;
      t.name = std::string(src_.substr(start, pos_ - start));
      if (std::isupper(static_cast<unsigned char>(c)) != 0 || c == '_') {
        t.kind = Term::Kind::Var;
        return t;
      }
    } else {
      fail("unexpected character");
    }
    t.kind = Term::Kind::Atom;
    if (peek() == '(') {
      ++pos_;
      t.kind = Term::Kind::Compound;
      t.args = arguments();
      skip();
      if (!eat(')')) fail("expected ')'");
    }
    return t;
  }

  std::vector<Term> arguments() {
    std::vector<Term> out;
    do {
      out.push_back(term());
      skip();
    } while (eat(','));
    return out;
  }

  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::Parse, what + " near '" + std::string(src_.substr(pos_, 24)) + "'", line_);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline std::vector<Term> parse_clauses(std::string_view src) {
  Parser p(src);
  std::vector<Term> out;
  Term t;
  while (p.next(t)) out.push_back(std::move(t));
  return out;
}

// --- values -----------------------------------------------------------------

namespace detail {

[[noreturn]] inline void bad(const Term& t, const std::string& what) { throw Error(ErrorCode::Parse, what, t.line); }

inline std::string atom_text(const Term& t) {
  if (t.kind == Term::Kind::Atom) return t.name;
  // `[none]` is how symbols are written inside typed values
  if (t.kind == Term::Kind::List && t.args.size() == 1 && t.args[0].is_atom()) return t.args[0].name;
  bad(t, "expected an atom");
}

inline double number_of(const Term& t) {
  if (t.kind != Term::Kind::Number) bad(t, "expected a number");
  return t.number;
}

/// `Payload:type`, types written postfix.
inline TypedValue typed_value(const Term& t) {
  if (!t.is(":", 2)) bad(t, "expected 'value:type'");
  const Term& payload = t.args[0];
  auto base = base_type_from_name(atom_text(t.args[1]));
  if (!base) bad(t, "unknown type '" + atom_text(t.args[1]) + "'");
  try {
    switch (*base) {
      case BaseType::Pos: {
        if (payload.kind != Term::Kind::List) bad(payload, "pos payload must be a list");
        Coord c;
        for (const auto& e : payload.args) c.push_back(number_of(e));
        return TypedValue::pos(std::move(c));
      }
      case BaseType::Obj: return TypedValue::obj(atom_text(payload));
      default: return TypedValue::scalar(*base, number_of(payload));
    }
  } catch (const Error& e) {
    if (e.line() != 0) throw;
    throw Error(e.code(), e.what(), t.line);
  }
}

inline Term atom(std::string name) {
  Term t;
  t.name = std::move(name);
  return t;
}

}  // namespace detail

inline std::string format_value_clause(const TypedValue& v) {
  std::string type_name(to_string(v.type().base()));
  switch (v.type().base()) {
    case BaseType::Pos: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.coords().size(); ++i) {
        if (i) out += ", ";
        out += text::format_number(v.coords()[i]);
      }
      return out + "]:" + type_name;
    }
    case BaseType::Obj: return "[" + v.symbol() + "]:" + type_name;
    default: return text::format_number(v.scalar()) + ":" + type_name;
  }
}

// --- traces -----------------------------------------------------------------

/// Imports `state_spec/2` and `action/3` facts. A variable listed with
/// several value parts becomes a product-typed binding.
inline Sample import_trace(std::string_view src) {
  std::vector<StateSnapshot> snaps;
  std::vector<ActionRecord> actions;
  std::vector<std::size_t> snap_lines, action_lines;
  for (const Term& c : parse_clauses(src)) {
    if (c.is("state_spec", 2) || c.is("state", 2)) {
      StateSnapshot s;
      s.t = static_cast<Timestamp>(detail::number_of(c.args[0]));
      if (c.args[1].kind != Term::Kind::List) detail::bad(c, "state_spec expects a variable list");
      for (const Term& var : c.args[1].args) {
        if (var.kind != Term::Kind::List || var.args.size() < 2) detail::bad(var, "expected [name, value...]");
        Binding b;
        b.name = detail::atom_text(var.args[0]);
        std::vector<TypedValue> parts;
        for (std::size_t i = 1; i < var.args.size(); ++i) parts.push_back(detail::typed_value(var.args[i]));
        b.value = parts.size() == 1 ? parts.front() : TypedValue::product(std::move(parts));
        s.bindings.push_back(std::move(b));
      }
      snaps.push_back(std::move(s));
      snap_lines.push_back(c.line);
    } else if (c.is("action", 3)) {
      ActionRecord a;
      a.name = detail::atom_text(c.args[0]);
      a.t = static_cast<Timestamp>(detail::number_of(c.args[1]));
      if (c.args[2].kind != Term::Kind::List) detail::bad(c, "action expects a parameter list");
      for (const Term& p : c.args[2].args) a.parameters.push_back(detail::typed_value(p));
      actions.push_back(std::move(a));
      action_lines.push_back(c.line);
    } else {
      detail::bad(c, "unknown fact '" + c.name + "'");
    }
  }
  if (snaps.empty() && actions.empty()) throw Error(ErrorCode::Empty, "trace contains no records");
  return Sample::make(std::move(snaps), std::move(actions), snap_lines, action_lines);
}

inline std::string export_trace(const Sample& sample) {
  std::string out;
  auto write_state = [&](const StateSnapshot& s) {
    out += "state_spec(" + std::to_string(s.t) + ", [";
    for (std::size_t i = 0; i < s.bindings.size(); ++i) {
      const auto& b = s.bindings[i];
      out += i ? ",\n    [" : "\n    [";
      out += b.name;
      if (b.value.type().is_product()) {
        for (const auto& p : b.value.parts()) out += ", " + format_value_clause(p);
      } else {
        out += ", " + format_value_clause(b.value);
      }
      out += "]";
    }
    out += "]).\n";
  };
  auto write_action = [&](const ActionRecord& a) {
    out += "action(" + a.name + ", " + std::to_string(a.t) + ", [";
    for (std::size_t i = 0; i < a.parameters.size(); ++i) {
      if (i) out += ", ";
      out += format_value_clause(a.parameters[i]);
    }
    out += "]).\n";
  };
  auto s = sample.snapshots().begin();
  auto a = sample.actions().begin();
  while (s != sample.snapshots().end() || a != sample.actions().end()) {
    if (a == sample.actions().end() || (s != sample.snapshots().end() && s->t < a->t)) write_state(*s++);
    else write_action(*a++);
  }
  return out;
}

// --- theories ---------------------------------------------------------------

/// Variable names used when rendering argument patterns.
inline std::string type_letter(const ValueType& t) {
  if (!t.is_base()) return "V";
  switch (t.base()) {
    case BaseType::Num: return "N";
    case BaseType::Pos: return "P";
    case BaseType::Dist: return "D";
    case BaseType::Angl: return "G";
    case BaseType::Bool: return "B";
    case BaseType::Obj: return "O";
  }
  return "V";
}

inline std::string type_label(const ValueType& t) {
  std::string s = to_string(t);
  return t.is_product() ? "'" + s + "'" : s;
}

inline std::vector<std::string> parameter_names(const std::vector<ValueType>& params) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < params.size(); ++i)
    out.push_back(type_letter(params[i]) + (params.size() > 1 ? std::to_string(i) : ""));
  return out;
}

/// `[X1,Y1]:pos`, `D:dist`, ... for the before (suffix 1) and after (suffix
/// 2) slots.
inline std::string slot_pattern(const ValueType& t, int suffix, std::size_t pos_dimension) {
  if (t.is_base() && t.base() == BaseType::Pos) {
    static constexpr std::array<const char*, 3> axes{"X", "Y", "Z"};
    std::string out = "[";
    for (std::size_t i = 0; i < pos_dimension && i < axes.size(); ++i) {
      if (i) out += ',';
      out += axes[i] + std::to_string(suffix);
    }
    return out + "]:pos";
  }
  return type_letter(t) + std::to_string(suffix) + ":" + type_label(t);
}

inline std::string candidate_pattern(const CandidateKey& key, const CandidateInfo& info,
                                     const std::vector<ValueType>& param_types, std::size_t pos_dimension) {
  const auto& types = info.signature.arg_types;
  std::string out = key.relation + "(" + slot_pattern(types.front(), 1, pos_dimension) + ", ";
  if (!info.signature.is_predicate()) {
    auto names = parameter_names(param_types);
    std::string pname = key.param_index < names.size() ? names[key.param_index] : "A";
    out += pname + ":" + type_label(types[1]) + ", ";
  }
  return out + slot_pattern(types.back(), 2, pos_dimension) + ")";
}

inline std::string export_theory(const ActionTheory& th, std::size_t pos_dimension = 2) {
  auto names = parameter_names(th.param_types);
  std::string out = "action_theory(\n    " + th.action + ",\n    [";
  for (std::size_t i = 0; i < th.param_types.size(); ++i) {
    if (i) out += ", ";
    out += names[i] + ":" + type_label(th.param_types[i]);
  }
  out += "],\n    relation_is([";
  bool first_var = true;
  for (const auto& [var, set] : th.candidates) {
    out += first_var ? "\n      [" : ",\n      [";
    first_var = false;
    out += var + ", [";
    bool first = true;
    for (const auto& [key, info] : set) {
      out += first ? "\n        " : ",\n        ";
      first = false;
      std::string pat = candidate_pattern(key, info, th.param_types, pos_dimension);
      pat.pop_back();  // reopen to append the witness term
      out += pat + ", with(" + std::to_string(key.param_index) + ", [";
      bool first_c = true;
      for (const auto& [cname, cval] : info.constants) {
        if (!first_c) out += ", ";
        first_c = false;
        out += "'" + cname + "'=";
        out += std::holds_alternative<double>(cval) ? format_constant(cval) : "'" + format_constant(cval) + "'";
      }
      out += "]))";
    }
    out += "]]";
  }
  return out + "])).\n";
}

inline ValueType pattern_type(const Term& t) {
  if (!t.is(":", 2)) detail::bad(t, "expected 'pattern:type'");
  try {
    return parse_value_type(detail::atom_text(t.args[1]));
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), t.line);
  }
}

/// Reads `action_theory/3` facts written by `export_theory`.
inline std::vector<ActionTheory> import_theories(std::string_view src) {
  std::vector<ActionTheory> out;
  for (const Term& c : parse_clauses(src)) {
    if (!c.is("action_theory", 3)) detail::bad(c, "expected action_theory/3");
    ActionTheory th;
    const Term& name = c.args[0];
    th.action = name.is("theory", 1) ? detail::atom_text(name.args[0]) : detail::atom_text(name);
    if (c.args[1].kind != Term::Kind::List) detail::bad(c, "expected a parameter list");
    for (const Term& p : c.args[1].args) th.param_types.push_back(pattern_type(p));
    const Term& rel = c.args[2];
    if (!rel.is("relation_is", 1) || rel.args[0].kind != Term::Kind::List) detail::bad(rel, "expected relation_is([...])");
    for (const Term& entry : rel.args[0].args) {
      if (entry.kind != Term::Kind::List || entry.args.size() != 2 || entry.args[1].kind != Term::Kind::List)
        detail::bad(entry, "expected [variable, [relations...]]");
      auto& set = th.candidates[detail::atom_text(entry.args[0])];
      for (const Term& cand : entry.args[1].args) {
        if (cand.kind != Term::Kind::Compound || cand.args.size() < 3) detail::bad(cand, "expected a relation term");
        const Term& with = cand.args.back();
        if (!with.is("with", 2) || with.args[1].kind != Term::Kind::List) detail::bad(cand, "missing with(...) witness");
        CandidateKey key{cand.name, static_cast<std::size_t>(detail::number_of(with.args[0]))};
        CandidateInfo info;
        info.signature.name = cand.name;
        for (std::size_t i = 0; i + 1 < cand.args.size(); ++i)
          info.signature.arg_types.push_back(pattern_type(cand.args[i]));
        for (const Term& kv : with.args[1].args) {
          if (!kv.is("=", 2)) detail::bad(kv, "expected 'Name'=Value");
          const Term& v = kv.args[1];
          info.constants[detail::atom_text(kv.args[0])] =
              v.kind == Term::Kind::Number ? ConstantValue{v.number} : ConstantValue{detail::atom_text(v)};
        }
        set.emplace(std::move(key), std::move(info));
      }
    }
    out.push_back(std::move(th));
  }
  return out;
}

}  // namespace actsem::clause
