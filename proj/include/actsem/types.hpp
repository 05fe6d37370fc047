#pragma once

// Base types, type classes, typed values and relation signatures.
//
// Values in traces are always concretely typed (a base type or a product of
// base types). Classes and the wildcard `any` only occur in relation
// signatures, where they act as the search bias for induction.

#include <actsem/error.hpp>
#include <actsem/text.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace actsem {

inline constexpr double kDefaultTolerance = 1e-9;

/// Absolute tolerance used for every numeric equality in the library.
struct Tolerance {
  double abs = kDefaultTolerance;

  bool equal(double a, double b) const { return std::fabs(a - b) <= abs; }
};

enum class BaseType : std::uint8_t { Num, Pos, Dist, Angl, Bool, Obj };
enum class TypeClass : std::uint8_t { Arith, Comp, Spatial, Logic };

inline constexpr std::array<BaseType, 6> kBaseTypes{BaseType::Num,  BaseType::Pos,  BaseType::Dist,
                                                    BaseType::Angl, BaseType::Bool, BaseType::Obj};
inline constexpr std::array<TypeClass, 4> kTypeClasses{TypeClass::Arith, TypeClass::Comp,
                                                       TypeClass::Spatial, TypeClass::Logic};

inline std::string_view to_string(BaseType t) {
  switch (t) {
    case BaseType::Num: return "num";
    case BaseType::Pos: return "pos";
    case BaseType::Dist: return "dist";
    case BaseType::Angl: return "angl";
    case BaseType::Bool: return "bool";
    case BaseType::Obj: return "obj";
  }
  return "?";
}

inline std::string_view to_string(TypeClass c) {
  switch (c) {
    case TypeClass::Arith: return "arith";
    case TypeClass::Comp: return "comp";
    case TypeClass::Spatial: return "spatial";
    case TypeClass::Logic: return "logic";
  }
  return "?";
}

/// Accepts the canonical names plus the spellings found in clause-style
/// traces: `object`, `truthVal` and `angle`.
inline std::optional<BaseType> base_type_from_name(std::string_view name) {
  if (name == "num") return BaseType::Num;
  if (name == "pos") return BaseType::Pos;
  if (name == "dist") return BaseType::Dist;
  if (name == "angl" || name == "angle") return BaseType::Angl;
  if (name == "bool" || name == "truthVal") return BaseType::Bool;
  if (name == "obj" || name == "object") return BaseType::Obj;
  return std::nullopt;
}

inline std::optional<TypeClass> type_class_from_name(std::string_view name) {
  if (name == "arith") return TypeClass::Arith;
  if (name == "comp") return TypeClass::Comp;
  if (name == "spatial") return TypeClass::Spatial;
  if (name == "logic") return TypeClass::Logic;
  return std::nullopt;
}

/// Subsumption table of the four classes.
inline bool class_subsumes(TypeClass c, BaseType t) {
  switch (c) {
    case TypeClass::Arith: return t == BaseType::Num || t == BaseType::Pos || t == BaseType::Dist;
    case TypeClass::Comp: return t == BaseType::Num || t == BaseType::Obj;
    case TypeClass::Spatial:
      return t == BaseType::Pos || t == BaseType::Dist || t == BaseType::Angl || t == BaseType::Obj;
    case TypeClass::Logic: return t == BaseType::Bool || t == BaseType::Obj;
  }
  return false;
}

struct ProductType {
  std::vector<BaseType> parts;
  auto operator<=>(const ProductType&) const = default;
};

struct AnyType {
  auto operator<=>(const AnyType&) const = default;
};

class ValueType {
 public:
  using Repr = std::variant<BaseType, TypeClass, ProductType, AnyType>;

  ValueType() : repr_(BaseType::Num) {}
  ValueType(BaseType t) : repr_(t) {}  // NOLINT: implicit on purpose
  ValueType(TypeClass c) : repr_(c) {}  // NOLINT

  static ValueType product(std::vector<BaseType> parts) {
    if (parts.size() < 2) throw Error(ErrorCode::Range, "a product type needs at least two components");
    ValueType v;
    v.repr_ = ProductType{std::move(parts)};
    return v;
  }

  static ValueType any() {
    ValueType v;
    v.repr_ = AnyType{};
    return v;
  }

  bool is_base() const { return std::holds_alternative<BaseType>(repr_); }
  bool is_class() const { return std::holds_alternative<TypeClass>(repr_); }
  bool is_product() const { return std::holds_alternative<ProductType>(repr_); }
  bool is_any() const { return std::holds_alternative<AnyType>(repr_); }
  bool is_concrete() const { return is_base() || is_product(); }

  BaseType base() const { return std::get<BaseType>(repr_); }
  TypeClass type_class() const { return std::get<TypeClass>(repr_); }
  const std::vector<BaseType>& parts() const { return std::get<ProductType>(repr_).parts; }

  bool operator==(const ValueType&) const = default;
  auto operator<=>(const ValueType& other) const { return repr_ <=> other.repr_; }

 private:
  Repr repr_;
};

inline std::string to_string(const ValueType& t) {
  if (t.is_base()) return std::string(to_string(t.base()));
  if (t.is_class()) return std::string(to_string(t.type_class()));
  if (t.is_any()) return "any";
  std::string out;
  for (BaseType p : t.parts()) {
    if (!out.empty()) out += '*';
    out += to_string(p);
  }
  return out;
}

inline ValueType parse_value_type(std::string_view name) {
  if (name.find('*') != std::string_view::npos) {
    std::vector<BaseType> parts;
    std::size_t start = 0;
    while (true) {
      std::size_t star = name.find('*', start);
      auto piece = name.substr(start, star == std::string_view::npos ? std::string_view::npos : star - start);
      auto base = base_type_from_name(piece);
      if (!base) throw Error(ErrorCode::Parse, "product component is not a base type: '" + std::string(piece) + "'");
      parts.push_back(*base);
      if (star == std::string_view::npos) break;
      start = star + 1;
    }
    return ValueType::product(std::move(parts));
  }
  if (auto b = base_type_from_name(name)) return *b;
  if (auto c = type_class_from_name(name)) return *c;
  if (name == "any") return ValueType::any();
  throw Error(ErrorCode::Parse, "unknown type name '" + std::string(name) + "'");
}

/// True iff a value of type `t` may fill a slot declared as `target`.
inline bool conforms(const ValueType& t, const ValueType& target) {
  if (target.is_any()) return t.is_concrete();
  if (t.is_base()) {
    if (target.is_base()) return t.base() == target.base();
    if (target.is_class()) return class_subsumes(target.type_class(), t.base());
    return false;
  }
  if (t.is_product()) {
    if (!target.is_product() || target.parts().size() != t.parts().size()) return false;
    return std::equal(t.parts().begin(), t.parts().end(), target.parts().begin());
  }
  return t == target;
}

// --- typed values -----------------------------------------------------------

struct Symbol {
  std::string name;
  auto operator<=>(const Symbol&) const = default;
};

using Coord = std::vector<double>;

class TypedValue {
 public:
  using Payload = std::variant<double, Coord, Symbol, std::vector<TypedValue>>;

  TypedValue() : type_(BaseType::Num), payload_(0.0) {}

  static TypedValue num(double x) { return scalar(BaseType::Num, x); }
  static TypedValue dist(double x) { return scalar(BaseType::Dist, x); }
  static TypedValue angl(double x) { return scalar(BaseType::Angl, x); }
  static TypedValue boolean(bool b) { return scalar(BaseType::Bool, b ? 1.0 : 0.0); }

  static TypedValue scalar(BaseType t, double x) {
    if (!std::isfinite(x)) throw Error(ErrorCode::Range, "non-finite " + std::string(to_string(t)) + " value");
    switch (t) {
      case BaseType::Angl:
        if (x < 0.0 || x >= 360.0)
          throw Error(ErrorCode::Range, "angl value " + text::format_number(x) + " outside [0, 360)");
        break;
      case BaseType::Bool:
        if (x != 0.0 && x != 1.0) throw Error(ErrorCode::Range, "bool value must be 0 or 1");
        break;
      case BaseType::Num:
      case BaseType::Dist: break;
      default: throw Error(ErrorCode::Range, std::string(to_string(t)) + " is not a scalar type");
    }
    TypedValue v;
    v.type_ = t;
    v.payload_ = x;
    return v;
  }

  static TypedValue pos(Coord c) {
    if (c.size() != 2 && c.size() != 3) throw Error(ErrorCode::Range, "pos needs 2 or 3 coordinates");
    for (double x : c)
      if (!std::isfinite(x)) throw Error(ErrorCode::Range, "non-finite pos coordinate");
    TypedValue v;
    v.type_ = BaseType::Pos;
    v.payload_ = std::move(c);
    return v;
  }

  static TypedValue obj(std::string name) {
    if (!text::is_identifier(name)) throw Error(ErrorCode::Range, "obj symbol '" + name + "' is not an identifier");
    TypedValue v;
    v.type_ = BaseType::Obj;
    v.payload_ = Symbol{std::move(name)};
    return v;
  }

  static TypedValue product(std::vector<TypedValue> parts) {
    std::vector<BaseType> types;
    for (const auto& p : parts) {
      if (!p.type().is_base()) throw Error(ErrorCode::Range, "product components must be base-typed");
      types.push_back(p.type().base());
    }
    TypedValue v;
    v.type_ = ValueType::product(std::move(types));
    v.payload_ = std::move(parts);
    return v;
  }

  const ValueType& type() const { return type_; }
  const Payload& payload() const { return payload_; }

  bool is_scalar() const { return std::holds_alternative<double>(payload_); }
  double scalar() const { return std::get<double>(payload_); }
  const Coord& coords() const { return std::get<Coord>(payload_); }
  const std::string& symbol() const { return std::get<Symbol>(payload_).name; }
  const std::vector<TypedValue>& parts() const { return std::get<std::vector<TypedValue>>(payload_); }

  /// Exact structural equality (bit-exact payloads).
  bool operator==(const TypedValue& other) const {
    return type_ == other.type_ && payload_ == other.payload_;
  }

 private:
  ValueType type_;
  Payload payload_;
};

/// Same type and componentwise equal payloads; numbers compare under `tol`,
/// symbols compare exactly.
inline bool approx_equal(const TypedValue& a, const TypedValue& b, const Tolerance& tol) {
  if (a.type() != b.type()) return false;
  return std::visit(
      [&](const auto& pa) -> bool {
        using P = std::decay_t<decltype(pa)>;
        const auto& pb = std::get<P>(b.payload());
        if constexpr (std::is_same_v<P, double>) {
          return tol.equal(pa, pb);
        } else if constexpr (std::is_same_v<P, Coord>) {
          if (pa.size() != pb.size()) return false;
          for (std::size_t i = 0; i < pa.size(); ++i)
            if (!tol.equal(pa[i], pb[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<P, Symbol>) {
          return pa == pb;
        } else {
          if (pa.size() != pb.size()) return false;
          for (std::size_t i = 0; i < pa.size(); ++i)
            if (!approx_equal(pa[i], pb[i], tol)) return false;
          return true;
        }
      },
      a.payload());
}

/// Visits every pos payload inside `v` (including product components).
template <typename Fn>
void for_each_pos(const TypedValue& v, Fn&& fn) {
  if (v.type().is_base() && v.type().base() == BaseType::Pos) {
    fn(v.coords());
  } else if (v.type().is_product()) {
    for (const auto& p : v.parts()) for_each_pos(p, fn);
  }
}

// --- textual form -----------------------------------------------------------

namespace detail {

inline std::string format_payload(const TypedValue& v) {
  if (v.type().is_product()) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.parts().size(); ++i) {
      if (i) out += ';';
      out += format_payload(v.parts()[i]);
    }
    return out + ")";
  }
  switch (v.type().base()) {
    case BaseType::Pos: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.coords().size(); ++i) {
        if (i) out += ',';
        out += text::format_number(v.coords()[i]);
      }
      return out + "]";
    }
    case BaseType::Obj: return v.symbol();
    default: return text::format_number(v.scalar());
  }
}

inline double read_number(text::Cursor& cur) {
  auto tok = text::trim(cur.until_any(",;)] \t"));
  auto x = text::parse_number(tok);
  if (!x) cur.fail("malformed number '" + std::string(tok) + "'");
  return *x;
}

inline TypedValue read_payload(text::Cursor& cur, BaseType t) {
  switch (t) {
    case BaseType::Pos: {
      cur.expect('[');
      Coord c;
      do {
        cur.skip_space();
        c.push_back(read_number(cur));
        cur.skip_space();
      } while (cur.consume(','));
      if (!cur.consume(']')) cur.fail("malformed tuple");
      if (c.size() != 2 && c.size() != 3) throw Error(ErrorCode::Range, "pos needs 2 or 3 coordinates", cur.line());
      return TypedValue::pos(std::move(c));
    }
    case BaseType::Obj: return TypedValue::obj(std::string(cur.identifier()));
    default: {
      double x = read_number(cur);
      try {
        return TypedValue::scalar(t, x);
      } catch (const Error& e) {
        throw Error(e.code(), e.what(), cur.line());
      }
    }
  }
}

inline TypedValue read_payload(text::Cursor& cur, const ValueType& t) {
  if (t.is_base()) return read_payload(cur, t.base());
  if (!t.is_product()) cur.fail("values cannot have class type '" + to_string(t) + "'");
  cur.expect('(');
  std::vector<TypedValue> parts;
  for (std::size_t i = 0; i < t.parts().size(); ++i) {
    if (i) cur.expect(';');
    parts.push_back(read_payload(cur, t.parts()[i]));
  }
  cur.expect(')');
  return TypedValue::product(std::move(parts));
}

}  // namespace detail

/// `T:payload`, e.g. `num:5`, `pos:[9,14]`, `obj*pos:(obst;[13,3])`.
inline std::string format_typed_value(const TypedValue& v) {
  return to_string(v.type()) + ":" + detail::format_payload(v);
}

/// Reads one typed value at the cursor; stops after the payload.
inline TypedValue read_typed_value(text::Cursor& cur) {
  auto name = cur.until_any(":");
  if (!cur.consume(':')) cur.fail("expected 'type:payload'");
  ValueType t;
  try {
    t = parse_value_type(name);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), cur.line());
  }
  if (!t.is_concrete()) cur.fail("values cannot have class type '" + to_string(t) + "'");
  return detail::read_payload(cur, t);
}

inline TypedValue parse_typed_value(std::string_view src) {
  text::Cursor cur(text::trim(src));
  TypedValue v = read_typed_value(cur);
  if (!cur.done()) cur.fail("trailing characters");
  return v;
}

// --- relation signatures ----------------------------------------------------

/// Ternary signatures read (before, parameter, after); binary ones are
/// predicates over (before, after).
struct RelationSignature {
  std::string name;
  std::vector<ValueType> arg_types;

  bool is_predicate() const { return arg_types.size() == 2; }
  bool operator==(const RelationSignature&) const = default;
};

/// `pos*dist->pos` for ternary, `pos,pos` for binary signatures.
inline std::string format_signature_types(const RelationSignature& sig) {
  if (sig.is_predicate()) return to_string(sig.arg_types[0]) + "," + to_string(sig.arg_types[1]);
  std::string out;
  for (std::size_t i = 0; i + 1 < sig.arg_types.size(); ++i) {
    if (i) out += ' ';
    out += to_string(sig.arg_types[i]);
    out += (i + 2 < sig.arg_types.size()) ? " x" : "";
  }
  return out + " -> " + to_string(sig.arg_types.back());
}

inline std::vector<ValueType> parse_signature_types(std::string_view src) {
  std::vector<ValueType> out;
  auto s = text::trim(src);
  auto arrow = s.find("->");
  auto split = [&](std::string_view part, std::string_view sep) {
    std::size_t start = 0;
    while (true) {
      auto at = part.find(sep, start);
      auto piece = text::trim(part.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
      out.push_back(parse_value_type(piece));
      if (at == std::string_view::npos) break;
      start = at + sep.size();
    }
  };
  if (arrow == std::string_view::npos) {
    split(s, ",");
  } else {
    split(text::trim(s.substr(0, arrow)), " x ");
    out.push_back(parse_value_type(text::trim(s.substr(arrow + 2))));
  }
  if (out.size() != 2 && out.size() != 3)
    throw Error(ErrorCode::Parse, "signature must have arity 2 or 3: '" + std::string(src) + "'");
  return out;
}

/// Search-bias test: can `sig` consume a triplet typed (before, parameter,
/// after)? Binary predicates ignore the parameter slot.
inline bool signature_match(const RelationSignature& sig, std::span<const ValueType> triplet_types) {
  if (triplet_types.size() != 3) return false;
  if (sig.arg_types.size() == 3) {
    for (std::size_t i = 0; i < 3; ++i)
      if (!conforms(triplet_types[i], sig.arg_types[i])) return false;
    return true;
  }
  if (sig.arg_types.size() == 2)
    return conforms(triplet_types[0], sig.arg_types[0]) && conforms(triplet_types[2], sig.arg_types[1]);
  return false;
}

}  // namespace actsem
