#pragma once

// Theory documents (JSON) and the human-readable report.

#include <actsem/clause.hpp>
#include <actsem/error.hpp>
#include <actsem/induction.hpp>
#include <actsem/version.hpp>

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace actsem {

struct TheoryDocument {
  std::string tool_version{kVersion};
  std::uint64_t seed = 0;
  double tolerance = kDefaultTolerance;
  std::size_t pos_dimension = 2;
  std::string source;
  std::map<std::string, ActionTheory> theories;
};

inline nlohmann::ordered_json theory_to_json(const ActionTheory& th) {
  nlohmann::ordered_json j;
  j["action"] = th.action;
  auto params = nlohmann::ordered_json::array();
  for (const auto& p : th.param_types) params.push_back(to_string(p));
  j["params"] = params;
  auto vars = nlohmann::ordered_json::object();
  for (const auto& [var, set] : th.candidates) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& [key, info] : set) {
      nlohmann::ordered_json c;
      c["relation"] = key.relation;
      c["signature"] = format_signature_types(info.signature);
      c["param"] = key.param_index;
      auto consts = nlohmann::ordered_json::object();
      for (const auto& [name, value] : info.constants) {
        if (const double* d = std::get_if<double>(&value)) consts[name] = *d;
        else consts[name] = std::get<std::string>(value);
      }
      c["constants"] = consts;
      list.push_back(c);
    }
    vars[var] = list;
  }
  j["candidates"] = vars;
  return j;
}

inline ActionTheory theory_from_json(const nlohmann::json& j) {
  ActionTheory th;
  th.action = j.at("action").get<std::string>();
  for (const auto& p : j.at("params")) th.param_types.push_back(parse_value_type(p.get<std::string>()));
  for (const auto& [var, list] : j.at("candidates").items()) {
    auto& set = th.candidates[var];
    for (const auto& c : list) {
      CandidateKey key{c.at("relation").get<std::string>(), c.at("param").get<std::size_t>()};
      CandidateInfo info;
      info.signature.name = key.relation;
      info.signature.arg_types = parse_signature_types(c.at("signature").get<std::string>());
      for (const auto& [name, value] : c.at("constants").items()) {
        if (value.is_number()) info.constants[name] = value.get<double>();
        else info.constants[name] = value.get<std::string>();
      }
      set.emplace(std::move(key), std::move(info));
    }
  }
  return th;
}

inline std::string write_theory_document(const TheoryDocument& doc) {
  nlohmann::ordered_json j;
  j["header"] = {{"format", "actsem-theory"},
                 {"tool_version", doc.tool_version},
                 {"seed", doc.seed},
                 {"tolerance", doc.tolerance},
                 {"pos_dimension", doc.pos_dimension},
                 {"source", doc.source}};
  auto list = nlohmann::ordered_json::array();
  for (const auto& [name, th] : doc.theories) list.push_back(theory_to_json(th));
  j["theories"] = list;
  return j.dump(2) + "\n";
}

inline TheoryDocument read_theory_document(const std::string& src) {
  try {
    auto j = nlohmann::json::parse(src);
    const auto& h = j.at("header");
    if (h.at("format").get<std::string>() != "actsem-theory")
      throw Error(ErrorCode::Parse, "not an actsem theory document");
    TheoryDocument doc;
    doc.tool_version = h.at("tool_version").get<std::string>();
    doc.seed = h.at("seed").get<std::uint64_t>();
    doc.tolerance = h.at("tolerance").get<double>();
    doc.pos_dimension = h.value("pos_dimension", std::size_t{2});
    doc.source = h.value("source", std::string{});
    for (const auto& t : j.at("theories")) {
      ActionTheory th = theory_from_json(t);
      doc.theories.emplace(th.action, std::move(th));
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("invalid theory document: ") + e.what());
  }
}

/// Stable report: variables and relations in lexicographic order, each with
/// its argument pattern, signature and constant witnesses.
inline std::string explain_theory(const ActionTheory& th, std::size_t pos_dimension = 2) {
  auto names = clause::parameter_names(th.param_types);
  std::string out = "action " + th.action + "(";
  for (std::size_t i = 0; i < th.param_types.size(); ++i) {
    if (i) out += ", ";
    out += names[i] + ":" + to_string(th.param_types[i]);
  }
  out += ")\n";
  if (th.candidate_count() == 0) return out + "  no surviving candidates\n";
  for (const auto& [var, set] : th.candidates) {
    if (set.empty()) continue;
    out += "  " + var + "\n";
    for (const auto& [key, info] : set) {
      out += "    " + clause::candidate_pattern(key, info, th.param_types, pos_dimension);
      out += "  {" + format_signature_types(info.signature) + "}";
      if (!info.signature.is_predicate()) out += "  param " + std::to_string(key.param_index);
      for (const auto& [cname, cval] : info.constants) out += "  " + cname + "=" + format_constant(cval);
      out += "\n";
    }
  }
  return out;
}

}  // namespace actsem
