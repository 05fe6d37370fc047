#pragma once

// The learning pipeline: effect sets, transition groups, theory induction by
// exhaustive typed scanning, and refinement by intersection.

#include <actsem/error.hpp>
#include <actsem/relations.hpp>
#include <actsem/trace.hpp>
#include <actsem/types.hpp>

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace actsem {

struct LearnOptions {
  Tolerance tol{};
  /// Also explain the no-effect set (relations that preserve a value).
  bool learn_preservation = false;
  /// Skip occurrences whose effect set is empty (failed actions).
  bool assume_success = true;
  bool include_internal = false;
  std::string heading_var = "r_dir";
  std::string position_var = "r_pos";
  bool keep_history = false;
};

struct EffectSet {
  Timestamp t = 0;
  std::set<std::string> effects;
  std::set<std::string> non_effects;
};

/// Partitions the observable variables of `prev` into changed and unchanged.
/// Internal variables are ignored unless `include_internal` is set.
inline EffectSet effect_set(const StateSnapshot& prev, const StateSnapshot& next, const Tolerance& tol = {},
                            bool include_internal = false) {
  if (prev.bindings.size() != next.bindings.size())
    throw Error(ErrorCode::Schema, "snapshots bind different variable sets");
  EffectSet out;
  out.t = (prev.t + next.t) / 2;
  for (const auto& b : prev.bindings) {
    const Binding* other = next.find(b.name);
    if (other == nullptr || other->value.type() != b.value.type())
      throw Error(ErrorCode::Schema, "variable '" + b.name + "' missing or retyped in the next snapshot");
    if (b.internal && !include_internal) continue;
    (approx_equal(b.value, other->value, tol) ? out.non_effects : out.effects).insert(b.name);
  }
  return out;
}

struct TransitionTriplet {
  std::string variable;
  TypedValue before;
  TypedValue parameter;
  std::size_t param_index = 0;
  TypedValue after;

  std::array<ValueType, 3> types() const { return {before.type(), parameter.type(), after.type()}; }
};

struct TransitionGroup {
  std::string action;
  Timestamp t = 0;
  std::vector<TypedValue> parameters;
  /// One triplet per (effect variable, parameter) pair.
  std::vector<TransitionTriplet> triplets;
  /// Same shape over the no-effect set; only filled when preservation
  /// learning is requested.
  std::vector<TransitionTriplet> preserved;
};

namespace detail {

inline std::vector<TransitionTriplet> triplets_for(const std::set<std::string>& vars, const StateSnapshot& prev,
                                                   const StateSnapshot& next, const ActionRecord& action) {
  std::vector<TransitionTriplet> out;
  out.reserve(vars.size() * action.parameters.size());
  for (const auto& var : vars) {
    const TypedValue* before = prev.value(var);
    const TypedValue* after = next.value(var);
    if (before == nullptr || after == nullptr)
      throw Error(ErrorCode::Schema, "variable '" + var + "' not bound by both snapshots");
    for (std::size_t i = 0; i < action.parameters.size(); ++i)
      out.push_back({var, *before, action.parameters[i], i, *after});
  }
  return out;
}

}  // namespace detail

inline TransitionGroup transition_group(const EffectSet& eff, const StateSnapshot& prev, const StateSnapshot& next,
                                        const ActionRecord& action, bool with_preserved = false) {
  TransitionGroup g;
  g.action = action.name;
  g.t = action.t;
  g.parameters = action.parameters;
  g.triplets = detail::triplets_for(eff.effects, prev, next, action);
  if (with_preserved) g.preserved = detail::triplets_for(eff.non_effects, prev, next, action);
  return g;
}

// --- theories ---------------------------------------------------------------

/// Identity of a candidate within one variable's candidate set. The clause
/// index is fixed by the variable's type, so it never distinguishes two
/// candidates on its own.
struct CandidateKey {
  std::string relation;
  std::size_t param_index = 0;

  auto operator<=>(const CandidateKey&) const = default;
};

struct CandidateInfo {
  RelationSignature signature;
  ConstantBinding constants;
};

using CandidateSet = std::map<CandidateKey, CandidateInfo>;

struct ActionTheory {
  std::string action;
  std::vector<ValueType> param_types;
  std::map<std::string, CandidateSet> candidates;

  std::size_t candidate_count() const {
    std::size_t n = 0;
    for (const auto& [var, set] : candidates) n += set.size();
    return n;
  }
};

inline bool theories_equal(const ActionTheory& a, const ActionTheory& b, const Tolerance& tol = {}) {
  if (a.action != b.action || a.param_types != b.param_types || a.candidates.size() != b.candidates.size())
    return false;
  for (auto ia = a.candidates.begin(), ib = b.candidates.begin(); ia != a.candidates.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.size() != ib->second.size()) return false;
    for (auto ca = ia->second.begin(), cb = ib->second.begin(); ca != ia->second.end(); ++ca, ++cb) {
      if (!(ca->first == cb->first) || !(ca->second.signature == cb->second.signature)) return false;
      if (!constants_compatible(ca->second.constants, cb->second.constants, tol)) return false;
    }
  }
  return true;
}

inline std::vector<ValueType> parameter_types(const std::vector<TypedValue>& params) {
  std::vector<ValueType> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.type());
  return out;
}

namespace detail {

inline void scan_triplets(const std::vector<TransitionTriplet>& triplets, const RelationLibrary& lib,
                          const EvaluationContext& ctx, ActionTheory& th) {
  for (const auto& tr : triplets) {
    auto& slot = th.candidates[tr.variable];
    const auto types = tr.types();
    for (const auto& rel : lib) {
      const RelationClause* clause = rel.clause_for(types);
      if (clause == nullptr) continue;
      Verdict v = evaluate_relation(rel, tr.before, tr.parameter, tr.after, ctx);
      if (v.accepted) slot.emplace(CandidateKey{rel.name, tr.param_index}, CandidateInfo{clause->signature, v.binding});
    }
  }
}

}  // namespace detail

/// Every (triplet, relation) pair whose signature matches and whose body is
/// provable becomes a candidate under the triplet's variable. Variables
/// without any candidate keep an empty entry.
inline ActionTheory induce_theory(const TransitionGroup& group, const RelationLibrary& lib,
                                  const EvaluationContext& ctx) {
  ActionTheory th;
  th.action = group.action;
  th.param_types = parameter_types(group.parameters);
  detail::scan_triplets(group.triplets, lib, ctx, th);
  detail::scan_triplets(group.preserved, lib, ctx, th);
  return th;
}

/// Strict intersection. A candidate survives when both sides hold it with
/// constants equal under `tol`; the older witness is kept. Variables missing
/// from either side are dropped.
inline ActionTheory refine_theory(const ActionTheory& old_th, const ActionTheory& new_th, const Tolerance& tol = {}) {
  if (old_th.action != new_th.action)
    throw Error(ErrorCode::Mismatch, "cannot refine theory of '" + old_th.action + "' with '" + new_th.action + "'");
  if (old_th.param_types != new_th.param_types)
    throw Error(ErrorCode::Mismatch, "parameter signatures of '" + old_th.action + "' differ");
  ActionTheory out;
  out.action = old_th.action;
  out.param_types = old_th.param_types;
  for (const auto& [var, old_set] : old_th.candidates) {
    auto it = new_th.candidates.find(var);
    if (it == new_th.candidates.end()) continue;
    CandidateSet kept;
    for (const auto& [key, info] : old_set) {
      auto match = it->second.find(key);
      if (match != it->second.end() && constants_compatible(info.constants, match->second.constants, tol))
        kept.emplace(key, info);
    }
    out.candidates.emplace(var, std::move(kept));
  }
  return out;
}

// --- learning sessions ------------------------------------------------------

struct RefinementStep {
  Timestamp t = 0;
  ActionTheory induced;
  ActionTheory refined;
};

struct TheoryStore {
  std::map<std::string, ActionTheory> current;
  /// Per action, one entry per processed occurrence (only with keep_history).
  std::map<std::string, std::vector<RefinementStep>> history;
  std::size_t occurrences_skipped = 0;

  const ActionTheory* find(std::string_view action) const {
    auto it = current.find(std::string(action));
    return it == current.end() ? nullptr : &it->second;
  }
};

using StepObserver = std::function<void(const ActionRecord&, const ActionTheory&)>;

inline TheoryStore learn_from_trace(const Sample& sample, const RelationLibrary& lib, const LearnOptions& opts = {},
                                    const StepObserver& observer = {}) {
  if (lib.empty()) throw Error(ErrorCode::Empty, "background knowledge library is empty");
  TheoryStore store;
  for (const auto& action : sample.actions()) {
    auto [prev, next] = adjacent_snapshots(sample, action);
    EffectSet eff = effect_set(prev, next, opts.tol, opts.include_internal);
    eff.t = action.t;
    if (opts.assume_success && eff.effects.empty()) {
      ++store.occurrences_skipped;
      continue;
    }
    TransitionGroup group = transition_group(eff, prev, next, action, opts.learn_preservation);
    EvaluationContext ctx{&prev, &next, opts.heading_var, opts.position_var, opts.tol};
    ActionTheory induced = induce_theory(group, lib, ctx);

    auto it = store.current.find(action.name);
    if (it == store.current.end()) {
      it = store.current.emplace(action.name, induced).first;
    } else {
      it->second = refine_theory(it->second, induced, opts.tol);
    }
    if (opts.keep_history) store.history[action.name].push_back({action.t, std::move(induced), it->second});
    if (observer) observer(action, it->second);
  }
  return store;
}

}  // namespace actsem
