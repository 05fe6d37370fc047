#pragma once

// State snapshots, action records and samples, plus the line-delimited trace
// format:
//
//   state t=31 r_pos=pos:[9,14] obj_num=num:1 obj_grab=obj*bool:(none;0)
//   action t=32 name=move_forward params=[dist:3]
//
// A binding name prefixed with `~` marks an internal (non-observable)
// variable. Blank lines and lines starting with `#` are ignored.

#include <actsem/error.hpp>
#include <actsem/text.hpp>
#include <actsem/types.hpp>

#include <algorithm>
#include <cstdint>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace actsem {

using Timestamp = std::int64_t;

struct Binding {
  std::string name;
  TypedValue value;
  bool internal = false;

  bool operator==(const Binding&) const = default;
};

struct StateSnapshot {
  Timestamp t = 0;
  std::vector<Binding> bindings;

  const Binding* find(std::string_view name) const {
    for (const auto& b : bindings)
      if (b.name == name) return &b;
    return nullptr;
  }

  const TypedValue* value(std::string_view name) const {
    const Binding* b = find(name);
    return b ? &b->value : nullptr;
  }

  bool operator==(const StateSnapshot&) const = default;
};

struct ActionRecord {
  std::string name;
  Timestamp t = 0;
  std::vector<TypedValue> parameters;

  bool operator==(const ActionRecord&) const = default;
};

/// A validated, time-ordered sample. Only constructible through `make`, so
/// every instance satisfies the ordering, schema and bracketing invariants.
class Sample {
 public:
  /// `lines` optionally maps snapshot/action indices to source lines for
  /// error messages.
  static Sample make(std::vector<StateSnapshot> snapshots, std::vector<ActionRecord> actions,
                     const std::vector<std::size_t>& snapshot_lines = {},
                     const std::vector<std::size_t>& action_lines = {}) {
    auto line_of = [](const std::vector<std::size_t>& lines, std::size_t i) -> std::size_t {
      return i < lines.size() ? lines[i] : 0;
    };
    if (snapshots.empty()) throw Error(ErrorCode::Empty, "a sample needs at least one state snapshot");

    std::optional<std::size_t> dim;
    auto check_dim = [&](const TypedValue& v, std::size_t line) {
      for_each_pos(v, [&](const Coord& c) {
        if (!dim) dim = c.size();
        else if (*dim != c.size())
          throw Error(ErrorCode::Schema, "pos dimension " + std::to_string(c.size()) +
                                             " differs from the trace dimension " + std::to_string(*dim),
                      line);
      });
    };

    const StateSnapshot& first = snapshots.front();
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
      const auto& s = snapshots[i];
      const std::size_t line = line_of(snapshot_lines, i);
      if (s.bindings.empty()) throw Error(ErrorCode::Schema, "snapshots must bind at least one variable", line);
      std::set<std::string_view> names;
      for (const auto& b : s.bindings) {
        if (!names.insert(b.name).second)
          throw Error(ErrorCode::Schema, "variable '" + b.name + "' bound twice", line);
        check_dim(b.value, line);
      }
      if (i > 0) {
        if (s.t <= snapshots[i - 1].t)
          throw Error(ErrorCode::Order,
                      "snapshot timestamps must strictly increase (" + std::to_string(snapshots[i - 1].t) +
                          " then " + std::to_string(s.t) + ")",
                      line);
        if (s.bindings.size() != first.bindings.size())
          throw Error(ErrorCode::Schema, "snapshot binds a different variable set than the first snapshot", line);
        for (const auto& b : s.bindings) {
          const Binding* ref = first.find(b.name);
          if (ref == nullptr)
            throw Error(ErrorCode::Schema, "variable '" + b.name + "' missing from the first snapshot", line);
          if (ref->value.type() != b.value.type() || ref->internal != b.internal)
            throw Error(ErrorCode::Schema, "variable '" + b.name + "' changes type", line);
        }
      }
    }

    std::set<Timestamp> snapshot_times;
    for (const auto& s : snapshots) snapshot_times.insert(s.t);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      const auto& a = actions[i];
      const std::size_t line = line_of(action_lines, i);
      if (!text::is_identifier(a.name)) throw Error(ErrorCode::Parse, "bad action name '" + a.name + "'", line);
      if (i > 0 && a.t <= actions[i - 1].t)
        throw Error(ErrorCode::Order, "action timestamps must strictly increase", line);
      if (snapshot_times.contains(a.t))
        throw Error(ErrorCode::Order, "action timestamp " + std::to_string(a.t) + " collides with a snapshot", line);
      if (a.t < snapshots.front().t || a.t > snapshots.back().t)
        throw Error(ErrorCode::Dangling,
                    "action '" + a.name + "' at t=" + std::to_string(a.t) + " lacks a snapshot on both sides", line);
      for (const auto& p : a.parameters) check_dim(p, line);
    }

    Sample out;
    out.snapshots_ = std::move(snapshots);
    out.actions_ = std::move(actions);
    out.pos_dimension_ = dim.value_or(2);
    return out;
  }

  const std::vector<StateSnapshot>& snapshots() const { return snapshots_; }
  const std::vector<ActionRecord>& actions() const { return actions_; }
  std::size_t pos_dimension() const { return pos_dimension_; }

  bool operator==(const Sample&) const = default;

 private:
  Sample() = default;

  std::vector<StateSnapshot> snapshots_;
  std::vector<ActionRecord> actions_;
  std::size_t pos_dimension_ = 2;
};

/// Latest snapshot before and earliest snapshot after the action.
inline std::pair<const StateSnapshot&, const StateSnapshot&> adjacent_snapshots(const Sample& sample,
                                                                              const ActionRecord& action) {
  const auto& snaps = sample.snapshots();
  auto after = std::upper_bound(snaps.begin(), snaps.end(), action.t,
                                [](Timestamp t, const StateSnapshot& s) { return t < s.t; });
  if (after == snaps.begin() || after == snaps.end())
    throw Error(ErrorCode::Dangling, "action '" + action.name + "' at t=" + std::to_string(action.t) +
                                         " is not bracketed by snapshots");
  auto before = std::prev(after);
  if (before->t == action.t)
    throw Error(ErrorCode::Order, "action timestamp collides with a snapshot");
  return {*before, *after};
}

// --- line format ------------------------------------------------------------

namespace detail {

inline Timestamp read_timestamp_field(text::Cursor& cur) {
  cur.skip_space();
  if (cur.identifier() != "t") cur.fail("expected 't=<int>'");
  cur.expect('=');
  auto tok = cur.until_any(" \t");
  Timestamp t = 0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), t);
  if (ec != std::errc{} || end != tok.data() + tok.size()) cur.fail("malformed timestamp");
  return t;
}

}  // namespace detail

inline Sample ingest_trace(std::istream& in) {
  std::vector<StateSnapshot> snaps;
  std::vector<ActionRecord> actions;
  std::vector<std::size_t> snap_lines, action_lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    text::Cursor cur(line, line_no);
    auto tag = cur.identifier();
    if (tag == "state") {
      StateSnapshot s;
      s.t = detail::read_timestamp_field(cur);
      while (true) {
        cur.skip_space();
        if (cur.done()) break;
        Binding b;
        b.internal = cur.consume('~');
        b.name = std::string(cur.identifier());
        cur.expect('=');
        b.value = read_typed_value(cur);
        s.bindings.push_back(std::move(b));
      }
      snaps.push_back(std::move(s));
      snap_lines.push_back(line_no);
    } else if (tag == "action") {
      ActionRecord a;
      a.t = detail::read_timestamp_field(cur);
      cur.skip_space();
      if (cur.identifier() != "name") cur.fail("expected 'name=<ident>'");
      cur.expect('=');
      a.name = std::string(cur.identifier());
      cur.skip_space();
      if (cur.identifier() != "params") cur.fail("expected 'params=[...]'");
      cur.expect('=');
      cur.expect('[');
      cur.skip_space();
      if (!cur.consume(']')) {
        do {
          cur.skip_space();
          a.parameters.push_back(read_typed_value(cur));
          cur.skip_space();
        } while (cur.consume(','));
        cur.expect(']');
      }
      cur.skip_space();
      if (!cur.done()) cur.fail("trailing characters");
      actions.push_back(std::move(a));
      action_lines.push_back(line_no);
    } else {
      cur.fail("unknown record tag '" + std::string(tag) + "'");
    }
  }
  if (snaps.empty() && actions.empty()) throw Error(ErrorCode::Empty, "trace contains no records");
  return Sample::make(std::move(snaps), std::move(actions), snap_lines, action_lines);
}

inline Sample ingest_trace(std::string_view src) {
  std::istringstream in{std::string(src)};
  return ingest_trace(in);
}

inline std::string format_snapshot(const StateSnapshot& s) {
  std::string out = "state t=" + std::to_string(s.t);
  for (const auto& b : s.bindings) {
    out += ' ';
    if (b.internal) out += '~';
    out += b.name;
    out += '=';
    out += format_typed_value(b.value);
  }
  return out;
}

inline std::string format_action(const ActionRecord& a) {
  std::string out = "action t=" + std::to_string(a.t) + " name=" + a.name + " params=[";
  for (std::size_t i = 0; i < a.parameters.size(); ++i) {
    if (i) out += ',';
    out += format_typed_value(a.parameters[i]);
  }
  return out + "]";
}

/// Records in timestamp order, one per line.
inline std::string serialize_trace(const Sample& sample) {
  std::string out;
  auto s = sample.snapshots().begin();
  auto a = sample.actions().begin();
  while (s != sample.snapshots().end() || a != sample.actions().end()) {
    if (a == sample.actions().end() || (s != sample.snapshots().end() && s->t < a->t)) {
      out += format_snapshot(*s++);
    } else {
      out += format_action(*a++);
    }
    out += '\n';
  }
  return out;
}

}  // namespace actsem
