#pragma once

// Deterministic desk-scale robot world used to generate traces.
//
// Heading is a compass angle in degrees: 0 points along +axis1 (north) and
// 90 along +axis0 (east), so move_forward(x) displaces the robot by
// (c*x*sin(heading), c*x*cos(heading)).

#include <actsem/error.hpp>
#include <actsem/relations.hpp>
#include <actsem/trace.hpp>
#include <actsem/types.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace actsem::sim {

/// Axis-aligned box over the first two coordinates.
struct Box {
  Coord min;
  Coord max;

  bool contains(const Coord& p) const {
    for (std::size_t i = 0; i < 2; ++i)
      if (p[i] < min[i] || p[i] > max[i]) return false;
    return true;
  }
};

struct WorldState {
  Coord position{0.0, 0.0};
  double heading = 0.0;
  std::optional<std::string> held;
  std::map<std::string, Coord> objects;
  double speed = 2.0;

  bool operator==(const WorldState&) const = default;
};

struct NamingMap {
  std::string position = "r_pos";
  std::string heading = "r_dir";
  std::string gripper = "obj_grab";
  std::string object_count = "obj_num";
  std::string object_position_prefix = "obj_pos";
};

struct Scenario {
  std::string name;
  WorldState initial;
  std::vector<Box> obstacles;
  std::optional<Box> arena;
  NamingMap names;
  double grab_radius = 3.0;
  /// Uniform observation noise amplitude on published positions; 0 = exact.
  double noise = 0.0;
};

struct Command {
  std::string name;
  std::vector<TypedValue> params;
};

using CommandScript = std::vector<Command>;

inline double normalize_heading(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

namespace detail {

inline const TypedValue& single_param(const Command& cmd, BaseType expected) {
  if (cmd.params.size() != 1 || cmd.params[0].type() != ValueType(expected))
    throw Error(ErrorCode::Simulation,
                cmd.name + " expects exactly one " + std::string(to_string(expected)) + " parameter");
  return cmd.params[0];
}

inline bool blocked(const Scenario& sc, const Coord& p) {
  if (sc.arena && !sc.arena->contains(p)) return true;
  return std::any_of(sc.obstacles.begin(), sc.obstacles.end(), [&](const Box& b) { return b.contains(p); });
}

}  // namespace detail

inline bool within_reach(const Scenario& sc, const WorldState& w, const std::string& object) {
  auto it = w.objects.find(object);
  return it != w.objects.end() && euclidean_distance(it->second, w.position) <= sc.grab_radius;
}

/// One command step. Moves that would end inside an obstacle (or leave the
/// arena) leave the state unchanged; unmet grab/drop preconditions throw.
inline WorldState apply_command(const Scenario& sc, const WorldState& w, const Command& cmd) {
  WorldState next = w;
  if (cmd.name == "move_forward") {
    const double x = detail::single_param(cmd, BaseType::Dist).scalar();
    Coord p = w.position;
    p[0] += w.speed * x * sin_deg(w.heading);
    p[1] += w.speed * x * cos_deg(w.heading);
    if (detail::blocked(sc, p)) return w;
    next.position = p;
    if (next.held) next.objects[*next.held] = p;
  } else if (cmd.name == "turn_left" || cmd.name == "turn_right") {
    const double g = detail::single_param(cmd, BaseType::Angl).scalar();
    next.heading = normalize_heading(cmd.name == "turn_left" ? w.heading + g : w.heading - g);
  } else if (cmd.name == "grab") {
    const std::string& o = detail::single_param(cmd, BaseType::Obj).symbol();
    if (w.held) throw Error(ErrorCode::Simulation, "grab(" + o + ") with a full gripper");
    if (!w.objects.contains(o)) throw Error(ErrorCode::Simulation, "grab of unknown object '" + o + "'");
    if (!within_reach(sc, w, o)) throw Error(ErrorCode::Simulation, "object '" + o + "' is out of reach");
    next.held = o;
    next.objects[o] = w.position;
  } else if (cmd.name == "drop") {
    const std::string& o = detail::single_param(cmd, BaseType::Obj).symbol();
    if (!w.held) throw Error(ErrorCode::Simulation, "drop(" + o + ") with an empty gripper");
    if (*w.held != o) throw Error(ErrorCode::Simulation, "drop(" + o + ") while holding '" + *w.held + "'");
    next.held.reset();
  } else {
    throw Error(ErrorCode::Simulation, "unknown command '" + cmd.name + "'");
  }
  return next;
}

/// Portable draws; std distributions differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

inline StateSnapshot observe(const Scenario& sc, const WorldState& w, Timestamp t, Rng* noise_rng = nullptr) {
  auto jitter = [&](Coord c) {
    if (sc.noise > 0.0 && noise_rng != nullptr)
      for (double& x : c) x += (2.0 * noise_rng->unit() - 1.0) * sc.noise;
    return c;
  };
  StateSnapshot s;
  s.t = t;
  s.bindings.push_back({sc.names.position, TypedValue::pos(jitter(w.position))});
  s.bindings.push_back({sc.names.heading, TypedValue::angl(w.heading)});
  s.bindings.push_back({sc.names.gripper, TypedValue::product({TypedValue::obj(w.held.value_or("none")),
                                                               TypedValue::boolean(w.held.has_value())})});
  const auto free_objects = std::count_if(w.objects.begin(), w.objects.end(),
                                          [&](const auto& kv) { return !w.held || kv.first != *w.held; });
  s.bindings.push_back({sc.names.object_count, TypedValue::num(static_cast<double>(free_objects))});
  for (const auto& [name, pos] : w.objects)
    s.bindings.push_back({sc.names.object_position_prefix + "_" + name,
                          TypedValue::product({TypedValue::obj(name), TypedValue::pos(jitter(pos))})});
  return s;
}

/// Snapshot at t=1, then per command an action at the next even timestamp
/// and the posterior snapshot at the following odd one.
inline Sample run_script(const Scenario& sc, const CommandScript& script, std::uint64_t seed) {
  Rng noise_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  WorldState w = sc.initial;
  std::vector<StateSnapshot> snaps{observe(sc, w, 1, &noise_rng)};
  std::vector<ActionRecord> actions;
  Timestamp t = 1;
  for (const auto& cmd : script) {
    w = apply_command(sc, w, cmd);
    actions.push_back({cmd.name, t + 1, cmd.params});
    t += 2;
    snaps.push_back(observe(sc, w, t, &noise_rng));
  }
  return Sample::make(std::move(snaps), std::move(actions));
}

inline const std::vector<std::string>& all_actions() {
  static const std::vector<std::string> names{"move_forward", "turn_left", "turn_right", "grab", "drop"};
  return names;
}

/// Reproducible legal command sequence. Grab is only issued for an object
/// in reach with an empty gripper, drop only while holding; moves may
/// collide and become no-ops.
inline CommandScript random_policy(const Scenario& sc, std::size_t n_steps, std::uint64_t seed,
                                   const std::vector<std::string>& allowed = all_actions()) {
  static constexpr std::array<double, 3> kDistances{1.0, 2.0, 3.0};
  static constexpr std::array<double, 4> kAngles{45.0, 90.0, 135.0, 180.0};
  auto allows = [&](std::string_view n) { return std::find(allowed.begin(), allowed.end(), n) != allowed.end(); };

  Rng rng(seed);
  WorldState w = sc.initial;
  CommandScript script;
  script.reserve(n_steps);
  while (script.size() < n_steps) {
    Command cmd;
    if (w.held && allows("drop") && rng.chance(0.2)) {
      cmd = {"drop", {TypedValue::obj(*w.held)}};
    } else {
      std::vector<std::string> reachable;
      if (!w.held)
        for (const auto& [name, pos] : w.objects)
          if (within_reach(sc, w, name)) reachable.push_back(name);
      if (!reachable.empty() && allows("grab") && rng.chance(0.35)) {
        cmd = {"grab", {TypedValue::obj(reachable[rng.index(reachable.size())])}};
      } else {
        std::vector<std::string> motions;
        for (const char* n : {"move_forward", "turn_left", "turn_right"})
          if (allows(n)) motions.push_back(n);
        if (motions.empty()) throw Error(ErrorCode::Simulation, "policy has no applicable action");
        const std::string& pick = motions[rng.index(motions.size())];
        if (pick == "move_forward") cmd = {pick, {TypedValue::dist(kDistances[rng.index(kDistances.size())])}};
        else cmd = {pick, {TypedValue::angl(kAngles[rng.index(kAngles.size())])}};
      }
    }
    w = apply_command(sc, w, cmd);
    script.push_back(std::move(cmd));
  }
  return script;
}

// --- scenarios --------------------------------------------------------------

/// Robot between two obstacles on a bounded desk, two graspable objects.
inline Scenario two_obstacles(std::size_t dimension = 2) {
  Scenario sc;
  sc.name = dimension == 3 ? "two-obstacles-3d" : "two-obstacles";
  sc.initial.position = dimension == 3 ? Coord{0.0, 0.0, 1.0} : Coord{0.0, 0.0};
  sc.initial.heading = 0.0;
  sc.initial.speed = 2.0;
  sc.initial.objects = {{"ball", Coord(dimension, 0.0)}, {"cup", Coord(dimension, 0.0)}};
  sc.initial.objects["ball"][1] = 2.0;
  sc.initial.objects["cup"][0] = 2.0;
  sc.initial.objects["cup"][1] = -2.0;
  sc.obstacles = {Box{{-7.0, -3.0}, {-5.0, 3.0}}, Box{{5.0, -3.0}, {7.0, 3.0}}};
  sc.arena = Box{{-10.0, -10.0}, {10.0, 10.0}};
  return sc;
}

inline Scenario open_desk() {
  Scenario sc;
  sc.name = "open-desk";
  sc.initial.objects = {{"ball", Coord{1.0, 1.0}}};
  sc.arena = Box{{-20.0, -20.0}, {20.0, 20.0}};
  return sc;
}

inline std::optional<Scenario> builtin_scenario(std::string_view name) {
  if (name == "two-obstacles") return two_obstacles(2);
  if (name == "two-obstacles-3d") return two_obstacles(3);
  if (name == "open-desk") return open_desk();
  return std::nullopt;
}

inline Scenario scenario_from_json(const std::string& src) {
  try {
    auto j = nlohmann::json::parse(src);
    Scenario sc;
    sc.name = j.value("name", std::string("custom"));
    auto coord = [](const nlohmann::json& v) {
      Coord c = v.get<Coord>();
      if (c.size() != 2 && c.size() != 3) throw Error(ErrorCode::Range, "scenario coordinates need 2 or 3 values");
      return c;
    };
    auto box = [&](const nlohmann::json& v) { return Box{coord(v.at("min")), coord(v.at("max"))}; };
    sc.initial.position = coord(j.at("position"));
    sc.initial.heading = normalize_heading(j.value("heading", 0.0));
    sc.initial.speed = j.value("speed", 2.0);
    if (!(sc.initial.speed > 0.0)) throw Error(ErrorCode::Range, "speed factor must be positive");
    sc.grab_radius = j.value("grab_radius", 3.0);
    sc.noise = j.value("noise", 0.0);
    if (j.contains("arena")) sc.arena = box(j.at("arena"));
    if (j.contains("obstacles"))
      for (const auto& o : j.at("obstacles")) sc.obstacles.push_back(box(o));
    if (j.contains("objects"))
      for (const auto& [name, pos] : j.at("objects").items()) {
        if (!text::is_identifier(name) || name == "none") throw Error(ErrorCode::Range, "bad object name '" + name + "'");
        Coord p = coord(pos);
        if (p.size() != sc.initial.position.size()) throw Error(ErrorCode::Range, "object dimension mismatch");
        sc.initial.objects.emplace(name, p);
      }
    if (j.contains("variables")) {
      const auto& v = j.at("variables");
      sc.names.position = v.value("position", sc.names.position);
      sc.names.heading = v.value("heading", sc.names.heading);
      sc.names.gripper = v.value("gripper", sc.names.gripper);
      sc.names.object_count = v.value("object_count", sc.names.object_count);
      sc.names.object_position_prefix = v.value("object_position_prefix", sc.names.object_position_prefix);
    }
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("invalid scenario: ") + e.what());
  }
}

}  // namespace actsem::sim
