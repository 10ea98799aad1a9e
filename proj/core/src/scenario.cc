// Copyright 2026 The quadcrawl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "quadcrawl/scenario.h"

#include <set>
#include <vector>

#include "json.hpp"
#include "quadcrawl/text_io.h"

namespace quadcrawl {
namespace {

using Json = nlohmann::ordered_json;

// Typed access to one JSON object. Every key read is recorded so that
// Finish() can reject keys nobody asked for.
class Fields {
 public:
  Fields(const Json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) Fail(path_, "must be an object");
  }

  bool Has(const std::string& key) const { return object_.contains(key); }

  double Number(const std::string& key, double fallback) {
    if (!Take(key)) return fallback;
    const Json& v = object_.at(key);
    if (!v.is_number()) Fail(Path(key), "must be a number");
    return v.get<double>();
  }

  int Int(const std::string& key, int fallback) {
    if (!Take(key)) return fallback;
    const Json& v = object_.at(key);
    if (!v.is_number_integer()) Fail(Path(key), "must be an integer");
    return v.get<int>();
  }

  uint64_t Uint64(const std::string& key, uint64_t fallback) {
    if (!Take(key)) return fallback;
    const Json& v = object_.at(key);
    if (!v.is_number_unsigned()) Fail(Path(key), "must be a non-negative integer");
    return v.get<uint64_t>();
  }

  std::string String(const std::string& key, const std::string& fallback) {
    if (!Take(key)) return fallback;
    const Json& v = object_.at(key);
    if (!v.is_string()) Fail(Path(key), "must be a string");
    return v.get<std::string>();
  }

  template <int N>
  Eigen::Matrix<double, N, 1> Vector(const std::string& key,
                                     const Eigen::Matrix<double, N, 1>& fallback,
                                     double scale = 1.0) {
    if (!Take(key)) return fallback;
    const std::vector<double> values = Numbers(key);
    if (static_cast<int>(values.size()) != N) {
      Fail(Path(key), "must have " + std::to_string(N) + " entries");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) out[i] = scale * values[i];
    return out;
  }

  std::vector<int> Ints(const std::string& key, const std::vector<int>& fallback) {
    if (!Take(key)) return fallback;
    const Json& v = object_.at(key);
    if (!v.is_array()) Fail(Path(key), "must be an array of integers");
    std::vector<int> out;
    for (const Json& e : v) {
      if (!e.is_number_integer()) Fail(Path(key), "must be an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  const Json* Array(const std::string& key) {
    if (!Take(key)) return nullptr;
    const Json& v = object_.at(key);
    if (!v.is_array()) Fail(Path(key), "must be an array");
    return &v;
  }

  // Null when absent.
  const Json* Object(const std::string& key) {
    if (!Take(key)) return nullptr;
    return &object_.at(key);
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void Finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!taken_.count(it.key())) Fail(Path(it.key()), "is not a known field");
    }
  }

  [[noreturn]] static void Fail(const std::string& path,
                                const std::string& what) {
    throw ConfigError("config field '" + path + "' " + what);
  }

 private:
  bool Take(const std::string& key) {
    taken_.insert(key);
    return object_.contains(key) && !object_.at(key).is_null();
  }

  std::vector<double> Numbers(const std::string& key) const {
    const Json& v = object_.at(key);
    if (!v.is_array()) Fail(Path(key), "must be an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) Fail(Path(key), "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const Json& object_;
  std::string path_;
  std::set<std::string> taken_;
};

template <typename Derived>
Json ToArray(const Eigen::MatrixBase<Derived>& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

TorsoPose ReadPose(const Json& json, const std::string& path,
                   const TorsoPose& fallback, double length_scale) {
  Fields f(json, path);
  TorsoPose pose;
  pose.x = f.Has("x") ? length_scale * f.Number("x", 0.0) : fallback.x;
  pose.y = f.Has("y") ? length_scale * f.Number("y", 0.0) : fallback.y;
  pose.z = f.Has("z") ? length_scale * f.Number("z", 0.0) : fallback.z;
  pose.yaw = f.Number("yaw", fallback.yaw);
  f.Finish();
  if (!pose.IsValid()) {
    Fields::Fail(path, "must be finite with z > 0 and yaw in (-pi, pi]");
  }
  return pose;
}

Json PoseToJson(const TorsoPose& pose) {
  return {{"x", pose.x}, {"y", pose.y}, {"z", pose.z}, {"yaw", pose.yaw}};
}

void ReadWorld(const Json& json, World* world, double length_scale) {
  Fields f(json, "world");
  world->clearance = f.Has("clearance")
                         ? length_scale * f.Number("clearance", 0.0)
                         : world->clearance;
  world->state_lower = f.Vector<8>("state_lower", world->state_lower);
  world->state_upper = f.Vector<8>("state_upper", world->state_upper);
  world->command_lower = f.Vector<4>("command_lower", world->command_lower);
  world->command_upper = f.Vector<4>("command_upper", world->command_upper);
  if (const Json* obstacles = f.Array("obstacles")) {
    world->obstacles.clear();
    for (size_t i = 0; i < obstacles->size(); ++i) {
      const std::string path = "world.obstacles[" + std::to_string(i) + "]";
      Fields o((*obstacles)[i], path);
      BoxObstacle box;
      box.name = o.String("name", "box" + std::to_string(i));
      if (!o.Has("min") || !o.Has("max")) {
        Fields::Fail(path, "needs both 'min' and 'max'");
      }
      box.min_corner = o.Vector<3>("min", box.min_corner, length_scale);
      box.max_corner = o.Vector<3>("max", box.max_corner, length_scale);
      o.Finish();
      world->obstacles.push_back(box);
    }
  }
  f.Finish();
}

void ReadPlanner(const Json& json, PlannerConfig* planner) {
  Fields f(json, "planner");
  planner->knot_count = f.Int("knot_count", planner->knot_count);
  planner->time_lower = f.Number("time_lower", planner->time_lower);
  planner->time_upper = f.Number("time_upper", planner->time_upper);
  planner->effort_weight = f.Number("effort_weight", planner->effort_weight);
  planner->smoothing = f.Number("smoothing", planner->smoothing);
  planner->clearance_margin =
      f.Number("clearance_margin", planner->clearance_margin);
  if (const Json* solver = f.Object("solver")) {
    Fields s(*solver, "planner.solver");
    nlp::NlpOptions& o = planner->solver;
    o.tol_kkt = s.Number("tol_kkt", o.tol_kkt);
    o.tol_feas = s.Number("tol_feas", o.tol_feas);
    o.max_outer_iterations =
        s.Int("max_outer_iterations", o.max_outer_iterations);
    o.initial_penalty = s.Number("initial_penalty", o.initial_penalty);
    o.penalty_growth = s.Number("penalty_growth", o.penalty_growth);
    o.max_penalty = s.Number("max_penalty", o.max_penalty);
    o.max_inner_iterations =
        s.Int("max_inner_iterations", o.max_inner_iterations);
    s.Finish();
  }
  f.Finish();
}

void ReadRobot(const Json& json, QuadrupedParams* robot) {
  Fields f(json, "robot");
  robot->mass = f.Number("mass", robot->mass);
  robot->inertia_diag = f.Vector<3>("inertia_diag", robot->inertia_diag);
  if (const Json* hips = f.Array("hip_offsets")) {
    if (hips->size() != kNumLegs) {
      Fields::Fail("robot.hip_offsets", "must list 4 hips (FL, FR, RL, RR)");
    }
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const Json& h = (*hips)[leg];
      if (!h.is_array() || h.size() != 3) {
        Fields::Fail("robot.hip_offsets", "entries must be 3-vectors");
      }
      for (int i = 0; i < 3; ++i) {
        if (!h[i].is_number()) {
          Fields::Fail("robot.hip_offsets", "entries must be numbers");
        }
        robot->hip_offsets[leg][i] = h[i].get<double>();
      }
    }
  }
  robot->link_lengths = f.Vector<3>("link_lengths", robot->link_lengths);
  robot->torque_min = f.Vector<12>("torque_min", robot->torque_min);
  robot->torque_max = f.Vector<12>("torque_max", robot->torque_max);
  robot->joint_min = f.Vector<12>("joint_min", robot->joint_min);
  robot->joint_max = f.Vector<12>("joint_max", robot->joint_max);
  robot->mu = f.Number("mu", robot->mu);
  robot->gravity = f.Number("gravity", robot->gravity);
  f.Finish();
}

void ReadController(const Json& json, ControllerConfig* ctrl,
                    double* max_time) {
  Fields f(json, "controller");
  if (const Json* mpc = f.Object("mpc")) {
    Fields m(*mpc, "controller.mpc");
    ctrl->mpc.horizon = m.Int("horizon", ctrl->mpc.horizon);
    ctrl->mpc.step = m.Number("step", ctrl->mpc.step);
    ctrl->mpc.state_weights =
        m.Vector<8>("state_weights", ctrl->mpc.state_weights);
    ctrl->mpc.force_weight = m.Number("force_weight", ctrl->mpc.force_weight);
    ctrl->mpc.max_force_factor =
        m.Number("max_force_factor", ctrl->mpc.max_force_factor);
    m.Finish();
  }
  if (const Json* gait = f.Object("gait")) {
    Fields g(*gait, "controller.gait");
    GaitConfig& c = ctrl->gait;
    c.schedule.cycle_time = g.Number("cycle_time", c.schedule.cycle_time);
    c.schedule.duty = g.Number("duty", c.schedule.duty);
    const Eigen::Vector4d offsets = g.Vector<4>(
        "offsets", Eigen::Vector4d(c.schedule.offsets[0], c.schedule.offsets[1],
                                   c.schedule.offsets[2], c.schedule.offsets[3]));
    for (int i = 0; i < 4; ++i) c.schedule.offsets[i] = offsets[i];
    c.raibert_gain = g.Number("raibert_gain", c.raibert_gain);
    c.swing_apex = g.Number("swing_apex", c.swing_apex);
    c.kp = g.Number("kp", c.kp);
    c.kd = g.Number("kd", c.kd);
    g.Finish();
  }
  ctrl->sim_dt = f.Number("sim_dt", ctrl->sim_dt);
  ctrl->mpc_decimation = f.Int("mpc_decimation", ctrl->mpc_decimation);
  ctrl->goal_tolerance = f.Number("goal_tolerance", ctrl->goal_tolerance);
  ctrl->goal_speed = f.Number("goal_speed", ctrl->goal_speed);
  *max_time = f.Number("max_time", *max_time);
  f.Finish();
}

template <typename Fn>
void Check(const std::string& section, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

}  // namespace

Scenario Scenario::Default() {
  Scenario s;
  s.world = World::Default();
  BoxObstacle table;
  table.name = "table";
  table.min_corner = {1.3, -0.5, 0.23};
  table.max_corner = {1.7, 0.5, 0.6};
  s.world.obstacles.push_back(table);
  return s;
}

void Scenario::Validate() const {
  Check("world", [&] { world.Validate(); });
  Check("planner", [&] { planner.Validate(); });
  Check("initial_pose_distribution", [&] { distribution.Validate(); });
  Check("robot", [&] { robot.Validate(); });
  Check("controller", [&] { controller.Validate(); });
  if (trajectory_count < 0) {
    throw ConfigError("config field 'dataset.trajectory_count' must be >= 0");
  }
  if (points_per_trajectory < 2) {
    throw ConfigError(
        "config field 'dataset.points_per_trajectory' must be >= 2");
  }
  if (!(max_time >= 0.0)) {
    throw ConfigError("config field 'controller.max_time' must be >= 0");
  }
}

Scenario ParseScenario(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  Fields f(root, "");
  if (!f.Has("schema_version")) {
    Fields::Fail("schema_version", "is required");
  }
  const int version = f.Int("schema_version", 0);
  if (version != kScenarioSchemaVersion) {
    Fields::Fail("schema_version",
                 "must be " + std::to_string(kScenarioSchemaVersion) +
                     " (got " + std::to_string(version) + ")");
  }
  const std::string unit = f.String("length_unit", "m");
  double scale = 1.0;
  if (unit == "cm") {
    scale = 0.01;
  } else if (unit != "m") {
    Fields::Fail("length_unit", "must be \"m\" or \"cm\"");
  }

  Scenario s = Scenario::Default();
  s.name = f.String("name", s.name);
  if (const Json* j = f.Object("start")) s.start = ReadPose(*j, "start", s.start, scale);
  if (const Json* j = f.Object("goal")) s.goal = ReadPose(*j, "goal", s.goal, scale);
  if (const Json* j = f.Object("world")) ReadWorld(*j, &s.world, scale);
  if (const Json* j = f.Object("planner")) ReadPlanner(*j, &s.planner);
  if (const Json* j = f.Object("initial_pose_distribution")) {
    Fields d(*j, "initial_pose_distribution");
    const Eigen::Vector3d mean = d.Vector<3>("mean", s.distribution.mean);
    const Eigen::Vector3d sd = d.Vector<3>("stddev", s.distribution.stddev);
    if (d.Has("mean")) {
      s.distribution.mean << scale * mean[0], scale * mean[1], mean[2];
    }
    if (d.Has("stddev")) {
      s.distribution.stddev << scale * sd[0], scale * sd[1], sd[2];
    }
    if (d.Has("fixed_z")) s.distribution.fixed_z = scale * d.Number("fixed_z", 0.0);
    d.Finish();
  }
  if (const Json* j = f.Object("dataset")) {
    Fields d(*j, "dataset");
    s.trajectory_count = d.Int("trajectory_count", s.trajectory_count);
    s.points_per_trajectory =
        d.Int("points_per_trajectory", s.points_per_trajectory);
    d.Finish();
  }
  if (const Json* j = f.Object("robot")) ReadRobot(*j, &s.robot);
  if (const Json* j = f.Object("controller")) {
    ReadController(*j, &s.controller, &s.max_time);
  }
  f.Finish();
  s.Validate();
  return s;
}

Scenario LoadScenario(const std::string& path) {
  const std::string text = ReadTextFile(path);
  try {
    return ParseScenario(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string ScenarioToJson(const Scenario& s) {
  Json root;
  root["schema_version"] = kScenarioSchemaVersion;
  root["name"] = s.name;
  root["length_unit"] = "m";
  root["start"] = PoseToJson(s.start);
  root["goal"] = PoseToJson(s.goal);
  Json world;
  world["clearance"] = s.world.clearance;
  world["state_lower"] = ToArray(s.world.state_lower);
  world["state_upper"] = ToArray(s.world.state_upper);
  world["command_lower"] = ToArray(s.world.command_lower);
  world["command_upper"] = ToArray(s.world.command_upper);
  world["obstacles"] = Json::array();
  for (const BoxObstacle& box : s.world.obstacles) {
    world["obstacles"].push_back({{"name", box.name},
                                  {"min", ToArray(box.min_corner)},
                                  {"max", ToArray(box.max_corner)}});
  }
  root["world"] = world;
  const nlp::NlpOptions& o = s.planner.solver;
  root["planner"] = {
      {"knot_count", s.planner.knot_count},
      {"time_lower", s.planner.time_lower},
      {"time_upper", s.planner.time_upper},
      {"effort_weight", s.planner.effort_weight},
      {"smoothing", s.planner.smoothing},
      {"clearance_margin", s.planner.clearance_margin},
      {"solver",
       {{"tol_kkt", o.tol_kkt},
        {"tol_feas", o.tol_feas},
        {"max_outer_iterations", o.max_outer_iterations},
        {"initial_penalty", o.initial_penalty},
        {"penalty_growth", o.penalty_growth},
        {"max_penalty", o.max_penalty},
        {"max_inner_iterations", o.max_inner_iterations}}}};
  root["initial_pose_distribution"] = {
      {"mean", ToArray(s.distribution.mean)},
      {"stddev", ToArray(s.distribution.stddev)},
      {"fixed_z", s.distribution.fixed_z}};
  root["dataset"] = {{"trajectory_count", s.trajectory_count},
                     {"points_per_trajectory", s.points_per_trajectory}};
  Json hips = Json::array();
  for (const Eigen::Vector3d& h : s.robot.hip_offsets) hips.push_back(ToArray(h));
  root["robot"] = {{"mass", s.robot.mass},
                   {"inertia_diag", ToArray(s.robot.inertia_diag)},
                   {"hip_offsets", hips},
                   {"link_lengths", ToArray(s.robot.link_lengths)},
                   {"torque_min", ToArray(s.robot.torque_min)},
                   {"torque_max", ToArray(s.robot.torque_max)},
                   {"joint_min", ToArray(s.robot.joint_min)},
                   {"joint_max", ToArray(s.robot.joint_max)},
                   {"mu", s.robot.mu},
                   {"gravity", s.robot.gravity}};
  const ControllerConfig& c = s.controller;
  const GaitSchedule& g = c.gait.schedule;
  root["controller"] = {
      {"mpc",
       {{"horizon", c.mpc.horizon},
        {"step", c.mpc.step},
        {"state_weights", ToArray(c.mpc.state_weights)},
        {"force_weight", c.mpc.force_weight},
        {"max_force_factor", c.mpc.max_force_factor}}},
      {"gait",
       {{"cycle_time", g.cycle_time},
        {"duty", g.duty},
        {"offsets", {g.offsets[0], g.offsets[1], g.offsets[2], g.offsets[3]}},
        {"raibert_gain", c.gait.raibert_gain},
        {"swing_apex", c.gait.swing_apex},
        {"kp", c.gait.kp},
        {"kd", c.gait.kd}}},
      {"sim_dt", c.sim_dt},
      {"mpc_decimation", c.mpc_decimation},
      {"goal_tolerance", c.goal_tolerance},
      {"goal_speed", c.goal_speed},
      {"max_time", s.max_time}};
  return root.dump(2) + "\n";
}

std::string ScenarioHash(const Scenario& scenario) {
  return HexDigest(Fnv1a64(ScenarioToJson(scenario)));
}

TrainConfig ParseTrainConfig(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("train config is not valid JSON: ") +
                      e.what());
  }
  Fields f(root, "");
  TrainConfig c;
  c.hidden_sizes = f.Ints("hidden_sizes", c.hidden_sizes);
  c.batch_size = f.Int("batch_size", c.batch_size);
  c.epochs = f.Int("epochs", c.epochs);
  c.learning_rate = f.Number("learning_rate", c.learning_rate);
  const std::string schedule = f.String("schedule", "constant");
  if (schedule == "constant") {
    c.schedule = LrSchedule::kConstant;
  } else if (schedule == "decay") {
    c.schedule = LrSchedule::kDecay;
  } else {
    Fields::Fail("schedule", "must be \"constant\" or \"decay\"");
  }
  c.decay = f.Number("decay", c.decay);
  c.seed = f.Uint64("seed", c.seed);
  const Eigen::Vector3d split = f.Vector<3>(
      "split", Eigen::Vector3d(c.split[0], c.split[1], c.split[2]));
  c.split = {split[0], split[1], split[2]};
  f.Finish();
  Check("train config", [&] { c.Validate(); });
  return c;
}

std::string TrainConfigToJson(const TrainConfig& c) {
  Json root;
  root["hidden_sizes"] = c.hidden_sizes;
  root["batch_size"] = c.batch_size;
  root["epochs"] = c.epochs;
  root["learning_rate"] = c.learning_rate;
  root["schedule"] = c.schedule == LrSchedule::kDecay ? "decay" : "constant";
  root["decay"] = c.decay;
  root["seed"] = c.seed;
  root["split"] = {c.split[0], c.split[1], c.split[2]};
  return root.dump(2) + "\n";
}

std::string TrainConfigHash(const TrainConfig& config) {
  return HexDigest(Fnv1a64(TrainConfigToJson(config)));
}

}  // namespace quadcrawl
