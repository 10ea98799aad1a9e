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


#include "commands.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "quadcrawl/datagen.h"
#include "quadcrawl/distance.h"
#include "quadcrawl/mlp.h"
#include "quadcrawl/planner.h"
#include "quadcrawl/scenario.h"
#include "quadcrawl/simulator.h"
#include "quadcrawl/text_io.h"

namespace quadcrawl::tools {
namespace {

using Json = nlohmann::ordered_json;

// Input problems the user can fix; mapped to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ScenarioDir() {
  const char* dir = std::getenv(kScenarioDirEnv);
  return dir == nullptr ? std::string() : std::string(dir);
}

Scenario ResolveScenario(const std::string& name) {
  namespace fs = std::filesystem;
  const std::string dir = ScenarioDir();
  if (name.empty()) {
    if (!dir.empty() && fs::exists(fs::path(dir) / "table.json")) {
      return LoadScenario((fs::path(dir) / "table.json").string());
    }
    return Scenario::Default();
  }
  if (fs::exists(name)) return LoadScenario(name);
  if (!dir.empty()) {
    for (const std::string& candidate : {name, name + ".json"}) {
      const fs::path p = fs::path(dir) / candidate;
      if (fs::exists(p)) return LoadScenario(p.string());
    }
  }
  throw UsageError("scenario '" + name + "' not found" +
                   (dir.empty() ? "" : " (also searched " + dir + ")"));
}

std::string Hash(const std::string& text) { return HexDigest(Fnv1a64(text)); }

TorsoPose PoseFrom(const Eigen::Vector4d& v) {
  TorsoPose pose = TorsoPose::FromVector(v);
  pose.yaw = NormalizeYaw(pose.yaw);
  return pose;
}

std::string PoseText(const TorsoPose& p) {
  return FormatDouble(p.x) + "," + FormatDouble(p.y) + "," +
         FormatDouble(p.z) + "," + FormatDouble(p.yaw);
}

void RequireOutput(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("--output is required for ") + what);
}

// Minimum torso z over the points whose (x, y) lies in an obstacle
// footprint; +inf when none does.
double MinZUnderObstacles(const std::vector<Eigen::Vector3d>& points,
                          const World& world) {
  double best = std::numeric_limits<double>::infinity();
  for (const Eigen::Vector3d& p : points) {
    for (const BoxObstacle& box : world.obstacles) {
      if (p.x() >= box.min_corner.x() && p.x() <= box.max_corner.x() &&
          p.y() >= box.min_corner.y() && p.y() <= box.max_corner.y()) {
        best = std::min(best, p.z());
      }
    }
  }
  return best;
}

Json Number(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

template <typename Fn>
int Guard(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

std::string ReadInput(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what + " path");
  try {
    return ReadTextFile(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

Dataset LoadDataset(const std::string& path) {
  std::istringstream in(ReadInput(path, "dataset"));
  try {
    return ReadDataset(in);
  } catch (const std::runtime_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

MlpModel LoadModel(const std::string& path) {
  const std::string text = ReadInput(path, "model");
  try {
    return MlpModel::FromJson(text);
  } catch (const std::runtime_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void WriteTrajectoryCsv(const TorsoTrajectory& traj, const std::string& hash,
                        std::ostream& out) {
  out << "# config_hash=" << hash << "\n";
  out << "t,x,y,z,yaw,vx,vy,vz,vyaw,ax,ay,az,ayaw\n";
  for (const TrajectoryKnot& k : traj.knots) {
    const Vector8d x = k.state.Flatten();
    out << FormatDouble(k.time);
    for (int i = 0; i < 8; ++i) out << "," << FormatDouble(x[i]);
    for (int i = 0; i < 4; ++i) out << "," << FormatDouble(k.command.accel[i]);
    out << "\n";
  }
}

}  // namespace

Eigen::Vector4d ParsePose(const std::string& text) {
  const std::vector<std::string> parts = SplitCsvLine(text);
  if (parts.size() != 4) {
    throw std::invalid_argument("pose '" + text + "' must be x,y,z,yaw");
  }
  Eigen::Vector4d v;
  for (int i = 0; i < 4; ++i) v[i] = ParseDouble(parts[i]);
  return v;
}

int RunPlan(const PlanArgs& args, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const Scenario scenario = ResolveScenario(args.scenario);
    RequireOutput(args.output, "plan");
    PlanMode mode;
    if (args.mode == "3d") {
      mode = PlanMode::k3d;
    } else if (args.mode == "2d") {
      mode = PlanMode::k2d;
    } else {
      throw UsageError("--mode must be 3d or 2d");
    }
    const TorsoPose start = args.start ? PoseFrom(*args.start) : scenario.start;
    const std::string hash = Hash(ScenarioHash(scenario) + "|plan|" +
                                  args.mode + "|" + PoseText(start));
    const PlanReport report =
        PlanWithMode(start, scenario.goal, scenario.world, scenario.planner, mode);

    std::ostringstream csv;
    WriteTrajectoryCsv(report.trajectory, hash, csv);
    WriteTextFile(args.output, csv.str());

    std::vector<Eigen::Vector3d> points;
    double max_abs_y = 0.0;
    for (const TrajectoryKnot& k : report.trajectory.knots) {
      points.push_back(k.state.pose.Position());
      max_abs_y = std::max(max_abs_y, std::abs(k.state.pose.y));
    }
    const TrajectoryAudit audit =
        AuditTrajectory(report.trajectory, scenario.world);
    Json summary;
    summary["config_hash"] = hash;
    summary["scenario_hash"] = ScenarioHash(scenario);
    summary["mode"] = args.mode;
    summary["status"] = nlp::ToString(report.solver_status);
    summary["total_time"] = report.trajectory.total_time;
    summary["knots"] = report.trajectory.knots.size();
    summary["min_clearance"] = Number(report.min_clearance);
    summary["audit_min_clearance"] = Number(audit.min_clearance);
    summary["audit_endpoint_error"] = audit.endpoint_error;
    summary["max_dynamics_defect"] = report.max_dynamics_defect;
    summary["min_z_under_obstacles"] =
        Number(MinZUnderObstacles(points, scenario.world));
    summary["max_abs_y"] = max_abs_y;
    summary["solver_iterations"] = report.solver_iterations;
    summary["solver_inner_iterations"] = report.solver_inner_iterations;
    summary["kkt_residual"] = report.kkt_residual;
    summary["constraint_violation"] = report.constraint_violation;
    WriteTextFile(args.output + ".summary.json", summary.dump(2) + "\n");

    out << "status=" << nlp::ToString(report.solver_status)
        << " T=" << FormatDouble(report.trajectory.total_time)
        << " min_clearance=" << FormatDouble(report.min_clearance)
        << " min_z_under_obstacles="
        << FormatDouble(MinZUnderObstacles(points, scenario.world))
        << " max_abs_y=" << FormatDouble(max_abs_y) << "\n";
    return report.converged() ? kExitOk : kExitFailure;
  });
}

int RunGen(const GenArgs& args, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const Scenario scenario = ResolveScenario(args.scenario);
    RequireOutput(args.output, "gen");
    if (args.workers < 1) throw UsageError("--workers must be >= 1");
    GenerationRequest request;
    request.world = scenario.world;
    request.goal = scenario.goal;
    request.distribution = scenario.distribution;
    request.trajectory_count = args.count.value_or(scenario.trajectory_count);
    request.points_per_trajectory =
        args.points.value_or(scenario.points_per_trajectory);
    request.planner = scenario.planner;
    request.seed = args.seed;
    request.workers = args.workers;
    if (request.trajectory_count < 0) throw UsageError("--count must be >= 0");
    if (request.points_per_trajectory < 2) throw UsageError("--points must be >= 2");
    // The worker count is deliberately not part of the hash: it does not
    // change the output.
    request.config_hash =
        Hash(ScenarioHash(scenario) + "|gen|" +
             std::to_string(request.trajectory_count) + "|" +
             std::to_string(request.points_per_trajectory) + "|" +
             std::to_string(request.seed));

    const GenerationResult result = GenerateDataset(request);
    std::ostringstream csv;
    WriteDataset(result.dataset, csv);
    WriteTextFile(args.output, csv.str());

    const GenerationSummary& s = result.summary;
    Json summary;
    summary["config_hash"] = request.config_hash;
    summary["scenario_hash"] = ScenarioHash(scenario);
    summary["seed"] = request.seed;
    summary["requested"] = s.requested;
    summary["succeeded"] = s.succeeded;
    summary["points_per_trajectory"] = request.points_per_trajectory;
    summary["samples"] = result.dataset.records.size();
    summary["mean_total_time"] = s.mean_total_time;
    summary["mean_min_clearance"] = s.mean_min_clearance;
    summary["failed_pose_indices"] = s.failed;
    summary["failure_status"] = s.failure_status;
    WriteTextFile(args.output + ".summary.json", summary.dump(2) + "\n");

    out << "requested=" << s.requested << " succeeded=" << s.succeeded
        << " samples=" << result.dataset.records.size()
        << " mean_T=" << FormatDouble(s.mean_total_time)
        << " mean_min_clearance=" << FormatDouble(s.mean_min_clearance) << "\n";
    return kExitOk;
  });
}

int RunTrain(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    RequireOutput(args.output, "train");
    const Dataset dataset = LoadDataset(args.dataset);
    const TrainConfig config =
        args.config.empty()
            ? TrainConfig::Desk()
            : ParseTrainConfig(ReadInput(args.config, "train config"));
    const std::string hash = Hash(dataset.config_hash + "|train|" +
                                  TrainConfigHash(config));
    const TrainResult result = Train(dataset, config);

    WriteTextFile(args.output, result.model.ToJson(hash));
    std::ostringstream history;
    history << "# config_hash=" << hash << "\n";
    history << "epoch,train_mse,val_mse\n";
    for (const EpochRecord& r : result.history) {
      history << r.epoch << "," << FormatDouble(r.train_mse) << ","
              << FormatDouble(r.val_mse) << "\n";
    }
    WriteTextFile(args.output + ".history.csv", history.str());

    Json summary;
    summary["config_hash"] = hash;
    summary["dataset_config_hash"] = dataset.config_hash;
    summary["best_epoch"] = result.best_epoch;
    summary["best_val_mse"] = result.best_val_mse;
    summary["test_mse"] = result.test_mse;
    summary["test_mse_raw"] = result.test_mse_raw;
    summary["train_trajectories"] = result.split.train.size();
    summary["val_trajectories"] = result.split.val.size();
    summary["test_trajectories"] = result.split.test.size();
    WriteTextFile(args.output + ".summary.json", summary.dump(2) + "\n");

    out << "best_epoch=" << result.best_epoch
        << " val_mse=" << FormatDouble(result.best_val_mse)
        << " test_mse=" << FormatDouble(result.test_mse)
        << " test_mse_raw=" << FormatDouble(result.test_mse_raw)
        << " train_trajectories=" << result.split.train.size()
        << " val_trajectories=" << result.split.val.size()
        << " test_trajectories=" << result.split.test.size() << "\n";
    return kExitOk;
  });
}

int RunRollout(const RolloutArgs& args, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const Scenario scenario = ResolveScenario(args.scenario);
    RequireOutput(args.output, "rollout");
    if (args.model.empty() == args.oracle_dataset.empty()) {
      throw UsageError("give exactly one of --model or --oracle-dataset");
    }
    if (args.sample_start && args.start) {
      throw UsageError("--start and --sample-start are exclusive");
    }
    VelocityPolicy policy;
    std::string policy_hash;
    if (!args.model.empty()) {
      const MlpModel model = LoadModel(args.model);
      policy = [model, world = scenario.world](const TorsoPose& pose) {
        return PredictVelocity(model, pose, world);
      };
      policy_hash = Hash(model.ToJson());
    } else {
      const Dataset dataset = LoadDataset(args.oracle_dataset);
      if (dataset.records.empty()) throw UsageError("oracle dataset is empty");
      std::vector<std::vector<VelocitySample>> trajectories(
          dataset.num_trajectories());
      for (const DatasetRecord& r : dataset.records) {
        trajectories[r.trajectory_id].push_back({r.pose, r.velocity});
      }
      policy = NearestSamplePolicy(std::move(trajectories), scenario.world);
      policy_hash = "oracle:" + dataset.config_hash;
    }

    RolloutRequest request;
    request.world = scenario.world;
    request.goal = scenario.goal;
    request.params = scenario.robot;
    request.controller = scenario.controller;
    request.max_time = args.max_time.value_or(scenario.max_time);
    request.start = scenario.start;
    if (args.start) request.start = PoseFrom(*args.start);
    if (args.sample_start) {
      request.start = SampleInitialPoses(
          scenario.distribution, 1, scenario.world, args.seed,
          SamplingClearance(scenario.world, scenario.planner))[0];
    }
    const std::string hash =
        Hash(ScenarioHash(scenario) + "|rollout|" + policy_hash + "|" +
             std::to_string(args.seed) + "|" + PoseText(request.start) + "|" +
             FormatDouble(request.max_time));

    const RolloutResult result = Rollout(policy, request);
    std::ostringstream trace;
    trace << "# config_hash=" << hash << "\n";
    WriteTrace(result.trace, trace);
    WriteTextFile(args.output, trace.str());

    const TraceAudit audit =
        AuditTrace(result.trace, scenario.robot,
                   scenario.controller.control_period());
    std::vector<Eigen::Vector3d> points;
    for (const TraceRecord& r : result.trace) points.push_back(r.srb.position);
    out << "outcome=" << ToString(result.outcome)
        << " time=" << FormatDouble(result.final_time)
        << " start=" << PoseText(request.start)
        << " min_clearance=" << FormatDouble(result.min_clearance)
        << " min_z_under_obstacles="
        << FormatDouble(MinZUnderObstacles(points, scenario.world))
        << " pyramid_violations=" << audit.pyramid_violations
        << " torque_violations=" << audit.torque_violations
        << " stance_drift=" << FormatDouble(audit.max_stance_drift);
    if (result.outcome == RolloutOutcome::kFault) {
      out << " fault_tick=" << result.fault_tick << " fault=\""
          << result.fault_message << "\"";
    }
    out << "\n";
    return result.outcome == RolloutOutcome::kReached ? kExitOk : kExitFailure;
  });
}

int RunEval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    const Scenario scenario = ResolveScenario(args.scenario);
    if (args.trials < 0) throw UsageError("--trials must be >= 0");
    const MlpModel model = LoadModel(args.model);
    const VelocityPolicy policy = [&](const TorsoPose& pose) {
      return PredictVelocity(model, pose, scenario.world);
    };
    const std::string hash =
        Hash(ScenarioHash(scenario) + "|eval|" + Hash(model.ToJson()) + "|" +
             std::to_string(args.trials) + "|" + std::to_string(args.seed));

    const std::vector<TorsoPose> starts =
        args.trials == 0
            ? std::vector<TorsoPose>{}
            : SampleInitialPoses(
                  scenario.distribution, args.trials, scenario.world, args.seed,
                  SamplingClearance(scenario.world, scenario.planner));
    int reached = 0;
    double time_sum = 0.0;
    double min_clearance = std::numeric_limits<double>::infinity();
    Json trials = Json::array();
    for (const TorsoPose& start : starts) {
      RolloutRequest request;
      request.world = scenario.world;
      request.start = start;
      request.goal = scenario.goal;
      request.params = scenario.robot;
      request.controller = scenario.controller;
      request.max_time = scenario.max_time;
      const RolloutResult r = Rollout(policy, request);
      if (r.outcome == RolloutOutcome::kReached) {
        ++reached;
        time_sum += r.final_time;
      }
      min_clearance = std::min(min_clearance, r.min_clearance);
      trials.push_back({{"start", PoseText(start)},
                        {"outcome", ToString(r.outcome)},
                        {"time", r.final_time},
                        {"min_clearance", Number(r.min_clearance)}});
    }

    const PlanReport plan_3d =
        Plan(scenario.start, scenario.goal, scenario.world, scenario.planner);
    const PlanReport plan_2d =
        Plan2d(scenario.start, scenario.goal, scenario.world, scenario.planner);

    Json summary;
    summary["config_hash"] = hash;
    summary["trials"] = args.trials;
    if (args.trials > 0) {
      summary["success_rate"] = static_cast<double>(reached) / args.trials;
      summary["mean_time_to_goal"] =
          reached > 0 ? Json(time_sum / reached) : Json(nullptr);
      summary["min_clearance"] = Number(min_clearance);
    }
    summary["T_3d"] = plan_3d.trajectory.total_time;
    summary["T_3d_status"] = nlp::ToString(plan_3d.solver_status);
    summary["T_2d"] = plan_2d.trajectory.total_time;
    summary["T_2d_status"] = nlp::ToString(plan_2d.solver_status);
    summary["T_3d_less_than_T_2d"] =
        plan_3d.trajectory.total_time < plan_2d.trajectory.total_time;
    summary["per_trial"] = trials;
    if (!args.output.empty()) {
      WriteTextFile(args.output, summary.dump(2) + "\n");
    }

    out << "trials=" << args.trials;
    if (args.trials > 0) {
      out << " success_rate="
          << FormatDouble(static_cast<double>(reached) / args.trials)
          << " mean_time_to_goal="
          << (reached > 0 ? FormatDouble(time_sum / reached) : "nan")
          << " min_clearance=" << FormatDouble(min_clearance);
    }
    out << " T_3d=" << FormatDouble(plan_3d.trajectory.total_time) << " ("
        << nlp::ToString(plan_3d.solver_status) << ")"
        << " T_2d=" << FormatDouble(plan_2d.trajectory.total_time) << " ("
        << nlp::ToString(plan_2d.solver_status) << ")\n";
    return kExitOk;
  });
}

}  // namespace quadcrawl::tools
