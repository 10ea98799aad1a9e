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


// Closed-loop testbed: a single rigid body torso on massless legs. Stance
// feet are pinned to the ground; swing joints follow their PD torques
// through a critically damped second-order response.

#ifndef QUADCRAWL_SIMULATOR_H_
#define QUADCRAWL_SIMULATOR_H_

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quadcrawl/gait.h"
#include "quadcrawl/mpc.h"
#include "quadcrawl/types.h"

namespace quadcrawl {

struct SimState {
  SrbState srb;
  LegJointState legs;
  // World-frame foot positions; stance feet sit at z = 0.
  std::array<Eigen::Vector3d, kNumLegs> feet;
  std::array<bool, kNumLegs> stance{true, true, true, true};
  double time = 0.0;
};

struct ControllerConfig {
  MpcConfig mpc;
  GaitConfig gait;
  double sim_dt = 1e-3;
  // Simulation ticks per MPC solve; forces are held in between.
  int mpc_decimation = 10;
  // Goal reached when within this xy distance and below this speed.
  double goal_tolerance = 0.15;
  double goal_speed = 0.1;

  double control_period() const { return sim_dt * mpc_decimation; }
  void Validate() const;
};

// World-frame hip position of `leg`.
Eigen::Vector3d HipPosition(const SrbState& srb, int leg,
                            const QuadrupedParams& params);

// Foot position in the hip frame of `leg`.
Eigen::Vector3d FootInHipFrame(const SrbState& srb, int leg,
                               const Eigen::Vector3d& foot_world,
                               const QuadrupedParams& params);

// Standing state at `pose`: feet below the hips, all in stance.
SimState InitialSimState(const TorsoPose& pose, const QuadrupedParams& params);

// Advances one tick: the torso under sum f - m g and the yaw moment
// (semi-implicit Euler), stance legs re-solved kinematically against their
// pinned feet, swing joints integrated under `torques` with joint inertia
// `swing_inertia`. Throws std::invalid_argument when dt <= 0 or no foot is
// in stance.
SimState SimStep(const SimState& state, const GroundReactionForce& grf,
                 const Vector12d& torques, double dt,
                 const QuadrupedParams& params, double swing_inertia);

// Maps a torso pose to a desired torso velocity [vx, vy, vz, yaw rate].
using VelocityPolicy = std::function<Eigen::Vector4d(const TorsoPose&)>;

// Lookup policy over stored trajectories (time-ordered samples each): finds
// the sample whose pose is nearest (Euclidean, yaw wrapped) and returns the
// velocity `lookahead` samples further along the same trajectory, clamped to
// the world's velocity bounds. With lookahead 0 a robot resting on a start
// sample would be told to stay there; one sample ahead breaks that tie.
class NearestSamplePolicy {
 public:
  NearestSamplePolicy(std::vector<std::vector<VelocitySample>> trajectories,
                      const World& world, int lookahead = 1);
  Eigen::Vector4d operator()(const TorsoPose& pose) const;

 private:
  std::vector<std::vector<VelocitySample>> trajectories_;
  int lookahead_;
  Eigen::Vector4d lower_;
  Eigen::Vector4d upper_;
};

enum class RolloutOutcome { kReached, kTimeout, kFault };
const char* ToString(RolloutOutcome outcome);

// One row per control tick, taken before the tick's forces are applied.
struct TraceRecord {
  double time = 0.0;
  SrbState srb;
  Vector12d q = Vector12d::Zero();
  Vector12d torque = Vector12d::Zero();
  GroundReactionForce grf;
  Eigen::Vector4d policy_velocity = Eigen::Vector4d::Zero();
  std::array<Eigen::Vector3d, kNumLegs> feet;
  double clearance = 0.0;
  double mpc_cost = 0.0;
};

struct RolloutRequest {
  World world;
  TorsoPose start;
  TorsoPose goal{3.0, 0.0, 0.28, 0.0};
  QuadrupedParams params;
  ControllerConfig controller;
  double max_time = 60.0;
};

struct RolloutResult {
  RolloutOutcome outcome = RolloutOutcome::kTimeout;
  double final_time = 0.0;
  int fault_tick = -1;
  std::string fault_message;
  std::vector<TraceRecord> trace;
  double min_clearance = 0.0;
};

// Runs the full loop: policy -> reference -> force MPC -> torques, with the
// gait, footstep, swing and PD layers driving the swing legs.
RolloutResult Rollout(const VelocityPolicy& policy,
                      const RolloutRequest& request);

// Column names of the trace file.
std::vector<std::string> TraceColumns();
void WriteTrace(const std::vector<TraceRecord>& trace, std::ostream& out);

// Independent re-check of a trace.
struct TraceAudit {
  int pyramid_violations = 0;  // forces outside the pyramid by > 1e-9 N
  int torque_violations = 0;   // torques outside the limits
  int swing_force_violations = 0;
  double max_stance_drift = 0.0;  // foot motion while in stance
  double max_tick_jitter = 0.0;   // deviation from uniform spacing
  // Minimum torso z over records with x_lo <= x <= x_hi (inf if none).
  double min_z_in_window = 0.0;
};
TraceAudit AuditTrace(const std::vector<TraceRecord>& trace,
                      const QuadrupedParams& params, double period,
                      double x_lo = 1.3, double x_hi = 1.7);

}  // namespace quadcrawl

#endif  // QUADCRAWL_SIMULATOR_H_
