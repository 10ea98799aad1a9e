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


#include "quadcrawl/simulator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "quadcrawl/distance.h"
#include "quadcrawl/text_io.h"

namespace quadcrawl {
namespace {

Eigen::Matrix3d RotZ(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Eigen::Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

// Joint angles for a foot target, falling back to the nearest reachable
// point; always within the joint limits.
Eigen::Vector3d SolveLeg(int leg, const Eigen::Vector3d& foot_hip,
                         const QuadrupedParams& params) {
  return LegInverseKinematics(leg, NearestReachable(leg, foot_hip, params),
                              params)
      .q;
}

struct SwingState {
  Eigen::Vector3d liftoff = Eigen::Vector3d::Zero();
  Eigen::Vector3d touchdown = Eigen::Vector3d::Zero();
  double start_time = 0.0;
};

}  // namespace

void ControllerConfig::Validate() const {
  mpc.Validate();
  gait.Validate();
  if (!(sim_dt > 0.0)) throw std::invalid_argument("controller: sim_dt must be > 0");
  if (mpc_decimation < 1) {
    throw std::invalid_argument("controller: mpc_decimation must be >= 1");
  }
  if (!(goal_tolerance > 0.0) || !(goal_speed > 0.0)) {
    throw std::invalid_argument("controller: goal tolerances must be > 0");
  }
}

Eigen::Vector3d HipPosition(const SrbState& srb, int leg,
                            const QuadrupedParams& params) {
  return srb.position + RotZ(srb.yaw) * params.hip_offsets[leg];
}

Eigen::Vector3d FootInHipFrame(const SrbState& srb, int leg,
                               const Eigen::Vector3d& foot_world,
                               const QuadrupedParams& params) {
  return RotZ(srb.yaw).transpose() *
         (foot_world - HipPosition(srb, leg, params));
}

SimState InitialSimState(const TorsoPose& pose, const QuadrupedParams& params) {
  SimState state;
  state.srb.position = pose.Position();
  state.srb.yaw = pose.yaw;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    Eigen::Vector3d foot = HipPosition(state.srb, leg, params);
    foot += RotZ(pose.yaw) *
            Eigen::Vector3d(0.0, LegSide(leg) * params.link_lengths[0], 0.0);
    foot.z() = 0.0;
    state.feet[leg] = foot;
    state.legs.q.segment<3>(3 * leg) =
        SolveLeg(leg, FootInHipFrame(state.srb, leg, foot, params), params);
  }
  return state;
}

SimState SimStep(const SimState& state, const GroundReactionForce& grf,
                 const Vector12d& torques, double dt,
                 const QuadrupedParams& params, double swing_inertia) {
  if (!(dt > 0.0)) throw std::invalid_argument("SimStep: dt must be > 0");
  if (std::none_of(state.stance.begin(), state.stance.end(),
                   [](bool s) { return s; })) {
    throw std::invalid_argument("SimStep: no foot in stance");
  }
  SimState next = state;
  Eigen::Vector3d accel(0.0, 0.0, -params.gravity);
  double yaw_accel = 0.0;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (!state.stance[leg]) continue;
    const Eigen::Vector3d& f = grf.force[leg];
    const Eigen::Vector3d r = state.feet[leg] - state.srb.position;
    accel += f / params.mass;
    yaw_accel += (r.x() * f.y() - r.y() * f.x()) / params.inertia_diag.z();
  }
  next.srb.velocity += dt * accel;
  next.srb.position += dt * next.srb.velocity;
  next.srb.yaw_rate += dt * yaw_accel;
  next.srb.yaw += dt * next.srb.yaw_rate;

  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d q_old = state.legs.leg_q(leg);
    Eigen::Vector3d q;
    Eigen::Vector3d qdot;
    if (state.stance[leg]) {
      q = SolveLeg(leg,
                   FootInHipFrame(next.srb, leg, state.feet[leg], params),
                   params);
      qdot = (q - q_old) / dt;
    } else {
      qdot = state.legs.leg_qdot(leg) +
             dt * torques.segment<3>(3 * leg) / swing_inertia;
      q = q_old + dt * qdot;
      const Eigen::Vector3d lo = params.joint_min.segment<3>(3 * leg);
      const Eigen::Vector3d hi = params.joint_max.segment<3>(3 * leg);
      for (int i = 0; i < 3; ++i) {
        if (q[i] < lo[i] || q[i] > hi[i]) {
          q[i] = std::clamp(q[i], lo[i], hi[i]);
          qdot[i] = 0.0;
        }
      }
      next.feet[leg] = HipPosition(next.srb, leg, params) +
                       RotZ(next.srb.yaw) * LegForwardKinematics(leg, q, params);
    }
    next.legs.q.segment<3>(3 * leg) = q;
    next.legs.qdot.segment<3>(3 * leg) = qdot;
  }
  next.time = state.time + dt;
  return next;
}

NearestSamplePolicy::NearestSamplePolicy(
    std::vector<std::vector<VelocitySample>> trajectories, const World& world,
    int lookahead)
    : trajectories_(std::move(trajectories)),
      lookahead_(lookahead),
      lower_(world.velocity_lower()),
      upper_(world.velocity_upper()) {
  if (lookahead_ < 0) {
    throw std::invalid_argument("NearestSamplePolicy: lookahead must be >= 0");
  }
  const bool any = std::any_of(trajectories_.begin(), trajectories_.end(),
                               [](const auto& t) { return !t.empty(); });
  if (!any) throw std::invalid_argument("NearestSamplePolicy: no samples");
}

Eigen::Vector4d NearestSamplePolicy::operator()(const TorsoPose& pose) const {
  const Eigen::Vector4d p = pose.AsVector();
  double best = std::numeric_limits<double>::infinity();
  const VelocitySample* answer = nullptr;
  for (const std::vector<VelocitySample>& traj : trajectories_) {
    for (size_t i = 0; i < traj.size(); ++i) {
      Eigen::Vector4d d = traj[i].input - p;
      d[3] = NormalizeYaw(d[3]);
      const double dist = d.squaredNorm();
      if (dist < best) {
        best = dist;
        answer = &traj[std::min(traj.size() - 1, i + lookahead_)];
      }
    }
  }
  return answer->target.cwiseMax(lower_).cwiseMin(upper_);
}

const char* ToString(RolloutOutcome outcome) {
  switch (outcome) {
    case RolloutOutcome::kReached:
      return "reached";
    case RolloutOutcome::kTimeout:
      return "timeout";
    case RolloutOutcome::kFault:
      return "fault";
  }
  return "unknown";
}

RolloutResult Rollout(const VelocityPolicy& policy,
                      const RolloutRequest& request) {
  request.world.Validate();
  request.params.Validate();
  const ControllerConfig& ctrl = request.controller;
  ctrl.Validate();
  if (!request.start.IsValid() || !request.goal.IsValid()) {
    throw std::invalid_argument("Rollout: invalid start or goal pose");
  }
  if (!(request.max_time >= 0.0)) {
    throw std::invalid_argument("Rollout: max_time must be >= 0");
  }
  const QuadrupedParams& params = request.params;
  const GaitSchedule& schedule = ctrl.gait.schedule;
  const double dt = ctrl.sim_dt;
  const double period = ctrl.control_period();
  const int horizon = ctrl.mpc.horizon;
  const double swing_time = schedule.swing_duration();
  const double swing_inertia = ctrl.gait.swing_inertia();

  RolloutResult result;
  result.min_clearance = std::numeric_limits<double>::infinity();
  SimState state = InitialSimState(request.start, params);
  std::array<SwingState, kNumLegs> swing;
  GroundReactionForce forces;
  Vector12d stance_torque = Vector12d::Zero();
  Eigen::Vector4d velocity = Eigen::Vector4d::Zero();
  double mpc_cost = 0.0;

  auto fault = [&](long tick, const std::string& message) {
    result.outcome = RolloutOutcome::kFault;
    result.fault_tick = static_cast<int>(tick);
    result.fault_message = message;
    result.final_time = state.time;
  };

  for (long tick = 0;; ++tick) {
    state.time = tick * dt;
    const double t = state.time;
    Vector12d swing_torque = Vector12d::Zero();

    if (tick % ctrl.mpc_decimation == 0) {
      const double dist =
          (state.srb.position.head<2>() - request.goal.Position().head<2>())
              .norm();
      if (dist <= ctrl.goal_tolerance &&
          state.srb.velocity.norm() <= ctrl.goal_speed) {
        result.outcome = RolloutOutcome::kReached;
        result.final_time = t;
        break;
      }
      if (t >= request.max_time - 0.5 * dt) {
        result.outcome = RolloutOutcome::kTimeout;
        result.final_time = t;
        break;
      }

      // Contact switches happen on control ticks; the gait is sampled at
      // the middle of the hold interval.
      const auto phase = GaitPhase(t + 0.5 * period, schedule);
      for (int leg = 0; leg < kNumLegs; ++leg) {
        if (state.stance[leg] && !phase[leg].stance) {
          swing[leg] = {state.feet[leg], state.feet[leg], t};
        } else if (!state.stance[leg] && phase[leg].stance) {
          state.feet[leg] = swing[leg].touchdown;
          state.legs.q.segment<3>(3 * leg) = SolveLeg(
              leg, FootInHipFrame(state.srb, leg, state.feet[leg], params),
              params);
          state.legs.qdot.segment<3>(3 * leg).setZero();
        }
        state.stance[leg] = phase[leg].stance;
      }
      if (std::none_of(state.stance.begin(), state.stance.end(),
                       [](bool s) { return s; })) {
        fault(tick, "gait left no foot in stance");
        break;
      }

      velocity = policy(state.srb.Pose());
      if (!velocity.allFinite()) {
        fault(tick, "policy returned a non-finite velocity");
        break;
      }

      const Eigen::Vector2d v_des = velocity.head<2>();
      const Eigen::Vector2d v_act = state.srb.velocity.head<2>();
      for (int leg = 0; leg < kNumLegs; ++leg) {
        if (state.stance[leg]) continue;
        const double remaining =
            std::max(0.0, swing[leg].start_time + swing_time - t);
        Eigen::Vector3d hip = HipPosition(state.srb, leg, params);
        hip.head<2>() += remaining * v_des;
        hip += RotZ(state.srb.yaw) *
               Eigen::Vector3d(0.0, LegSide(leg) * params.link_lengths[0], 0.0);
        swing[leg].touchdown =
            RaibertFootstep(hip, v_des, v_act, schedule.stance_duration(),
                            ctrl.gait.raibert_gain);
      }

      std::vector<std::array<bool, kNumLegs>> stance(horizon);
      stance[0] = state.stance;
      for (int k = 1; k < horizon; ++k) {
        const auto p = GaitPhase(t + (k + 0.5) * ctrl.mpc.step, schedule);
        for (int leg = 0; leg < kNumLegs; ++leg) stance[k][leg] = p[leg].stance;
      }
      std::array<Eigen::Vector3d, kNumLegs> feet = state.feet;
      for (int leg = 0; leg < kNumLegs; ++leg) {
        if (!state.stance[leg]) feet[leg] = swing[leg].touchdown;
      }
      try {
        const MpcSolution sol =
            SolveGrfMpc(state.srb, BuildReference(velocity, state.srb, ctrl.mpc),
                        stance, feet, params, ctrl.mpc);
        forces = sol.forces.front();
        mpc_cost = sol.cost;
        stance_torque =
            GrfToTorques(forces, state.legs, state.srb.yaw, params);
      } catch (const std::exception& e) {
        fault(tick, e.what());
        break;
      }
    }

    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (state.stance[leg]) continue;
      SwingPlan plan;
      plan.liftoff = swing[leg].liftoff;
      plan.touchdown = swing[leg].touchdown;
      plan.apex_height = ctrl.gait.swing_apex;
      plan.phase =
          std::clamp((t - swing[leg].start_time) / swing_time, 0.0, 1.0);
      const Eigen::Vector3d q_des = SolveLeg(
          leg, FootInHipFrame(state.srb, leg, SwingPosition(plan), params),
          params);
      swing_torque.segment<3>(3 * leg) = PdSwingTorque(
          q_des, state.legs.leg_q(leg), state.legs.leg_qdot(leg), ctrl.gait.kp,
          ctrl.gait.kd, params.torque_min.segment<3>(3 * leg),
          params.torque_max.segment<3>(3 * leg));
    }

    if (tick % ctrl.mpc_decimation == 0) {
      TraceRecord record;
      record.time = t;
      record.srb = state.srb;
      record.q = state.legs.q;
      record.torque = stance_torque + swing_torque;
      record.grf = forces;
      record.policy_velocity = velocity;
      record.feet = state.feet;
      record.clearance = SignedDistance(state.srb.position, request.world);
      record.mpc_cost = mpc_cost;
      result.min_clearance = std::min(result.min_clearance, record.clearance);
      result.trace.push_back(record);
    }

    state = SimStep(state, forces, swing_torque, dt, params, swing_inertia);
    if (!state.srb.IsFinite() || state.srb.position.z() < 0.0 ||
        state.srb.position.z() > 1.0) {
      std::ostringstream msg;
      msg << "torso height " << state.srb.position.z()
          << " m left the range [0, 1]";
      fault(tick + 1, msg.str());
      break;
    }
  }
  return result;
}

std::vector<std::string> TraceColumns() {
  std::vector<std::string> cols = {"t",  "x",  "y",  "z",  "yaw",
                                   "vx", "vy", "vz", "vyaw"};
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (int j = 0; j < 3; ++j) {
      cols.push_back("q_" + std::string(LegName(leg)) + std::to_string(j));
    }
  }
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (int j = 0; j < 3; ++j) {
      cols.push_back("tau_" + std::string(LegName(leg)) + std::to_string(j));
    }
  }
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (const char* axis : {"x", "y", "z"}) {
      cols.push_back("f_" + std::string(LegName(leg)) + axis);
    }
  }
  cols.push_back("clearance");
  cols.push_back("mpc_cost");
  for (int leg = 0; leg < kNumLegs; ++leg) {
    cols.push_back("stance_" + std::string(LegName(leg)));
  }
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (const char* axis : {"x", "y", "z"}) {
      cols.push_back("foot_" + std::string(LegName(leg)) + axis);
    }
  }
  for (const char* v : {"vref_x", "vref_y", "vref_z", "vref_yaw"}) {
    cols.push_back(v);
  }
  return cols;
}

void WriteTrace(const std::vector<TraceRecord>& trace, std::ostream& out) {
  const std::vector<std::string> cols = TraceColumns();
  for (size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  out << "\n";
  for (const TraceRecord& r : trace) {
    std::vector<double> row;
    row.push_back(r.time);
    const Vector8d x = r.srb.Flatten();
    row.insert(row.end(), x.data(), x.data() + 8);
    row.insert(row.end(), r.q.data(), r.q.data() + 12);
    row.insert(row.end(), r.torque.data(), r.torque.data() + 12);
    for (const Eigen::Vector3d& f : r.grf.force) {
      row.insert(row.end(), f.data(), f.data() + 3);
    }
    row.push_back(r.clearance);
    row.push_back(r.mpc_cost);
    for (bool s : r.grf.stance) row.push_back(s ? 1.0 : 0.0);
    for (const Eigen::Vector3d& f : r.feet) {
      row.insert(row.end(), f.data(), f.data() + 3);
    }
    row.insert(row.end(), r.policy_velocity.data(),
               r.policy_velocity.data() + 4);
    for (size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << FormatDouble(row[i]);
    }
    out << "\n";
  }
}

TraceAudit AuditTrace(const std::vector<TraceRecord>& trace,
                      const QuadrupedParams& params, double period,
                      double x_lo, double x_hi) {
  TraceAudit audit;
  audit.min_z_in_window = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const Eigen::Vector3d& f = r.grf.force[leg];
      if (r.grf.stance[leg]) {
        if (PyramidViolation(f, params.mu) > 1e-9) ++audit.pyramid_violations;
      } else if (f.squaredNorm() != 0.0) {
        ++audit.swing_force_violations;
      }
    }
    for (int j = 0; j < 12; ++j) {
      if (r.torque[j] < params.torque_min[j] ||
          r.torque[j] > params.torque_max[j]) {
        ++audit.torque_violations;
      }
    }
    audit.max_tick_jitter =
        std::max(audit.max_tick_jitter,
                 std::abs(r.time - trace.front().time - i * period));
    const double x = r.srb.position.x();
    if (x >= x_lo && x <= x_hi) {
      audit.min_z_in_window =
          std::min(audit.min_z_in_window, r.srb.position.z());
    }
    if (i == 0) continue;
    const TraceRecord& prev = trace[i - 1];
    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (prev.grf.stance[leg] && r.grf.stance[leg]) {
        audit.max_stance_drift = std::max(
            audit.max_stance_drift, (r.feet[leg] - prev.feet[leg]).norm());
      }
    }
  }
  return audit;
}

}  // namespace quadcrawl
