#pragma once

#include "pearlplus/envs/env.hpp"

namespace pearlplus {

// Highway on-ramp merge. One main lane plus a parallel ramp that ends at
// `ramp_end`. Main-lane vehicles follow the IDM; while the ego is on the
// ramp, the immediate follower runs the gap-acceptance rule instead and, when
// yielding, brakes at b_f down to at most Dv below its speed when it started
// to yield. Lane changes are instantaneous.
class MergeEnv : public Env {
 public:
  struct Vehicle {
    double x = 0.0;  // longitudinal position, m
    double v = 0.0;  // speed, m/s
    double yield_anchor_speed = -1.0;  // speed when yielding began; <0 = not yielding
  };

  MergeEnv(const TaskSpec& task, const MergeParams& params);

  // Test hook: fixed main-lane population instead of the seeded spawn.
  static MergeEnv with_vehicles(const TaskSpec& task, const MergeParams& params,
                                std::vector<Vehicle> main_lane);

  int observation_dim() const override { return kMergeObsDim; }
  ActionSpace action_space() const override { return {true, kMergeActionCount, 0}; }
  Observation reset(Rng& rng) override;
  StepResult step(const Action& a) override;
  bool is_failure(const StepInfo& info) const override {
    return info.crashed || info.ramp_end_failure;
  }
  std::string trace_header() const override;
  std::string trace_row(int t, const Action& a, const StepResult& r) const override;

  double traffic_speed_mps() const { return task_.traffic_speed_mph * kMphToMps; }
  bool ego_on_ramp() const { return ego_on_ramp_; }
  double ego_x() const { return ego_x_; }
  double ego_v() const { return ego_v_; }
  const std::vector<Vehicle>& main_lane() const { return main_; }

 private:
  Observation observe() const;
  // index of nearest main-lane vehicle behind (strictly x < ego) / ahead
  int follower_index() const;
  int front_index() const;

  TaskSpec task_;
  MergeParams p_;
  std::vector<Vehicle> main_;
  std::vector<Vehicle> fixed_spawn_;
  bool use_fixed_spawn_ = false;

  double ego_x_ = 0.0;
  double ego_v_ = 0.0;
  bool ego_on_ramp_ = true;
  int t_ = 0;
  bool terminal_ = true;
  bool follower_hidas_now_ = false;
};

}  // namespace pearlplus
