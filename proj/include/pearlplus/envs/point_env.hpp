#pragma once

#include "pearlplus/envs/env.hpp"

namespace pearlplus {

// Velocity-matching task family: a 2-D double integrator with continuous
// accelerations in [-1,1]^2. The per-step penalty vanishes exactly when the
// velocity equals the task target; leaving the health box terminates the
// episode as unhealthy.
class PointVelocityEnv : public Env {
 public:
  PointVelocityEnv(const TaskSpec& task, const PointParams& params);

  int observation_dim() const override { return 4; }
  ActionSpace action_space() const override { return {false, 0, 2}; }
  Observation reset(Rng& rng) override;
  StepResult step(const Action& a) override;
  bool is_failure(const StepInfo& info) const override { return info.unhealthy; }
  std::string trace_header() const override;
  std::string trace_row(int t, const Action& a, const StepResult& r) const override;

 private:
  Observation observe() const;

  TaskSpec task_;
  PointParams p_;
  std::array<double, 2> pos_{0.0, 0.0};
  std::array<double, 2> vel_{0.0, 0.0};
  int t_ = 0;
  bool terminal_ = true;
};

}  // namespace pearlplus
