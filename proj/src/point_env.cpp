#include "pearlplus/envs/point_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pearlplus/csv.hpp"

namespace pearlplus {

PointVelocityEnv::PointVelocityEnv(const TaskSpec& task, const PointParams& params)
    : task_(task), p_(params) {
  if (task.family != EnvFamily::kPointVelocity) {
    throw std::invalid_argument("PointVelocityEnv: wrong task family");
  }
}

Observation PointVelocityEnv::reset(Rng& /*rng*/) {
  // Dynamics and start state are deterministic; tasks differ only in reward.
  pos_ = {0.0, 0.0};
  vel_ = {0.0, 0.0};
  t_ = 0;
  terminal_ = false;
  return observe();
}

Observation PointVelocityEnv::observe() const {
  return Observation{{pos_[0], pos_[1], vel_[0], vel_[1]}};
}

StepResult PointVelocityEnv::step(const Action& a) {
  if (terminal_) throw std::logic_error("PointVelocityEnv::step after terminal state");
  if (a.continuous.size() != 2) {
    throw std::invalid_argument("PointVelocityEnv::step: expected 2-dim continuous action");
  }
  for (int i = 0; i < 2; ++i) {
    const double u = std::clamp(a.continuous[i], -1.0, 1.0);
    vel_[i] += p_.accel_gain * u * p_.dt;
    pos_[i] += vel_[i] * p_.dt;
  }
  t_ += 1;

  StepResult out;
  out.info.unhealthy = std::abs(pos_[0]) > p_.pos_limit || std::abs(pos_[1]) > p_.pos_limit ||
                       std::abs(vel_[0]) > p_.vel_limit || std::abs(vel_[1]) > p_.vel_limit;
  const double dvx = vel_[0] - task_.target_velocity[0];
  const double dvy = vel_[1] - task_.target_velocity[1];
  const double dist = std::sqrt(dvx * dvx + dvy * dvy);
  out.reward = (out.info.unhealthy ? 0.0 : p_.healthy_bonus) - dist;
  out.terminal = out.info.unhealthy || t_ >= p_.horizon;
  out.obs = observe();
  terminal_ = out.terminal;
  return out;
}

std::string PointVelocityEnv::trace_header() const {
  return "t,px,py,vx,vy,a0,a1,reward,unhealthy";
}

std::string PointVelocityEnv::trace_row(int t, const Action& a, const StepResult& r) const {
  std::string row = std::to_string(t);
  for (double x : {pos_[0], pos_[1], vel_[0], vel_[1], a.continuous[0], a.continuous[1], r.reward}) {
    row += ',';
    row += format_double(x);
  }
  row += ',';
  row += r.info.unhealthy ? '1' : '0';
  return row;
}

}  // namespace pearlplus
