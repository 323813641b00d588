#include "pearlplus/envs/env.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "pearlplus/csv.hpp"
#include "pearlplus/envs/merge_env.hpp"
#include "pearlplus/envs/point_env.hpp"

namespace pearlplus {

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

EnvFamily family_from_string(const std::string& s) {
  if (s == "point_velocity") return EnvFamily::kPointVelocity;
  if (s == "merge") return EnvFamily::kMerge;
  throw std::invalid_argument("unknown env family: " + s);
}

std::string family_to_string(EnvFamily f) {
  return f == EnvFamily::kPointVelocity ? "point_velocity" : "merge";
}

void validate_reward_config(const RewardConfig& cfg) {
  if (!(cfg.r_collision < 0.0)) {
    throw std::invalid_argument("RewardConfig: r_collision must be negative");
  }
}

TaskSpec sample_task(EnvFamily family, Rng& rng, double point_target_speed_max) {
  TaskSpec spec;
  spec.family = family;
  if (family == EnvFamily::kMerge) {
    spec.traffic_density = rng.uniform(kMergeDensityMin, kMergeDensityMax);
    spec.traffic_speed_mph = rng.uniform(kMergeSpeedMphMin, kMergeSpeedMphMax);
  } else {
    spec.target_velocity[0] = rng.uniform(-point_target_speed_max, point_target_speed_max);
    spec.target_velocity[1] = rng.uniform(-point_target_speed_max, point_target_speed_max);
  }
  return spec;
}

std::unique_ptr<Env> make_env(const TaskSpec& spec, const EnvParams& params) {
  if (spec.family == EnvFamily::kMerge) {
    return std::make_unique<MergeEnv>(spec, params.merge);
  }
  return std::make_unique<PointVelocityEnv>(spec, params.point);
}

double merge_reward(const MergeRewardInputs& in, const RewardConfig& cfg) {
  validate_reward_config(cfg);
  double r = cfg.alpha_r * std::abs(in.v_x - cfg.v_ego_target);
  if (in.dx_front.has_value()) {
    if (!(in.traffic_density > 0.0)) {
      throw std::invalid_argument("merge_reward: traffic density must be positive");
    }
    r += cfg.beta_r * std::abs(*in.dx_front - 1000.0 / in.traffic_density);
  }
  if (in.merged_this_step) r += cfg.gamma_r * in.a_rear_merge;
  if (in.crashed) r += cfg.r_collision;
  if (in.costly_action) r += cfg.r_action;
  return r;
}

}  // namespace pearlplus
