#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pearlplus/envs/traffic.hpp"
#include "pearlplus/rng.hpp"

namespace pearlplus {

enum class EnvFamily { kPointVelocity, kMerge };

EnvFamily family_from_string(const std::string& s);
std::string family_to_string(EnvFamily f);

// Parameters identifying one MDP of a family.
struct TaskSpec {
  EnvFamily family = EnvFamily::kPointVelocity;
  // merge family
  double traffic_density = 0.0;    // veh/km, sampled in [30, 50]
  double traffic_speed_mph = 0.0;  // mph, sampled in [50, 70]
  // point family
  std::array<double, 2> target_velocity{0.0, 0.0};
};

inline constexpr double kMergeDensityMin = 30.0;
inline constexpr double kMergeDensityMax = 50.0;
inline constexpr double kMergeSpeedMphMin = 50.0;
inline constexpr double kMergeSpeedMphMax = 70.0;
inline constexpr double kMphToMps = 0.44704;

struct Observation {
  std::vector<double> vec;
};

struct StepInfo {
  bool crashed = false;
  bool merged = false;            // ego currently on the main lane
  bool merged_this_step = false;  // lane change onto the main lane happened now
  bool unhealthy = false;
  bool ramp_end_failure = false;  // reached end of ramp without merging
  bool follower_hidas = false;    // main-lane follower is in gap-acceptance mode
  std::optional<double> min_braking;  // set at the merge step when computable
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool terminal = false;
  StepInfo info;
};

// Discrete envs use `discrete`; continuous envs use `continuous`.
struct Action {
  int discrete = -1;
  std::vector<double> continuous;
};

struct ActionSpace {
  bool discrete = false;
  int n_actions = 0;  // discrete
  int dim = 0;        // continuous
};

// Weighting of the merge reward terms. alpha_r and beta_r are penalties
// (negative); gamma_r scales the rear-vehicle deceleration at the merge step.
struct RewardConfig {
  double alpha_r = -0.1;
  double beta_r = -0.01;
  double gamma_r = 0.1;
  double r_collision = -200.0;
  double r_action = -0.05;  // accel/decel/lane-change cost; cruise is free
  double v_ego_target = 0.0;  // m/s, set from the task
};

void validate_reward_config(const RewardConfig& cfg);

struct PointParams {
  double dt = 0.1;
  double accel_gain = 4.0;     // dv = gain * action * dt
  double pos_limit = 50.0;     // health box on |position| per axis
  double vel_limit = 10.0;     // health box on |velocity| per axis
  double healthy_bonus = 1.0;  // per-step bonus while healthy
  double target_speed_max = 1.5;
  int horizon = 100;
};

struct MergeParams {
  double dt = 0.1;
  int horizon = 200;
  double ramp_end = 220.0;       // end of the merging area, m from ego start
  double lane_width = 3.5;       // m
  double vehicle_length = 4.5;   // m, also the crash-overlap threshold
  double ego_start_speed = 20.0; // m/s
  double spawn_back = 150.0;     // main-lane fill range behind ego start, m
  double spawn_ahead = 400.0;    // main-lane fill range ahead of ego start, m
  double ego_accel = 1.5;        // accelerate action, m/s^2
  double ego_decel = -1.5;       // decelerate action, m/s^2
  IdmParams idm;
  HidasParams hidas;
  RewardConfig reward;
};

inline constexpr int kMergeObsDim = 24;
inline constexpr int kMergeActionCount = 5;
enum MergeAction { kAccel = 0, kDecel = 1, kCruise = 2, kLaneChangeLeft = 3, kLaneChangeRight = 4 };

class Env {
 public:
  virtual ~Env() = default;
  virtual int observation_dim() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual Observation reset(Rng& rng) = 0;
  virtual StepResult step(const Action& a) = 0;
  // Failure under the family's definition (crash/ramp-end for merge,
  // unhealthy for point).
  virtual bool is_failure(const StepInfo& info) const = 0;
  // CSV trace support: one row per step.
  virtual std::string trace_header() const = 0;
  virtual std::string trace_row(int t, const Action& a, const StepResult& r) const = 0;
};

TaskSpec sample_task(EnvFamily family, Rng& rng, double point_target_speed_max = 1.5);

struct EnvParams {
  PointParams point;
  MergeParams merge;
};

std::unique_ptr<Env> make_env(const TaskSpec& spec, const EnvParams& params);

// Eq.-style merge reward; the gamma term applies only at the merge step and
// the spacing term only when a front vehicle exists.
struct MergeRewardInputs {
  double v_x = 0.0;
  std::optional<double> dx_front;
  double traffic_density = 0.0;
  bool merged_this_step = false;
  double a_rear_merge = 0.0;  // rear-vehicle acceleration at the merge step
  bool crashed = false;
  bool costly_action = false;  // accel/decel/lane change
};

double merge_reward(const MergeRewardInputs& in, const RewardConfig& cfg);

}  // namespace pearlplus
