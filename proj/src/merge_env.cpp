#include "pearlplus/envs/merge_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pearlplus/csv.hpp"

namespace pearlplus {

namespace {
constexpr double kFreeRoadGap = 1e9;
constexpr double kMinGap = 0.1;  // IDM guard once vehicles already overlap
}  // namespace

MergeEnv::MergeEnv(const TaskSpec& task, const MergeParams& params) : task_(task), p_(params) {
  if (task.family != EnvFamily::kMerge) {
    throw std::invalid_argument("MergeEnv: wrong task family");
  }
  if (task.traffic_density < kMergeDensityMin || task.traffic_density > kMergeDensityMax ||
      task.traffic_speed_mph < kMergeSpeedMphMin || task.traffic_speed_mph > kMergeSpeedMphMax) {
    throw std::invalid_argument("MergeEnv: task parameters outside the family ranges");
  }
  validate_hidas(p_.hidas);
  validate_reward_config(p_.reward);
  p_.idm.v0 = traffic_speed_mps();
  p_.reward.v_ego_target = traffic_speed_mps();
}

MergeEnv MergeEnv::with_vehicles(const TaskSpec& task, const MergeParams& params,
                                 std::vector<Vehicle> main_lane) {
  MergeEnv env(task, params);
  std::sort(main_lane.begin(), main_lane.end(),
            [](const Vehicle& a, const Vehicle& b) { return a.x < b.x; });
  env.fixed_spawn_ = std::move(main_lane);
  env.use_fixed_spawn_ = true;
  return env;
}

Observation MergeEnv::reset(Rng& rng) {
  if (use_fixed_spawn_) {
    main_ = fixed_spawn_;
  } else {
    main_.clear();
    const double v_env = traffic_speed_mps();
    const double spacing = 1000.0 / task_.traffic_density;
    double x = -p_.spawn_back;
    while (x < p_.spawn_ahead) {
      Vehicle veh;
      veh.x = x;
      veh.v = v_env * rng.uniform(0.94, 1.06);
      main_.push_back(veh);
      x += spacing * rng.uniform(0.8, 1.2);
    }
  }
  ego_x_ = 0.0;
  ego_v_ = p_.ego_start_speed;
  ego_on_ramp_ = true;
  t_ = 0;
  terminal_ = false;
  follower_hidas_now_ = false;
  return observe();
}

int MergeEnv::follower_index() const {
  int best = -1;
  for (std::size_t j = 0; j < main_.size(); ++j) {
    if (main_[j].x < ego_x_) best = static_cast<int>(j);
  }
  return best;  // main_ sorted ascending, so the last one behind is nearest
}

int MergeEnv::front_index() const {
  for (std::size_t j = 0; j < main_.size(); ++j) {
    if (main_[j].x > ego_x_) return static_cast<int>(j);
  }
  return -1;
}

StepResult MergeEnv::step(const Action& action) {
  if (terminal_) throw std::logic_error("MergeEnv::step after terminal state");
  const int a = action.discrete;
  if (a < 0 || a >= kMergeActionCount) {
    throw std::invalid_argument("MergeEnv::step: invalid action index");
  }

  StepResult out;
  bool costly = false;

  // ego action, lane changes resolve immediately
  double ego_accel = 0.0;
  switch (a) {
    case kAccel:
      ego_accel = p_.ego_accel;
      costly = true;
      break;
    case kDecel:
      ego_accel = p_.ego_decel;
      costly = true;
      break;
    case kCruise: {
      const int fi = ego_on_ramp_ ? -1 : front_index();
      if (fi >= 0) {
        const double gap = std::max(main_[fi].x - ego_x_ - p_.vehicle_length, kMinGap);
        ego_accel = idm_accel(ego_v_, main_[fi].v, gap, p_.idm);
      } else {
        ego_accel = idm_accel(ego_v_, ego_v_, kFreeRoadGap, p_.idm);
      }
      break;
    }
    case kLaneChangeLeft:
      costly = true;
      if (ego_on_ramp_) {
        ego_on_ramp_ = false;
        out.info.merged_this_step = true;
      }
      break;
    case kLaneChangeRight:
      costly = true;
      // legal only back onto the ramp while the merging area still exists
      if (!ego_on_ramp_ && ego_x_ < p_.ramp_end) ego_on_ramp_ = true;
      break;
  }

  // at the merge step, record the braking the merge would require
  if (out.info.merged_this_step) {
    const int fi = front_index();
    const int ri = follower_index();
    if (fi >= 0 && ri >= 0 && main_[fi].x > ego_x_ && ego_x_ > main_[ri].x) {
      out.info.min_braking =
          min_braking(main_[fi].x, main_[fi].v, ego_x_, ego_v_, main_[ri].x, main_[ri].v);
    } else if (fi >= 0 && main_[fi].x != ego_x_) {
      out.info.min_braking = min_braking_pair(main_[fi].x, main_[fi].v, ego_x_, ego_v_);
    } else if (ri >= 0 && main_[ri].x != ego_x_) {
      out.info.min_braking = min_braking_pair(ego_x_, ego_v_, main_[ri].x, main_[ri].v);
    }
  }

  // main-lane accelerations from the pre-integration state
  const int hidas_follower = ego_on_ramp_ ? follower_index() : -1;
  follower_hidas_now_ = hidas_follower >= 0;
  const int n = static_cast<int>(main_.size());
  std::vector<double> acc(main_.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    Vehicle& veh = main_[j];
    bool yielded = false;
    if (j == hidas_follower) {
      const double g_f = ego_x_ - veh.x - p_.vehicle_length;
      if (g_f >= 0.0 &&
          hidas_decision(g_f, veh.v, ego_v_, p_.hidas) == HidasDecision::kYield) {
        if (veh.yield_anchor_speed < 0.0) veh.yield_anchor_speed = veh.v;
        const double floor = std::max(0.0, veh.yield_anchor_speed - p_.hidas.dv);
        double brake = -p_.hidas.b_f;
        if (veh.v + brake * p_.dt < floor) brake = (floor - veh.v) / p_.dt;
        acc[j] = brake;
        yielded = true;
      }
    }
    if (!yielded) {
      veh.yield_anchor_speed = -1.0;
      // lead is the next main-lane vehicle, or the merged ego in between
      const bool ego_is_lead = !ego_on_ramp_ && ego_x_ > veh.x &&
                               (j + 1 >= n || ego_x_ < main_[j + 1].x);
      if (ego_is_lead) {
        const double gap = std::max(ego_x_ - veh.x - p_.vehicle_length, kMinGap);
        acc[j] = idm_accel(veh.v, ego_v_, gap, p_.idm);
      } else if (j + 1 < n) {
        const double gap = std::max(main_[j + 1].x - veh.x - p_.vehicle_length, kMinGap);
        acc[j] = idm_accel(veh.v, main_[j + 1].v, gap, p_.idm);
      } else {
        acc[j] = idm_accel(veh.v, veh.v, kFreeRoadGap, p_.idm);
      }
    }
  }

  double a_rear_merge = 0.0;
  if (out.info.merged_this_step) {
    const int ri = follower_index();
    if (ri >= 0) a_rear_merge = std::min(0.0, acc[ri]);
  }

  // semi-implicit Euler for everyone
  ego_v_ = std::max(0.0, ego_v_ + ego_accel * p_.dt);
  ego_x_ += ego_v_ * p_.dt;
  for (int j = 0; j < n; ++j) {
    main_[j].v = std::max(0.0, main_[j].v + acc[j] * p_.dt);
    main_[j].x += main_[j].v * p_.dt;
  }
  std::stable_sort(main_.begin(), main_.end(),
                   [](const Vehicle& x, const Vehicle& y) { return x.x < y.x; });

  if (!ego_on_ramp_) {
    for (const Vehicle& veh : main_) {
      if (std::abs(veh.x - ego_x_) < p_.vehicle_length) {
        out.info.crashed = true;
        break;
      }
    }
  }
  if (ego_on_ramp_ && ego_x_ >= p_.ramp_end) out.info.ramp_end_failure = true;

  t_ += 1;
  out.info.merged = !ego_on_ramp_;
  out.info.follower_hidas = follower_hidas_now_;
  out.terminal = out.info.crashed || out.info.ramp_end_failure || t_ >= p_.horizon;

  MergeRewardInputs rin;
  rin.v_x = ego_v_;
  const int fi = front_index();
  if (fi >= 0) rin.dx_front = main_[fi].x - ego_x_;
  rin.traffic_density = task_.traffic_density;
  rin.merged_this_step = out.info.merged_this_step;
  rin.a_rear_merge = a_rear_merge;
  rin.crashed = out.info.crashed;
  rin.costly_action = costly;
  out.reward = merge_reward(rin, p_.reward);
  if (out.info.ramp_end_failure) out.reward += p_.reward.r_collision / 2.0;

  out.obs = observe();
  terminal_ = out.terminal;
  return out;
}

Observation MergeEnv::observe() const {
  Observation obs;
  obs.vec.assign(kMergeObsDim, 0.0);
  const double ego_y = ego_on_ramp_ ? -p_.lane_width : 0.0;
  obs.vec[0] = std::max(0.0, p_.ramp_end - ego_x_) / 100.0;
  obs.vec[1] = ego_y / p_.lane_width;
  obs.vec[2] = ego_v_ / 30.0;
  obs.vec[3] = 0.0;

  // four nearest main-lane vehicles by longitudinal distance
  std::vector<int> order(main_.size());
  for (std::size_t j = 0; j < main_.size(); ++j) order[j] = static_cast<int>(j);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(main_[i].x - ego_x_) < std::abs(main_[j].x - ego_x_);
  });
  const int slots = std::min<int>(4, static_cast<int>(order.size()));
  for (int s = 0; s < slots; ++s) {
    const Vehicle& veh = main_[order[s]];
    const int base = 4 + s * 5;
    obs.vec[base + 0] = 1.0;
    obs.vec[base + 1] = (veh.x - ego_x_) / 50.0;
    obs.vec[base + 2] = (0.0 - ego_y) / p_.lane_width;
    obs.vec[base + 3] = (veh.v - ego_v_) / 10.0;
    obs.vec[base + 4] = 0.0;
  }
  return obs;
}

std::string MergeEnv::trace_header() const {
  return "t,x,y,vx,on_ramp,action,reward,crashed,merged,unhealthy,ramp_end_failure,b_min";
}

std::string MergeEnv::trace_row(int t, const Action& a, const StepResult& r) const {
  std::string row = std::to_string(t);
  row += ',' + format_double(ego_x_);
  row += ',' + format_double(ego_on_ramp_ ? -p_.lane_width : 0.0);
  row += ',' + format_double(ego_v_);
  row += ',';
  row += ego_on_ramp_ ? '1' : '0';
  row += ',' + std::to_string(a.discrete);
  row += ',' + format_double(r.reward);
  for (bool flag : {r.info.crashed, r.info.merged, r.info.unhealthy, r.info.ramp_end_failure}) {
    row += ',';
    row += flag ? '1' : '0';
  }
  row += ',';
  if (r.info.min_braking.has_value()) row += format_double(*r.info.min_braking);
  return row;
}

}  // namespace pearlplus
