#include "pearlplus/envs/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pearlplus {

double idm_accel(double v, double v_lead, double gap, const IdmParams& p) {
  if (!(gap > 0.0)) throw std::invalid_argument("idm_accel: gap must be positive");
  const double s_star =
      p.s0 + v * p.headway + v * (v - v_lead) / (2.0 * std::sqrt(p.a_max * p.b_comfort));
  const double a =
      p.a_max * (1.0 - std::pow(v / p.v0, p.delta) - (s_star / gap) * (s_star / gap));
  return std::clamp(a, -p.b_max, p.a_max);
}

void validate_hidas(const HidasParams& p) {
  if (!(p.dv > 0.0 && p.g_min > 0.0 && p.c > 0.0 && p.b_f > 0.0)) {
    throw std::invalid_argument("HidasParams: all parameters must be positive");
  }
}

HidasDecision hidas_decision(double g_f, double v_f, double v_s, const HidasParams& p) {
  if (g_f < 0.0) throw std::invalid_argument("hidas_decision: negative gap");
  validate_hidas(p);
  const double dt = p.dv / p.b_f;
  const double g_sld = g_f - (v_f * dt - p.b_f * dt * dt / 2.0) + v_s * dt;
  const double g_min = p.g_min + (v_f > v_s ? p.c * (v_f - v_s) : 0.0);
  return g_sld > g_min ? HidasDecision::kYield : HidasDecision::kIgnore;
}

double min_braking_pair(double x_lead, double v_lead, double x_follow, double v_follow) {
  if (x_lead == x_follow) {
    throw std::invalid_argument("min_braking_pair: coincident positions");
  }
  return (v_follow * v_follow - v_lead * v_lead) / (2.0 * (x_lead - x_follow));
}

double min_braking(double x_front, double v_front, double x_ego, double v_ego, double x_rear,
                   double v_rear) {
  if (!(x_front > x_ego && x_ego > x_rear)) {
    throw std::invalid_argument("min_braking: expected x_front > x_ego > x_rear");
  }
  return std::max(min_braking_pair(x_front, v_front, x_ego, v_ego),
                  min_braking_pair(x_ego, v_ego, x_rear, v_rear));
}

}  // namespace pearlplus
