#pragma once

namespace pearlplus {

// Intelligent Driver Model parameters. v0 is the desired speed and is set per
// task from the sampled traffic speed.
struct IdmParams {
  double a_max = 1.5;      // maximum acceleration, m/s^2
  double b_comfort = 2.0;  // comfortable braking, m/s^2
  double v0 = 30.0;        // desired speed, m/s
  double headway = 1.5;    // desired time headway T, s
  double s0 = 2.0;         // jam distance, m
  double delta = 4.0;      // velocity exponent
  double b_max = 4.0;      // hard braking limit used to clamp the output
};

// a = a_max * [1 - (v/v0)^delta - (s*/gap)^2],
// s* = s0 + v*T + v*(v - v_lead) / (2*sqrt(a_max*b)); clamped to [-b_max, a_max].
double idm_accel(double v, double v_lead, double gap, const IdmParams& p);

// Gap-acceptance parameters for the main-lane follower facing a merging
// vehicle. Defaults are the calibrated values used throughout.
struct HidasParams {
  double dv = 2.7;     // maximum willing speed decrease, m/s
  double g_min = 2.0;  // minimum safe constant gap, m
  double c = 0.9;      // acceptable gap parameter
  double b_f = 1.5;    // acceptable deceleration rate, m/s^2
};

void validate_hidas(const HidasParams& p);

enum class HidasDecision { kYield, kIgnore };

// Dt = Dv/b_f; g_sld = g_f - (v_f*Dt - b_f*Dt^2/2) + v_s*Dt;
// g_min' = g_min + c*(v_f - v_s) if v_f > v_s else g_min;
// the follower yields iff g_sld > g_min'.
HidasDecision hidas_decision(double g_f, double v_f, double v_s, const HidasParams& p);

// B(veh0, veh1) = (v1^2 - v0^2) / (2*(x0 - x1)) with veh0 leading veh1.
double min_braking_pair(double x_lead, double v_lead, double x_follow, double v_follow);

// b_min = max{ B(front, ego), B(ego, rear) }; requires x_front > x_ego > x_rear.
double min_braking(double x_front, double v_front, double x_ego, double v_ego, double x_rear,
                   double v_rear);

}  // namespace pearlplus
