#include "pearlplus/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pearlplus {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("config: " + msg); }

std::string line_col_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      line += 1;
      col = 1;
    } else {
      col += 1;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_ + ": expected an object");
    for (auto it = j_.begin(); it != j_.end(); ++it) remaining_.insert(it.key());
  }

  ~ObjectReader() = default;

  const json* get(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    remaining_.erase(key);
    return &*it;
  }

  const json& require(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) fail(path_ + ": missing required key '" + key + "'");
    return *v;
  }

  void read_double(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(where(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  void read_int(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(where(key) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void read_size(const std::string& key, std::size_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        fail(where(key) + ": expected a non-negative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void read_u64(const std::string& key, std::uint64_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        fail(where(key) + ": expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void read_bool(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) fail(where(key) + ": expected a boolean");
      out = v->get<bool>();
    }
  }

  void read_string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void read_int_list(const std::string& key, std::vector<int>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) fail(where(key) + ": expected an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) fail(where(key) + ": expected an array of integers");
        out.push_back(e.get<int>());
      }
    }
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    if (!remaining_.empty()) {
      fail(path_ + ": unknown key '" + *remaining_.begin() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> remaining_;
};

void parse_env(const json& j, ExperimentConfig& cfg) {
  ObjectReader env(j, "env");
  std::string family;
  const json& fam = env.require("family");
  if (!fam.is_string()) fail("env.family: expected a string");
  family = fam.get<std::string>();
  cfg.family = family_from_string(family);

  if (cfg.family == EnvFamily::kPointVelocity) {
    PointParams& p = cfg.env.point;
    env.read_double("dt", p.dt);
    env.read_int("horizon", p.horizon);
    env.read_double("accel_gain", p.accel_gain);
    env.read_double("pos_limit", p.pos_limit);
    env.read_double("vel_limit", p.vel_limit);
    env.read_double("healthy_bonus", p.healthy_bonus);
    env.read_double("target_speed_max", p.target_speed_max);
    if (!(p.dt > 0.0) || p.horizon < 1 || !(p.target_speed_max > 0.0)) {
      fail("env: point parameters must be positive");
    }
  } else {
    MergeParams& p = cfg.env.merge;
    env.read_double("dt", p.dt);
    env.read_int("horizon", p.horizon);
    env.read_double("ramp_end", p.ramp_end);
    env.read_double("lane_width", p.lane_width);
    env.read_double("vehicle_length", p.vehicle_length);
    env.read_double("ego_start_speed", p.ego_start_speed);
    env.read_double("spawn_back", p.spawn_back);
    env.read_double("spawn_ahead", p.spawn_ahead);
    env.read_double("ego_accel", p.ego_accel);
    env.read_double("ego_decel", p.ego_decel);
    if (const json* idm = env.get("idm")) {
      ObjectReader r(*idm, "env.idm");
      r.read_double("a_max", p.idm.a_max);
      r.read_double("b_comfort", p.idm.b_comfort);
      r.read_double("headway", p.idm.headway);
      r.read_double("s0", p.idm.s0);
      r.read_double("delta", p.idm.delta);
      r.read_double("b_max", p.idm.b_max);
      r.finish();
    }
    if (const json* hidas = env.get("hidas")) {
      ObjectReader r(*hidas, "env.hidas");
      r.read_double("dv", p.hidas.dv);
      r.read_double("g_min", p.hidas.g_min);
      r.read_double("c", p.hidas.c);
      r.read_double("b_f", p.hidas.b_f);
      r.finish();
    }
    if (const json* reward = env.get("reward")) {
      ObjectReader r(*reward, "env.reward");
      r.read_double("alpha_r", p.reward.alpha_r);
      r.read_double("beta_r", p.reward.beta_r);
      r.read_double("gamma_r", p.reward.gamma_r);
      r.read_double("r_collision", p.reward.r_collision);
      r.read_double("r_action", p.reward.r_action);
      r.finish();
    }
    if (!(p.dt > 0.0) || p.horizon < 1 || !(p.ramp_end > 0.0)) {
      fail("env: merge parameters must be positive");
    }
    validate_hidas(p.hidas);
    validate_reward_config(p.reward);
  }
  env.finish();
}

void parse_train(const json& j, ExperimentConfig& cfg) {
  ObjectReader r(j, "train");
  TrainSettings& t = cfg.train;
  AgentConfig& a = t.agent;
  bool alpha_given = false, aux_given = false;
  r.read_string("algorithm", t.algorithm);
  r.read_int("n_train_tasks", t.n_train_tasks);
  r.read_int("n_test_tasks", t.n_test_tasks);
  r.read_int("k_collection_passes", t.k_collection_passes);
  r.read_int("train_steps_per_iter", t.train_steps_per_iter);
  r.read_int("iterations", t.iterations);
  r.read_int("context_batch", t.context_batch);
  r.read_int("rl_batch", t.rl_batch);
  r.read_double("lr_encoder", t.lr_encoder);
  r.read_double("lr_actor", t.lr_actor);
  r.read_double("lr_critic", t.lr_critic);
  r.read_double("tau", t.tau);
  r.read_size("buffer_capacity", t.buffer_capacity);
  r.read_int("checkpoint_every", t.checkpoint_every);
  if (const json* v = r.get("alpha")) {
    if (!v->is_number()) fail("train.alpha: expected a number");
    a.alpha = v->get<double>();
    alpha_given = true;
  }
  r.read_double("kl_beta", a.kl_beta);
  r.read_int("latent_dim", a.latent_dim);
  r.read_double("discount", a.discount);
  r.read_double("reward_scale", a.reward_scale);
  r.read_double("entropy_temperature", a.entropy_temperature);
  r.read_int("n_critics", a.n_critics);
  if (const json* v = r.get("aux_critic")) {
    if (!v->is_boolean()) fail("train.aux_critic: expected a boolean");
    a.aux_critic = v->get<bool>();
    aux_given = true;
  }
  r.read_int_list("hidden", a.hidden);
  std::string act = activation_to_string(a.activation);
  r.read_string("activation", act);
  a.activation = activation_from_string(act);
  r.finish();

  if (t.algorithm == "pearl") {
    if (alpha_given && a.alpha != 0.0) fail("train.alpha must be 0 for algorithm 'pearl'");
    if (aux_given && a.aux_critic) fail("train.aux_critic must be false for algorithm 'pearl'");
    a.alpha = 0.0;
    a.aux_critic = false;
  } else if (t.algorithm == "pearlplus") {
    if (!aux_given) a.aux_critic = true;
    if (a.alpha > 0.0 && !a.aux_critic) {
      fail("train.alpha > 0 requires the auxiliary critic");
    }
  } else {
    fail("train.algorithm must be 'pearl' or 'pearlplus'");
  }

  if (t.n_train_tasks < 1 || t.n_test_tasks < 1 || t.k_collection_passes < 1 ||
      t.train_steps_per_iter < 1 || t.iterations < 1 || t.context_batch < 1 || t.rl_batch < 1) {
    fail("train: counts must be positive");
  }
  if (!(t.lr_encoder > 0.0 && t.lr_actor > 0.0 && t.lr_critic > 0.0)) {
    fail("train: learning rates must be positive");
  }
  if (!(t.tau > 0.0 && t.tau <= 1.0)) fail("train.tau must lie in (0,1]");
  if (t.buffer_capacity < 1) fail("train.buffer_capacity must be positive");
  if (a.alpha < 0.0) fail("train.alpha must be >= 0");
  if (a.kl_beta < 0.0) fail("train.kl_beta must be >= 0");
  if (a.latent_dim < 1) fail("train.latent_dim must be positive");
  if (!(a.discount > 0.0 && a.discount <= 1.0)) fail("train.discount must lie in (0,1]");
  if (!(a.reward_scale > 0.0)) fail("train.reward_scale must be positive");
  if (!(a.entropy_temperature > 0.0)) fail("train.entropy_temperature must be positive");
  if (a.n_critics < 1 || a.n_critics > 2) fail("train.n_critics must be 1 or 2");
  if (a.hidden.empty()) fail("train.hidden must be non-empty");
  for (int h : a.hidden) {
    if (h < 1) fail("train.hidden entries must be positive");
  }
}

void parse_eval(const json& j, ExperimentConfig& cfg) {
  ObjectReader r(j, "eval");
  r.read_int_list("budgets", cfg.eval.budgets);
  r.read_int("rollouts", cfg.eval.rollouts);
  r.read_int("workers", cfg.eval.workers);
  r.finish();
  if (cfg.eval.budgets.empty()) fail("eval.budgets must be non-empty");
  for (int b : cfg.eval.budgets) {
    if (b < 0) fail("eval.budgets entries must be >= 0");
  }
  if (cfg.eval.rollouts < 1) fail("eval.rollouts must be positive");
  if (cfg.eval.workers < 1) fail("eval.workers must be positive");
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("invalid JSON at " + line_col_of(text, e.byte) + ": " + e.what());
  }
  ExperimentConfig cfg;
  ObjectReader root(j, "config");
  const json& ver = root.require("config_version");
  if (!ver.is_number_integer() || ver.get<int>() != kConfigVersion) {
    fail("config_version must be " + std::to_string(kConfigVersion));
  }
  const json& seed = root.require("seed");
  if (!seed.is_number_integer() || seed.get<long long>() < 0) {
    fail("seed: expected a non-negative integer");
  }
  cfg.seed = seed.get<std::uint64_t>();
  root.read_string("output_dir", cfg.output_dir);
  parse_env(root.require("env"), cfg);
  if (const json* t = root.get("train")) parse_train(*t, cfg);
  if (const json* e = root.get("eval")) parse_eval(*e, cfg);
  root.finish();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

namespace {

json config_core_json(const ExperimentConfig& cfg) {
  json j;
  j["config_version"] = cfg.config_version;
  j["seed"] = cfg.seed;
  json env;
  env["family"] = family_to_string(cfg.family);
  if (cfg.family == EnvFamily::kPointVelocity) {
    const PointParams& p = cfg.env.point;
    env["dt"] = p.dt;
    env["horizon"] = p.horizon;
    env["accel_gain"] = p.accel_gain;
    env["pos_limit"] = p.pos_limit;
    env["vel_limit"] = p.vel_limit;
    env["healthy_bonus"] = p.healthy_bonus;
    env["target_speed_max"] = p.target_speed_max;
  } else {
    const MergeParams& p = cfg.env.merge;
    env["dt"] = p.dt;
    env["horizon"] = p.horizon;
    env["ramp_end"] = p.ramp_end;
    env["lane_width"] = p.lane_width;
    env["vehicle_length"] = p.vehicle_length;
    env["ego_start_speed"] = p.ego_start_speed;
    env["spawn_back"] = p.spawn_back;
    env["spawn_ahead"] = p.spawn_ahead;
    env["ego_accel"] = p.ego_accel;
    env["ego_decel"] = p.ego_decel;
    env["idm"] = {{"a_max", p.idm.a_max},     {"b_comfort", p.idm.b_comfort},
                  {"headway", p.idm.headway}, {"s0", p.idm.s0},
                  {"delta", p.idm.delta},     {"b_max", p.idm.b_max}};
    env["hidas"] = {{"dv", p.hidas.dv}, {"g_min", p.hidas.g_min}, {"c", p.hidas.c},
                    {"b_f", p.hidas.b_f}};
    env["reward"] = {{"alpha_r", p.reward.alpha_r},
                     {"beta_r", p.reward.beta_r},
                     {"gamma_r", p.reward.gamma_r},
                     {"r_collision", p.reward.r_collision},
                     {"r_action", p.reward.r_action}};
  }
  j["env"] = env;
  const TrainSettings& t = cfg.train;
  const AgentConfig& a = t.agent;
  j["train"] = {{"algorithm", t.algorithm},
                {"n_train_tasks", t.n_train_tasks},
                {"n_test_tasks", t.n_test_tasks},
                {"k_collection_passes", t.k_collection_passes},
                {"train_steps_per_iter", t.train_steps_per_iter},
                {"iterations", t.iterations},
                {"context_batch", t.context_batch},
                {"rl_batch", t.rl_batch},
                {"lr_encoder", t.lr_encoder},
                {"lr_actor", t.lr_actor},
                {"lr_critic", t.lr_critic},
                {"tau", t.tau},
                {"buffer_capacity", t.buffer_capacity},
                {"checkpoint_every", t.checkpoint_every},
                {"alpha", a.alpha},
                {"kl_beta", a.kl_beta},
                {"latent_dim", a.latent_dim},
                {"discount", a.discount},
                {"reward_scale", a.reward_scale},
                {"entropy_temperature", a.entropy_temperature},
                {"n_critics", a.n_critics},
                {"aux_critic", a.aux_critic},
                {"hidden", a.hidden},
                {"activation", activation_to_string(a.activation)}};
  return j;
}

}  // namespace

std::string config_to_canonical_json(const ExperimentConfig& cfg) {
  json j = config_core_json(cfg);
  j["output_dir"] = cfg.output_dir;
  j["eval"] = {{"budgets", cfg.eval.budgets},
               {"rollouts", cfg.eval.rollouts},
               {"workers", cfg.eval.workers}};
  return j.dump(2);
}

std::string config_identity_json(const ExperimentConfig& cfg) {
  return config_core_json(cfg).dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a64(config_identity_json(cfg));
}

}  // namespace pearlplus
