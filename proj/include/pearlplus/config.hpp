#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pearlplus/agent.hpp"
#include "pearlplus/envs/env.hpp"

namespace pearlplus {

inline constexpr int kConfigVersion = 1;

struct TrainSettings {
  std::string algorithm = "pearlplus";  // "pearl" or "pearlplus"
  int n_train_tasks = 10;
  int n_test_tasks = 5;
  int k_collection_passes = 2;
  int train_steps_per_iter = 200;
  int iterations = 20;
  int context_batch = 64;
  int rl_batch = 256;
  double lr_encoder = 3e-4;
  double lr_actor = 3e-4;
  double lr_critic = 3e-4;
  double tau = 0.005;
  std::size_t buffer_capacity = 100000;
  int checkpoint_every = 0;  // iterations between checkpoints; 0 = final only
  AgentConfig agent;
};

struct EvalSettings {
  std::vector<int> budgets = {0, 1, 3, 5};
  int rollouts = 20;
  int workers = 1;
};

struct ExperimentConfig {
  int config_version = kConfigVersion;
  std::uint64_t seed = 1;
  std::string output_dir = "pearlplus_out";
  EnvFamily family = EnvFamily::kPointVelocity;
  EnvParams env;
  TrainSettings train;
  EvalSettings eval;
};

// Strict parsing: unknown keys, missing required keys (config_version, seed,
// env.family), type errors, and family-inappropriate env keys are all errors
// with a line-precise or JSON-pointer diagnostic.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

std::string config_to_canonical_json(const ExperimentConfig& cfg);

// Canonical form of the training-identity subset (seed, env, train); the
// output directory and evaluation flags do not affect it.
std::string config_identity_json(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace pearlplus
