#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pearlplus/agent.hpp"
#include "pearlplus/config.hpp"
#include "pearlplus/meta_report.hpp"
#include "pearlplus/replay.hpp"

namespace pearlplus {

enum class ZSource { kPrior, kPosterior };

struct RolloutResult {
  double episode_return = 0.0;
  int steps = 0;
  bool failure = false;
  std::vector<Transition> transitions;
  std::vector<double> min_brakings;
  std::vector<std::string> trace_rows;
};

// One episode with z held constant throughout. `absorbing` terminals (crash,
// unhealthy, ramp end) are stored on the transition; time-limit ends are not,
// so bootstrapping continues across them.
RolloutResult run_episode(Env& env, const AgentNets& nets, const Tensor& z, Rng& env_rng,
                          Rng& action_rng, bool deterministic, bool build_trace);

class MetaTrainer {
 public:
  explicit MetaTrainer(const ExperimentConfig& cfg);

  // Collection pass for one train task: draw z once (prior, or posterior
  // inferred from the recent-batch region), roll one episode, append to the
  // task buffer.
  RolloutResult collect_rollout(int task_index, ZSource source);

  // One gradient step of the meta-training inner loop: per task sample a
  // context batch (recent region) and an RL batch (whole buffer), build all
  // losses, then apply the four parameter-group updates in order (encoder,
  // actor, critics+value, auxiliary critics).
  LossBundle train_iteration();

  // Collection phase (K passes per task; pass 1 under the prior) followed by
  // train_steps_per_iter gradient steps.
  LossBundle run_iteration();

  // Runs until `total_iterations` outer iterations have completed, invoking
  // `per_iteration` after each.
  using IterationHook = std::function<void(const MetaTrainer&, const LossBundle&)>;
  void run(int total_iterations, const IterationHook& per_iteration = nullptr);

  // Meta-testing over the held-out tasks. Budget 0 evaluates the prior
  // policy; budget n collects n exploration trajectories (first under the
  // prior, later ones under the running posterior), infers the posterior from
  // everything gathered, then evaluates. Does not mutate training state.
  AdaptationReport meta_test(const EvalSettings& eval,
                             const std::string& trace_dir = std::string()) const;

  const ExperimentConfig& config() const { return cfg_; }
  const std::vector<TaskSpec>& train_tasks() const { return train_tasks_; }
  const std::vector<TaskSpec>& test_tasks() const { return test_tasks_; }
  AgentNets& nets() { return nets_; }
  const AgentNets& nets() const { return nets_; }
  const EnvDims& dims() const { return dims_; }
  int iteration() const { return iteration_; }
  std::uint64_t env_steps() const { return env_steps_; }
  double last_mean_train_return() const { return last_mean_train_return_; }
  int updates_in_last_train_iteration() const { return updates_last_step_; }
  std::vector<TaskBuffer>& buffers() { return buffers_; }
  RngPool& rng_pool() { return rngs_; }

  void save_state(std::ostream& os) const;
  void load_state(std::istream& is);

 private:
  std::unique_ptr<Env> make_task_env(const TaskSpec& task) const;
  Tensor posterior_z_for_collection(int task_index);

  ExperimentConfig cfg_;
  EnvDims dims_;
  RngPool rngs_;
  std::vector<TaskSpec> train_tasks_;
  std::vector<TaskSpec> test_tasks_;
  AgentNets nets_;
  AdamState adam_encoder_;
  AdamState adam_actor_;
  AdamState adam_critic_;
  AdamState adam_aux_;
  std::vector<TaskBuffer> buffers_;
  std::uint64_t env_steps_ = 0;
  int iteration_ = 0;
  double last_mean_train_return_ = 0.0;
  int updates_last_step_ = 0;
};

struct SweepRow {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double budget0_return = 0.0;
  double budget0_failure_rate = 0.0;
  double final_budget_return = 0.0;
  double final_budget_failure_rate = 0.0;
  int final_budget = 0;
};

struct SweepSummary {
  double alpha = 0.0;
  double median_budget0_return = 0.0;
  double median_budget0_failure_rate = 0.0;
  double median_final_return = 0.0;
  double median_final_failure_rate = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;          // one per (alpha, seed)
  std::vector<SweepSummary> summaries; // medians across seeds, per alpha
};

// Full meta-train + meta-test per (alpha, seed) on a fixed task set. alpha=0
// runs the plain-PEARL configuration. When out_dir is non-empty, per-run
// artifacts (training curve, reports, traces) are persisted beneath it.
SweepResult alpha_sweep(const ExperimentConfig& base, const std::vector<double>& alphas,
                        const std::vector<std::uint64_t>& seeds,
                        const std::string& out_dir = std::string());

double median(std::vector<double> values);

}  // namespace pearlplus
