#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pearlplus/checkpoint.hpp"
#include "pearlplus/config.hpp"
#include "pearlplus/csv.hpp"
#include "pearlplus/meta.hpp"

namespace {

namespace fs = std::filesystem;
using namespace pearlplus;

// Timestamps are confined to this log file; every other output is
// byte-reproducible under a fixed seed.
class RunLog {
 public:
  explicit RunLog(const fs::path& path) : out_(path, std::ios::app) {}

  void line(const std::string& msg) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&tt));
    out_ << '[' << stamp << "] " << msg << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
};

ExperimentConfig load_with_overrides(const CommonOpts& opts) {
  ExperimentConfig cfg = load_config_file(opts.config_path);
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

int cmd_train(const CommonOpts& opts, const std::string& resume_path, int iterations_override) {
  ExperimentConfig cfg = load_with_overrides(opts);
  if (iterations_override > 0) cfg.train.iterations = iterations_override;
  fs::create_directories(cfg.output_dir);
  RunLog log(fs::path(cfg.output_dir) / "run.log");

  MetaTrainer trainer(cfg);
  bool resumed = false;
  if (!resume_path.empty()) {
    load_checkpoint(resume_path, trainer);
    resumed = true;
    log.line("resumed from " + resume_path + " at iteration " +
             std::to_string(trainer.iteration()));
  }

  std::ofstream(fs::path(cfg.output_dir) / "config_used.json") << config_to_canonical_json(cfg);

  const fs::path curve_path = fs::path(cfg.output_dir) / "training_curve.csv";
  std::ofstream curve(curve_path, resumed ? std::ios::app : std::ios::out);
  if (!resumed) {
    curve << "iteration,env_steps,mean_train_return,loss_critic,loss_actor,loss_value,loss_kl,"
             "loss_prior_critic\n";
  }

  const fs::path ckpt_path = fs::path(cfg.output_dir) / "checkpoint.bin";
  log.line("training starts: algorithm=" + cfg.train.algorithm +
           " iterations=" + std::to_string(cfg.train.iterations));
  trainer.run(cfg.train.iterations, [&](const MetaTrainer& tr, const LossBundle& b) {
    curve << tr.iteration() << ',' << tr.env_steps() << ','
          << format_double(tr.last_mean_train_return()) << ',' << format_double(b.critic) << ','
          << format_double(b.actor_combined) << ',' << format_double(b.value) << ','
          << format_double(b.kl) << ',' << format_double(b.prior_critic) << '\n';
    curve.flush();
    if (cfg.train.checkpoint_every > 0 && tr.iteration() % cfg.train.checkpoint_every == 0) {
      save_checkpoint(ckpt_path.string(), tr);
    }
    log.line("iteration " + std::to_string(tr.iteration()) + " done");
  });
  save_checkpoint(ckpt_path.string(), trainer);
  log.line("training finished");
  std::cout << "trained " << trainer.iteration() << " iterations, " << trainer.env_steps()
            << " env steps; checkpoint: " << ckpt_path.string() << '\n';
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& checkpoint_path,
             const std::vector<int>& budgets, int rollouts, int workers) {
  ExperimentConfig cfg = load_with_overrides(opts);
  if (!budgets.empty()) cfg.eval.budgets = budgets;
  if (rollouts >= 0) cfg.eval.rollouts = rollouts;
  if (workers > 0) cfg.eval.workers = workers;
  if (cfg.eval.rollouts < 1) {
    throw std::runtime_error("eval: --rollouts must be at least 1");
  }
  fs::create_directories(cfg.output_dir);
  RunLog log(fs::path(cfg.output_dir) / "run.log");

  MetaTrainer trainer(cfg);
  load_checkpoint(checkpoint_path, trainer);
  log.line("evaluating checkpoint " + checkpoint_path);

  AdaptationReport report =
      trainer.meta_test(cfg.eval, (fs::path(cfg.output_dir) / "traces").string());
  std::ofstream(fs::path(cfg.output_dir) / "report.csv") << report.to_csv();
  std::ofstream(fs::path(cfg.output_dir) / "report.json") << report.to_json();
  log.line("evaluation finished");
  for (int b : cfg.eval.budgets) {
    std::cout << "budget " << b << ": mean_return=" << format_double(report.budget_mean_return(b))
              << " failure_rate=" << format_double(report.budget_failure_rate(b)) << '\n';
  }
  std::cout << "reports written to " << cfg.output_dir << '\n';
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::vector<double>& alphas,
              const std::vector<long long>& seeds) {
  ExperimentConfig cfg = load_with_overrides(opts);
  std::vector<std::uint64_t> seed_list;
  for (long long s : seeds) {
    if (s < 0) throw std::runtime_error("sweep-alpha: seeds must be non-negative");
    seed_list.push_back(static_cast<std::uint64_t>(s));
  }
  if (seed_list.empty()) seed_list.push_back(cfg.seed);
  fs::create_directories(cfg.output_dir);
  RunLog log(fs::path(cfg.output_dir) / "run.log");
  log.line("alpha sweep starts");

  SweepResult result = alpha_sweep(cfg, alphas, seed_list, cfg.output_dir);

  std::ofstream table(fs::path(cfg.output_dir) / "sweep.csv");
  table << "alpha,seed,budget0_return,budget0_failure_rate,final_budget,final_return,"
           "final_failure_rate\n";
  for (const SweepRow& r : result.rows) {
    table << format_double(r.alpha) << ',' << r.seed << ',' << format_double(r.budget0_return)
          << ',' << format_double(r.budget0_failure_rate) << ',' << r.final_budget << ','
          << format_double(r.final_budget_return) << ','
          << format_double(r.final_budget_failure_rate) << '\n';
  }

  std::string summary = "alpha,median_budget0_return,median_budget0_failure_rate,"
                        "median_final_return,median_final_failure_rate\n";
  for (const SweepSummary& s : result.summaries) {
    summary += format_double(s.alpha) + ',' + format_double(s.median_budget0_return) + ',' +
               format_double(s.median_budget0_failure_rate) + ',' +
               format_double(s.median_final_return) + ',' +
               format_double(s.median_final_failure_rate) + '\n';
  }
  std::ofstream(fs::path(cfg.output_dir) / "sweep_summary.csv") << summary;
  log.line("alpha sweep finished");
  std::cout << summary;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-policy meta-RL toolkit: PEARL and PEARL+ with highway-merge and "
               "point-robot task families"};
  app.require_subcommand(1);

  CommonOpts train_opts;
  std::string resume_path;
  int iterations_override = 0;
  auto* train = app.add_subcommand("train", "Meta-train and write checkpoints + training curve");
  train->add_option("--config", train_opts.config_path, "experiment config (JSON)")->required();
  train->add_option("--seed", train_opts.seed, "override the config seed");
  train->add_option("--out", train_opts.out_dir, "override the output directory");
  train->add_option("--resume", resume_path, "checkpoint to resume from");
  train->add_option("--iterations", iterations_override, "override train.iterations");

  CommonOpts eval_opts;
  std::string checkpoint_path;
  std::vector<int> budgets;
  int rollouts = -1;
  int workers = 0;
  auto* eval = app.add_subcommand("eval", "Adaptation evaluation of a trained checkpoint");
  eval->add_option("--config", eval_opts.config_path, "experiment config (JSON)")->required();
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--seed", eval_opts.seed, "override the config seed");
  eval->add_option("--out", eval_opts.out_dir, "override the output directory");
  eval->add_option("--budgets", budgets, "adaptation budgets")->delimiter(',');
  eval->add_option("--rollouts", rollouts, "evaluation rollouts per cell");
  eval->add_option("--workers", workers, "parallel evaluation workers");

  CommonOpts sweep_opts;
  std::vector<double> alphas;
  std::vector<long long> sweep_seeds;
  auto* sweep = app.add_subcommand("sweep-alpha", "Trade-off study over the prior weight alpha");
  sweep->add_option("--config", sweep_opts.config_path, "experiment config (JSON)")->required();
  sweep->add_option("--alphas", alphas, "alpha values")->required()->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "seeds")->delimiter(',');
  sweep->add_option("--out", sweep_opts.out_dir, "override the output directory");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect-checkpoint", "Print a checkpoint summary");
  inspect->add_option("--checkpoint", inspect_path, "checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_opts, resume_path, iterations_override);
    if (eval->parsed()) return cmd_eval(eval_opts, checkpoint_path, budgets, rollouts, workers);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, alphas, sweep_seeds);
    if (inspect->parsed()) {
      std::cout << pearlplus::inspect_checkpoint(inspect_path) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
