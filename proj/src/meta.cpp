#include "pearlplus/meta.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "pearlplus/csv.hpp"

namespace pearlplus {

namespace {

EnvDims dims_for_family(EnvFamily family) {
  EnvDims d;
  if (family == EnvFamily::kMerge) {
    d.state_dim = kMergeObsDim;
    d.discrete = true;
    d.n_actions = kMergeActionCount;
    d.action_dim = 0;
  } else {
    d.state_dim = 4;
    d.discrete = false;
    d.n_actions = 0;
    d.action_dim = 2;
  }
  return d;
}

std::vector<Tensor> grads_from(const Tape& tape, std::vector<Tensor*> params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (Tensor* p : params) out.push_back(tape.grad_or_zero(*p));
  return out;
}

void write_tensor(std::ostream& os, const Tensor& t) {
  std::uint32_t nd = static_cast<std::uint32_t>(t.shape.size());
  os.write(reinterpret_cast<const char*>(&nd), sizeof(nd));
  for (int d : t.shape) {
    std::int32_t v = d;
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  std::uint64_t n = t.data.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  os.write(reinterpret_cast<const char*>(t.data.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
}

void read_tensor_into(std::istream& is, Tensor& t) {
  std::uint32_t nd = 0;
  is.read(reinterpret_cast<char*>(&nd), sizeof(nd));
  Shape shape(nd);
  for (auto& d : shape) {
    std::int32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    d = v;
  }
  std::uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (shape != t.shape || n != t.data.size()) {
    throw std::runtime_error("checkpoint: tensor shape mismatch with current configuration");
  }
  is.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
}

void write_adam(std::ostream& os, const AdamState& s) {
  std::int64_t step = s.step;
  os.write(reinterpret_cast<const char*>(&step), sizeof(step));
  std::uint64_t n = s.m.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (std::size_t k = 0; k < s.m.size(); ++k) {
    std::uint64_t len = s.m[k].size();
    os.write(reinterpret_cast<const char*>(&len), sizeof(len));
    os.write(reinterpret_cast<const char*>(s.m[k].data()),
             static_cast<std::streamsize>(len * sizeof(double)));
    os.write(reinterpret_cast<const char*>(s.v[k].data()),
             static_cast<std::streamsize>(len * sizeof(double)));
  }
}

void read_adam(std::istream& is, AdamState& s) {
  std::int64_t step = 0;
  is.read(reinterpret_cast<char*>(&step), sizeof(step));
  s.step = step;
  std::uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (n != s.m.size()) throw std::runtime_error("checkpoint: optimizer group size mismatch");
  for (std::size_t k = 0; k < s.m.size(); ++k) {
    std::uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (len != s.m[k].size()) {
      throw std::runtime_error("checkpoint: optimizer buffer size mismatch");
    }
    is.read(reinterpret_cast<char*>(s.m[k].data()),
            static_cast<std::streamsize>(len * sizeof(double)));
    is.read(reinterpret_cast<char*>(s.v[k].data()),
            static_cast<std::streamsize>(len * sizeof(double)));
  }
}

}  // namespace

RolloutResult run_episode(Env& env, const AgentNets& nets, const Tensor& z, Rng& env_rng,
                          Rng& action_rng, bool deterministic, bool build_trace) {
  RolloutResult out;
  Observation obs = env.reset(env_rng);
  bool done = false;
  while (!done) {
    Action a = select_action(nets, obs.vec, z, action_rng, deterministic);
    StepResult sr = env.step(a);
    const bool absorbing = sr.info.crashed || sr.info.unhealthy || sr.info.ramp_end_failure;
    Transition tr;
    tr.state = obs.vec;
    tr.action = a;
    tr.reward = sr.reward;
    tr.next_state = sr.obs.vec;
    tr.terminal = absorbing;
    out.transitions.push_back(std::move(tr));
    out.episode_return += sr.reward;
    if (sr.info.min_braking.has_value()) out.min_brakings.push_back(*sr.info.min_braking);
    if (build_trace) out.trace_rows.push_back(env.trace_row(out.steps, a, sr));
    out.failure = out.failure || env.is_failure(sr.info);
    out.steps += 1;
    obs = sr.obs;
    done = sr.terminal;
  }
  return out;
}

MetaTrainer::MetaTrainer(const ExperimentConfig& cfg)
    : cfg_(cfg), dims_(dims_for_family(cfg.family)), rngs_(cfg.seed) {
  Rng& task_rng = rngs_.stream("tasks");
  for (int i = 0; i < cfg_.train.n_train_tasks; ++i) {
    train_tasks_.push_back(sample_task(cfg_.family, task_rng, cfg_.env.point.target_speed_max));
  }
  for (int i = 0; i < cfg_.train.n_test_tasks; ++i) {
    test_tasks_.push_back(sample_task(cfg_.family, task_rng, cfg_.env.point.target_speed_max));
  }
  nets_ = AgentNets::make(dims_, cfg_.train.agent, rngs_);
  adam_encoder_ = AdamState::make(nets_.encoder_params(), cfg_.train.lr_encoder);
  adam_actor_ = AdamState::make(nets_.actor_params(), cfg_.train.lr_actor);
  adam_critic_ = AdamState::make(nets_.critic_params(), cfg_.train.lr_critic);
  adam_aux_ = AdamState::make(nets_.aux_params(), cfg_.train.lr_critic);
  for (int i = 0; i < cfg_.train.n_train_tasks; ++i) {
    buffers_.emplace_back(cfg_.train.buffer_capacity);
  }
}

std::unique_ptr<Env> MetaTrainer::make_task_env(const TaskSpec& task) const {
  return make_env(task, cfg_.env);
}

Tensor MetaTrainer::posterior_z_for_collection(int task_index) {
  TaskBuffer& buf = buffers_[task_index];
  if (buf.recent_size() == 0) {
    throw std::runtime_error("posterior collection requested with no recent context");
  }
  const std::string suffix = std::to_string(task_index);
  Rng& ctx_rng = rngs_.stream("collect_ctx/" + suffix);
  std::vector<const Transition*> ctx;
  for (int k = 0; k < cfg_.train.context_batch; ++k) ctx.push_back(&buf.sample_recent(ctx_rng));
  Tape scratch;
  ContextBatch cb =
      ContextBatch::from_transitions(ctx, dims_.state_dim, dims_.action_enc_dim(), dims_.discrete);
  LatentPosterior post = encode_posterior(scratch, cb, nets_.encoder, /*track_params=*/false);
  Tensor noise =
      Tensor::vector(rngs_.stream("collect_z/" + suffix).normal_vec(nets_.cfg.latent_dim));
  return rsample(scratch, post.dist, noise);
}

RolloutResult MetaTrainer::collect_rollout(int task_index, ZSource source) {
  if (task_index < 0 || task_index >= static_cast<int>(train_tasks_.size())) {
    throw std::invalid_argument("collect_rollout: bad task index");
  }
  const std::string suffix = std::to_string(task_index);
  Tensor z;
  if (source == ZSource::kPosterior) {
    z = posterior_z_for_collection(task_index);
  } else {
    z = sample_prior(rngs_.stream("collect_z/" + suffix), nets_.cfg.latent_dim);
  }
  TaskBuffer& buf = buffers_[task_index];
  buf.begin_pass();
  auto env = make_task_env(train_tasks_[task_index]);
  RolloutResult rr = run_episode(*env, nets_, z, rngs_.stream("env/" + suffix),
                                 rngs_.stream("policy/" + suffix), /*deterministic=*/false,
                                 /*build_trace=*/false);
  for (Transition& tr : rr.transitions) buf.push(std::move(tr));
  rr.transitions.clear();
  env_steps_ += static_cast<std::uint64_t>(rr.steps);
  return rr;
}

LossBundle MetaTrainer::train_iteration() {
  const AgentConfig& acfg = nets_.cfg;
  const int n_tasks = static_cast<int>(train_tasks_.size());
  const int dz = acfg.latent_dim;
  Rng& sampler = rngs_.stream("sampler");
  Rng& z_rng = rngs_.stream("z");

  Tape tape_c, tape_a, tape_v, tape_t;
  Tensor total_critic = Tensor::scalar(0.0);
  Tensor total_kl = Tensor::scalar(0.0);
  Tensor total_actor = Tensor::scalar(0.0);
  Tensor total_value = Tensor::scalar(0.0);
  Tensor total_aux = Tensor::scalar(0.0);
  LossBundle bundle;

  for (int i = 0; i < n_tasks; ++i) {
    TaskBuffer& buf = buffers_[i];
    if (buf.size() == 0) throw std::runtime_error("train_iteration: empty buffer for a task");

    std::vector<const Transition*> ctx_tr, rl_tr;
    for (int k = 0; k < cfg_.train.context_batch; ++k) ctx_tr.push_back(&buf.sample_recent(sampler));
    for (int k = 0; k < cfg_.train.rl_batch; ++k) rl_tr.push_back(&buf.sample_any(sampler));
    ContextBatch ctx = ContextBatch::from_transitions(ctx_tr, dims_.state_dim,
                                                      dims_.action_enc_dim(), dims_.discrete);
    RlBatch batch = RlBatch::from_transitions(rl_tr, dims_);
    const int b = batch.size();

    // posterior and critic losses live on the critic tape so that gradients
    // reach the encoder through z
    LatentPosterior post = encode_posterior(tape_c, ctx, nets_.encoder);
    Tensor z_noise = Tensor::vector(z_rng.normal_vec(dz));
    Tensor z = rsample(tape_c, post.dist, z_noise);
    Tensor z_val = z.detached();
    Tensor l_critic = critic_loss(tape_c, batch, z, nets_);
    Tensor l_kl = mul_scalar(tape_c, kl_to_prior(tape_c, post), acfg.kl_beta);
    total_critic = add(tape_c, total_critic, l_critic);
    total_kl = add(tape_c, total_kl, l_kl);

    Tensor z0;
    if (acfg.aux_critic) z0 = sample_prior(rngs_.stream("z0"), dz);

    Tensor noise;
    const Tensor* noise_ptr = nullptr;
    if (!dims_.discrete) {
      noise = Tensor::matrix(b, dims_.action_dim,
                             rngs_.stream("actor_noise").normal_vec(
                                 static_cast<std::size_t>(b) * dims_.action_dim));
      noise_ptr = &noise;
    }

    ActorLossParts actor_parts =
        actor_loss_parts(tape_a, batch, z_val, z0, acfg.alpha, nets_, noise_ptr);
    total_actor = add(tape_a, total_actor, actor_parts.combined);

    Tensor l_value = value_loss(tape_v, batch, z_val, nets_, noise_ptr);
    total_value = add(tape_v, total_value, l_value);

    if (acfg.aux_critic) {
      Tensor l_aux = prior_critic_loss(tape_t, batch, z0, nets_);
      total_aux = add(tape_t, total_aux, l_aux);
      bundle.prior_critic += l_aux.value();
    }

    bundle.critic += l_critic.value();
    bundle.kl += l_kl.value();
    bundle.actor_posterior += actor_parts.posterior.value();
    if (actor_parts.has_prior) bundle.actor_prior += actor_parts.prior.value();
    bundle.actor_combined += actor_parts.combined.value();
    bundle.value += l_value.value();
  }

  tape_c.backward(add(tape_c, total_critic, total_kl));
  tape_a.backward(total_actor);
  tape_v.backward(total_value);
  if (acfg.aux_critic) tape_t.backward(total_aux);

  // critic group: Q heads from the critic tape, value head from its own tape
  std::vector<Tensor> critic_grads;
  for (auto& net : nets_.q) {
    for (Tensor* p : net.parameters()) critic_grads.push_back(tape_c.grad_or_zero(*p));
  }
  for (Tensor* p : nets_.value.parameters()) critic_grads.push_back(tape_v.grad_or_zero(*p));

  // the four parameter-group updates, in order
  adam_step(adam_encoder_, nets_.encoder_params(), grads_from(tape_c, nets_.encoder_params()));
  adam_step(adam_actor_, nets_.actor_params(), grads_from(tape_a, nets_.actor_params()));
  adam_step(adam_critic_, nets_.critic_params(), critic_grads);
  updates_last_step_ = 3;
  if (acfg.aux_critic) {
    adam_step(adam_aux_, nets_.aux_params(), grads_from(tape_t, nets_.aux_params()));
    updates_last_step_ = 4;
  }

  soft_update(nets_.value_target.parameters(), std::as_const(nets_.value).parameters(),
              cfg_.train.tau);

  const double inv = 1.0 / n_tasks;
  bundle.critic *= inv;
  bundle.prior_critic *= inv;
  bundle.actor_posterior *= inv;
  bundle.actor_prior *= inv;
  bundle.actor_combined *= inv;
  bundle.kl *= inv;
  bundle.value *= inv;
  return bundle;
}

LossBundle MetaTrainer::run_iteration() {
  double total_return = 0.0;
  int episodes = 0;
  for (int i = 0; i < static_cast<int>(train_tasks_.size()); ++i) {
    for (int k = 0; k < cfg_.train.k_collection_passes; ++k) {
      RolloutResult rr = collect_rollout(i, k == 0 ? ZSource::kPrior : ZSource::kPosterior);
      total_return += rr.episode_return;
      episodes += 1;
    }
  }
  last_mean_train_return_ = total_return / episodes;

  LossBundle avg;
  for (int s = 0; s < cfg_.train.train_steps_per_iter; ++s) {
    LossBundle b = train_iteration();
    avg.critic += b.critic;
    avg.prior_critic += b.prior_critic;
    avg.actor_posterior += b.actor_posterior;
    avg.actor_prior += b.actor_prior;
    avg.actor_combined += b.actor_combined;
    avg.kl += b.kl;
    avg.value += b.value;
  }
  const double inv = 1.0 / cfg_.train.train_steps_per_iter;
  avg.critic *= inv;
  avg.prior_critic *= inv;
  avg.actor_posterior *= inv;
  avg.actor_prior *= inv;
  avg.actor_combined *= inv;
  avg.kl *= inv;
  avg.value *= inv;
  iteration_ += 1;
  return avg;
}

void MetaTrainer::run(int total_iterations, const IterationHook& per_iteration) {
  while (iteration_ < total_iterations) {
    LossBundle bundle = run_iteration();
    if (per_iteration) per_iteration(*this, bundle);
  }
}

AdaptationReport MetaTrainer::meta_test(const EvalSettings& eval,
                                        const std::string& trace_dir) const {
  if (eval.rollouts < 1) {
    throw std::invalid_argument("meta_test: evaluation needs at least one rollout");
  }
  const int dz = nets_.cfg.latent_dim;
  AdaptationReport report;
  const bool traces = !trace_dir.empty();
  if (traces) std::filesystem::create_directories(trace_dir);

  for (int j = 0; j < static_cast<int>(test_tasks_.size()); ++j) {
    const TaskSpec& task = test_tasks_[j];
    for (int budget : eval.budgets) {
      // exploration trajectories: first under the prior, then under the
      // posterior of everything gathered so far
      std::vector<Transition> context;
      for (int k = 0; k < budget; ++k) {
        const std::string name =
            "evalx/" + std::to_string(j) + "/" + std::to_string(budget) + "/" + std::to_string(k);
        Rng er(rngs_.derived_seed(name));
        Tensor z;
        if (k == 0 || context.empty()) {
          z = sample_prior(er, dz);
        } else {
          std::vector<const Transition*> ptrs;
          ptrs.reserve(context.size());
          for (const Transition& tr : context) ptrs.push_back(&tr);
          Tape scratch;
          ContextBatch cb = ContextBatch::from_transitions(ptrs, dims_.state_dim,
                                                           dims_.action_enc_dim(), dims_.discrete);
          LatentPosterior post = encode_posterior(scratch, cb, nets_.encoder, false);
          Tensor noise = Tensor::vector(er.normal_vec(dz));
          z = rsample(scratch, post.dist, noise);
        }
        auto env = make_task_env(task);
        RolloutResult rr = run_episode(*env, nets_, z, er, er, /*deterministic=*/false, false);
        for (Transition& tr : rr.transitions) context.push_back(std::move(tr));
      }

      LatentPosterior post = prior_posterior(dz);
      if (budget > 0 && !context.empty()) {
        std::vector<const Transition*> ptrs;
        ptrs.reserve(context.size());
        for (const Transition& tr : context) ptrs.push_back(&tr);
        Tape scratch;
        ContextBatch cb = ContextBatch::from_transitions(ptrs, dims_.state_dim,
                                                         dims_.action_enc_dim(), dims_.discrete);
        post = encode_posterior(scratch, cb, nets_.encoder, false);
      }

      // evaluation rollouts are independent given the posterior; order-free
      std::vector<RolloutResult> results(eval.rollouts);
      auto eval_one = [&](int r) {
        const std::string name =
            "eval/" + std::to_string(j) + "/" + std::to_string(budget) + "/" + std::to_string(r);
        Rng rng(rngs_.derived_seed(name));
        Tensor noise = Tensor::vector(rng.normal_vec(dz));
        Tape scratch;
        Tensor z = rsample(scratch, post.dist, noise);
        auto env = make_task_env(task);
        results[r] = run_episode(*env, nets_, z, rng, rng, /*deterministic=*/true, traces);
      };
      if (eval.workers > 1) {
        std::vector<std::future<void>> futs;
        std::atomic<int> next{0};
        const int workers = std::min(eval.workers, eval.rollouts);
        for (int w = 0; w < workers; ++w) {
          futs.push_back(std::async(std::launch::async, [&]() {
            for (int r = next.fetch_add(1); r < eval.rollouts; r = next.fetch_add(1)) eval_one(r);
          }));
        }
        for (auto& f : futs) f.get();
      } else {
        for (int r = 0; r < eval.rollouts; ++r) eval_one(r);
      }

      EvalCell cell;
      cell.task_index = j;
      cell.budget = budget;
      cell.n_rollouts = eval.rollouts;
      for (const RolloutResult& rr : results) {
        cell.mean_return += rr.episode_return;
        cell.n_failures += rr.failure ? 1 : 0;
        cell.min_brakings.insert(cell.min_brakings.end(), rr.min_brakings.begin(),
                                 rr.min_brakings.end());
      }
      cell.mean_return /= eval.rollouts;
      cell.failure_rate = static_cast<double>(cell.n_failures) / eval.rollouts;
      report.cells.push_back(cell);

      if (traces) {
        auto env = make_task_env(task);
        std::ofstream out(std::filesystem::path(trace_dir) /
                          ("trace_task" + std::to_string(j) + "_budget" + std::to_string(budget) +
                           ".csv"));
        out << "rollout," << env->trace_header() << '\n';
        for (int r = 0; r < eval.rollouts; ++r) {
          for (const std::string& row : results[r].trace_rows) {
            out << r << ',' << row << '\n';
          }
        }
      }
    }
  }
  return report;
}

void MetaTrainer::save_state(std::ostream& os) const {
  for (const Tensor* p : nets_.all_params()) write_tensor(os, *p);
  write_adam(os, adam_encoder_);
  write_adam(os, adam_actor_);
  write_adam(os, adam_critic_);
  write_adam(os, adam_aux_);
  rngs_.save(os);
  std::uint64_t nbuf = buffers_.size();
  os.write(reinterpret_cast<const char*>(&nbuf), sizeof(nbuf));
  for (const TaskBuffer& b : buffers_) b.save(os);
  std::int64_t it = iteration_;
  os.write(reinterpret_cast<const char*>(&it), sizeof(it));
  os.write(reinterpret_cast<const char*>(&env_steps_), sizeof(env_steps_));
  os.write(reinterpret_cast<const char*>(&last_mean_train_return_),
           sizeof(last_mean_train_return_));
}

void MetaTrainer::load_state(std::istream& is) {
  for (Tensor* p : nets_.all_params()) read_tensor_into(is, *p);
  read_adam(is, adam_encoder_);
  read_adam(is, adam_actor_);
  read_adam(is, adam_critic_);
  read_adam(is, adam_aux_);
  rngs_.load(is);
  std::uint64_t nbuf = 0;
  is.read(reinterpret_cast<char*>(&nbuf), sizeof(nbuf));
  if (nbuf != buffers_.size()) throw std::runtime_error("checkpoint: buffer count mismatch");
  for (TaskBuffer& b : buffers_) b.load(is);
  std::int64_t it = 0;
  is.read(reinterpret_cast<char*>(&it), sizeof(it));
  iteration_ = static_cast<int>(it);
  is.read(reinterpret_cast<char*>(&env_steps_), sizeof(env_steps_));
  is.read(reinterpret_cast<char*>(&last_mean_train_return_), sizeof(last_mean_train_return_));
  if (!is) throw std::runtime_error("checkpoint: truncated state");
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SweepResult alpha_sweep(const ExperimentConfig& base, const std::vector<double>& alphas,
                        const std::vector<std::uint64_t>& seeds, const std::string& out_dir) {
  if (alphas.empty() || seeds.empty()) {
    throw std::invalid_argument("alpha_sweep: need at least one alpha and one seed");
  }
  for (double a : alphas) {
    if (a < 0.0) throw std::invalid_argument("alpha_sweep: negative alpha");
  }
  SweepResult result;
  int final_budget = 0;
  for (int b : base.eval.budgets) final_budget = std::max(final_budget, b);

  for (double alpha : alphas) {
    for (std::uint64_t seed : seeds) {
      ExperimentConfig cfg = base;
      cfg.seed = seed;
      cfg.train.agent.alpha = alpha;
      if (alpha == 0.0) {
        cfg.train.algorithm = "pearl";
        cfg.train.agent.aux_critic = false;
      } else {
        cfg.train.algorithm = "pearlplus";
        cfg.train.agent.aux_critic = true;
      }

      std::string run_dir;
      std::ofstream curve;
      if (!out_dir.empty()) {
        run_dir = out_dir + "/alpha_" + format_double(alpha) + "/seed_" + std::to_string(seed);
        std::filesystem::create_directories(run_dir);
        curve.open(run_dir + "/training_curve.csv");
        curve << "iteration,env_steps,mean_train_return,loss_critic,loss_actor,loss_value,"
                 "loss_kl,loss_prior_critic\n";
      }

      MetaTrainer trainer(cfg);
      trainer.run(cfg.train.iterations, [&](const MetaTrainer& tr, const LossBundle& b) {
        if (curve.is_open()) {
          curve << tr.iteration() << ',' << tr.env_steps() << ','
                << format_double(tr.last_mean_train_return()) << ',' << format_double(b.critic)
                << ',' << format_double(b.actor_combined) << ',' << format_double(b.value) << ','
                << format_double(b.kl) << ',' << format_double(b.prior_critic) << '\n';
        }
      });

      AdaptationReport report =
          trainer.meta_test(base.eval, run_dir.empty() ? std::string() : run_dir + "/traces");
      if (!run_dir.empty()) {
        std::ofstream(run_dir + "/report.csv") << report.to_csv();
        std::ofstream(run_dir + "/report.json") << report.to_json();
      }

      SweepRow row;
      row.alpha = alpha;
      row.seed = seed;
      row.budget0_return = report.budget_mean_return(0);
      row.budget0_failure_rate = report.budget_failure_rate(0);
      row.final_budget = final_budget;
      row.final_budget_return = report.budget_mean_return(final_budget);
      row.final_budget_failure_rate = report.budget_failure_rate(final_budget);
      result.rows.push_back(row);
    }

    SweepSummary summary;
    summary.alpha = alpha;
    std::vector<double> r0, f0, rf, ff;
    for (const SweepRow& row : result.rows) {
      if (row.alpha != alpha) continue;
      r0.push_back(row.budget0_return);
      f0.push_back(row.budget0_failure_rate);
      rf.push_back(row.final_budget_return);
      ff.push_back(row.final_budget_failure_rate);
    }
    summary.median_budget0_return = median(r0);
    summary.median_budget0_failure_rate = median(f0);
    summary.median_final_return = median(rf);
    summary.median_final_failure_rate = median(ff);
    result.summaries.push_back(summary);
  }
  return result;
}

}  // namespace pearlplus
