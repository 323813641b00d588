#include "pearlplus/agent.hpp"

#include <cmath>
#include <stdexcept>

namespace pearlplus {

namespace {

std::vector<int> net_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims;
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

void append_params(std::vector<Tensor*>& out, std::vector<Tensor*> more) {
  out.insert(out.end(), more.begin(), more.end());
}

}  // namespace

AgentNets AgentNets::make(const EnvDims& dims, const AgentConfig& cfg, RngPool& rngs) {
  if (cfg.n_critics < 1 || cfg.n_critics > 2) {
    throw std::invalid_argument("AgentNets: n_critics must be 1 or 2");
  }
  AgentNets nets;
  nets.dims = dims;
  nets.cfg = cfg;
  const int ds = dims.state_dim, dz = cfg.latent_dim;
  const int actor_out = dims.discrete ? dims.n_actions : 2 * dims.action_dim;
  const int q_in = dims.discrete ? ds + dz : ds + dims.action_dim + dz;
  const int q_out = dims.discrete ? dims.n_actions : 1;

  nets.actor = Mlp::make(net_dims(ds + dz, cfg.hidden, actor_out), cfg.activation,
                         rngs.stream("init/actor"));
  for (int k = 0; k < cfg.n_critics; ++k) {
    nets.q.push_back(Mlp::make(net_dims(q_in, cfg.hidden, q_out), cfg.activation,
                               rngs.stream("init/q" + std::to_string(k))));
  }
  nets.value = Mlp::make(net_dims(ds + dz, cfg.hidden, 1), cfg.activation,
                         rngs.stream("init/value"));
  nets.value_target = nets.value;
  nets.encoder = Mlp::make(net_dims(encoder_input_dim(ds, dims.action_enc_dim()), cfg.hidden,
                                    2 * dz),
                           cfg.activation, rngs.stream("init/encoder"));
  if (cfg.aux_critic) {
    for (int k = 0; k < cfg.n_critics; ++k) {
      nets.q_aux.push_back(Mlp::make(net_dims(q_in, cfg.hidden, q_out), cfg.activation,
                                     rngs.stream("init/q_aux" + std::to_string(k))));
    }
  }
  return nets;
}

std::vector<Tensor*> AgentNets::critic_params() {
  std::vector<Tensor*> out;
  for (auto& net : q) append_params(out, net.parameters());
  append_params(out, value.parameters());
  return out;
}

std::vector<Tensor*> AgentNets::aux_params() {
  std::vector<Tensor*> out;
  for (auto& net : q_aux) append_params(out, net.parameters());
  return out;
}

std::vector<Tensor*> AgentNets::all_params() {
  std::vector<Tensor*> out;
  append_params(out, encoder.parameters());
  append_params(out, actor.parameters());
  for (auto& net : q) append_params(out, net.parameters());
  for (auto& net : q_aux) append_params(out, net.parameters());
  append_params(out, value.parameters());
  append_params(out, value_target.parameters());
  return out;
}

std::vector<const Tensor*> AgentNets::all_params() const {
  auto mut = const_cast<AgentNets*>(this)->all_params();
  return std::vector<const Tensor*>(mut.begin(), mut.end());
}

RlBatch RlBatch::from_transitions(const std::vector<const Transition*>& transitions,
                                  const EnvDims& dims) {
  if (transitions.empty()) throw std::invalid_argument("RlBatch: empty batch");
  const int b = static_cast<int>(transitions.size());
  RlBatch out;
  out.states = Tensor::zeros({b, dims.state_dim});
  out.next_states = Tensor::zeros({b, dims.state_dim});
  out.rewards = Tensor::zeros({b});
  out.not_terminal = Tensor::zeros({b});
  if (!dims.discrete) out.actions = Tensor::zeros({b, dims.action_dim});
  out.action_indices.resize(dims.discrete ? b : 0);
  for (int i = 0; i < b; ++i) {
    const Transition& tr = *transitions[i];
    for (int j = 0; j < dims.state_dim; ++j) {
      out.states.at(i, j) = tr.state[j];
      out.next_states.at(i, j) = tr.next_state[j];
    }
    if (dims.discrete) {
      out.action_indices[i] = tr.action.discrete;
    } else {
      for (int j = 0; j < dims.action_dim; ++j) out.actions.at(i, j) = tr.action.continuous[j];
    }
    out.rewards.data[i] = tr.reward;
    out.not_terminal.data[i] = tr.terminal ? 0.0 : 1.0;
  }
  return out;
}

namespace {

// r*scale + gamma*(1-d)*V_target(s', z); fully detached.
Tensor bellman_target(Tape& tape, const RlBatch& batch, const Tensor& z_values,
                      AgentNets& nets) {
  const int b = batch.size();
  Tensor zrow = tile_rows(tape, z_values.detached(), b);
  Tensor v_in = concat_cols(tape, {batch.next_states, zrow});
  Tensor vbar = reshape(tape, nets.value_target.forward(tape, v_in, /*track_params=*/false), {b});
  Tensor scaled_r = mul_scalar(tape, batch.rewards, nets.cfg.reward_scale);
  Tensor bootstrap = mul_scalar(tape, mul(tape, batch.not_terminal, vbar), nets.cfg.discount);
  return add(tape, scaled_r, bootstrap);
}

Tensor bellman_residual_loss(Tape& tape, const RlBatch& batch, const Tensor& z,
                             std::vector<Mlp>& critics, AgentNets& nets) {
  if (batch.size() == 0) throw std::invalid_argument("critic loss: empty batch");
  const int b = batch.size();
  Tensor y = bellman_target(tape, batch, z, nets);
  Tensor zrow = tile_rows(tape, z, b);
  Tensor loss = Tensor::scalar(0.0);
  for (Mlp& critic : critics) {
    Tensor qv;
    if (nets.dims.discrete) {
      Tensor q_in = concat_cols(tape, {batch.states, zrow});
      Tensor q_all = critic.forward(tape, q_in);
      qv = select_cols(tape, q_all, batch.action_indices);
    } else {
      Tensor q_in = concat_cols(tape, {batch.states, batch.actions, zrow});
      qv = reshape(tape, critic.forward(tape, q_in), {b});
    }
    loss = add(tape, loss, mean_all(tape, square(tape, sub(tape, qv, y))));
  }
  return loss;
}

struct PolicyEval {
  Tensor log_probs;  // {b, A} discrete
  Tensor probs;      // {b, A} discrete
  Tensor actions;    // {b, d_a} continuous (tanh-squashed)
  Tensor log_prob;   // {b} continuous
};

PolicyEval eval_policy(Tape& tape, const Tensor& states, const Tensor& zrow, AgentNets& nets,
                       bool track_actor, const Tensor* noise) {
  PolicyEval out;
  Tensor actor_in = concat_cols(tape, {states, zrow});
  Tensor head = nets.actor.forward(tape, actor_in, track_actor);
  if (nets.dims.discrete) {
    out.log_probs = log_softmax_rows(tape, head);
    out.probs = exp(tape, out.log_probs);
  } else {
    const int da = nets.dims.action_dim;
    if (noise == nullptr) {
      throw std::invalid_argument("continuous actor loss requires reparameterization noise");
    }
    Tensor mean = slice_cols(tape, head, 0, da);
    Tensor log_std =
        clamp(tape, slice_cols(tape, head, da, 2 * da), nets.cfg.log_std_min, nets.cfg.log_std_max);
    Tensor u = add(tape, mean, mul(tape, exp(tape, log_std), *noise));
    out.actions = pearlplus::tanh(tape, u);
    out.log_prob = squashed_logprob_from_presquash(tape, mean, log_std, u);
  }
  return out;
}

// min over the critic family, evaluated without tracking critic parameters
Tensor critic_min(Tape& tape, const Tensor& states, const Tensor& actions, const Tensor& zrow,
                  std::vector<Mlp>& critics, AgentNets& nets) {
  Tensor best;
  for (std::size_t k = 0; k < critics.size(); ++k) {
    Tensor qv;
    if (nets.dims.discrete) {
      Tensor q_in = concat_cols(tape, {states, zrow});
      qv = critics[k].forward(tape, q_in, /*track_params=*/false);
    } else {
      Tensor q_in = concat_cols(tape, {states, actions, zrow});
      qv = reshape(tape, critics[k].forward(tape, q_in, /*track_params=*/false),
                   {states.shape[0]});
    }
    best = k == 0 ? qv : minimum(tape, best, qv);
  }
  return best;
}

Tensor actor_branch(Tape& tape, const RlBatch& batch, const Tensor& z, std::vector<Mlp>& critics,
                    AgentNets& nets, bool gradient_stop_z, const Tensor* noise) {
  if (batch.size() == 0) throw std::invalid_argument("actor loss: empty batch");
  if (critics.empty()) throw std::invalid_argument("actor loss: no critics available");
  const int b = batch.size();
  const double temp = nets.cfg.entropy_temperature;
  Tensor zrow = tile_rows(tape, gradient_stop_z ? z.detached() : z, b);
  PolicyEval pol = eval_policy(tape, batch.states, zrow, nets, /*track_actor=*/true, noise);
  if (nets.dims.discrete) {
    Tensor q_all = critic_min(tape, batch.states, Tensor(), zrow, critics, nets);
    Tensor gap = sub(tape, mul_scalar(tape, pol.log_probs, temp), q_all);
    return mean_all(tape, sum_cols(tape, mul(tape, pol.probs, gap)));
  }
  Tensor q_new = critic_min(tape, batch.states, pol.actions, zrow, critics, nets);
  return mean_all(tape, sub(tape, mul_scalar(tape, pol.log_prob, temp), q_new));
}

}  // namespace

Tensor critic_loss(Tape& tape, const RlBatch& batch, const Tensor& z, AgentNets& nets) {
  return bellman_residual_loss(tape, batch, z, nets.q, nets);
}

Tensor prior_critic_loss(Tape& tape, const RlBatch& batch, const Tensor& z0, AgentNets& nets) {
  if (nets.q_aux.empty()) {
    throw std::logic_error("prior_critic_loss: auxiliary critics are disabled");
  }
  if (z0.tracked()) {
    throw std::invalid_argument("prior_critic_loss: z0 must be an untracked prior sample");
  }
  return bellman_residual_loss(tape, batch, z0, nets.q_aux, nets);
}

Tensor actor_loss(Tape& tape, const RlBatch& batch, const Tensor& z, AgentNets& nets,
                  bool gradient_stop_z, const Tensor* noise) {
  return actor_branch(tape, batch, z, nets.q, nets, gradient_stop_z, noise);
}

ActorLossParts actor_loss_parts(Tape& tape, const RlBatch& batch, const Tensor& z,
                                const Tensor& z0, double alpha, AgentNets& nets,
                                const Tensor* noise) {
  if (alpha < 0.0) throw std::invalid_argument("combined_actor_loss: alpha must be >= 0");
  ActorLossParts parts;
  parts.posterior = actor_branch(tape, batch, z, nets.q, nets, /*gradient_stop_z=*/true, noise);
  if (alpha == 0.0) {
    parts.combined = parts.posterior;
    return parts;
  }
  if (nets.q_aux.empty()) {
    throw std::logic_error("combined_actor_loss: prior branch needs the auxiliary critics");
  }
  parts.prior = actor_branch(tape, batch, z0, nets.q_aux, nets, /*gradient_stop_z=*/true, noise);
  parts.has_prior = true;
  parts.combined = add(tape, parts.posterior, mul_scalar(tape, parts.prior, alpha));
  return parts;
}

Tensor combined_actor_loss(Tape& tape, const RlBatch& batch, const Tensor& z, const Tensor& z0,
                           double alpha, AgentNets& nets, const Tensor* noise) {
  return actor_loss_parts(tape, batch, z, z0, alpha, nets, noise).combined;
}

Tensor value_loss(Tape& tape, const RlBatch& batch, const Tensor& z, AgentNets& nets,
                  const Tensor* noise) {
  if (batch.size() == 0) throw std::invalid_argument("value_loss: empty batch");
  const int b = batch.size();
  const double temp = nets.cfg.entropy_temperature;
  Tensor zrow = tile_rows(tape, z.detached(), b);

  // detached soft target E_pi[min Q - T log pi]
  PolicyEval pol = eval_policy(tape, batch.states, zrow, nets, /*track_actor=*/false, noise);
  Tensor target;
  if (nets.dims.discrete) {
    Tensor q_all = critic_min(tape, batch.states, Tensor(), zrow, nets.q, nets);
    Tensor inner = sub(tape, q_all, mul_scalar(tape, pol.log_probs, temp));
    target = sum_cols(tape, mul(tape, pol.probs, inner));
  } else {
    Tensor q_new = critic_min(tape, batch.states, pol.actions, zrow, nets.q, nets);
    target = sub(tape, q_new, mul_scalar(tape, pol.log_prob, temp));
  }

  Tensor v_in = concat_cols(tape, {batch.states, zrow});
  Tensor v = reshape(tape, nets.value.forward(tape, v_in), {b});
  return mean_all(tape, square(tape, sub(tape, v, target.detached())));
}

Action select_action(const AgentNets& nets, const std::vector<double>& obs, const Tensor& z,
                     Rng& rng, bool deterministic) {
  Tape scratch;
  const int ds = nets.dims.state_dim;
  if (static_cast<int>(obs.size()) != ds) {
    throw std::invalid_argument("select_action: observation width mismatch");
  }
  std::vector<double> row(obs);
  row.insert(row.end(), z.data.begin(), z.data.end());
  Tensor input = Tensor::matrix(1, ds + nets.cfg.latent_dim, std::move(row));
  Tensor head = nets.actor.forward(scratch, input, /*track_params=*/false);
  Action a;
  if (nets.dims.discrete) {
    a.discrete = deterministic ? argmax_index(head.data) : sample_categorical(head.data, rng);
  } else {
    const int da = nets.dims.action_dim;
    a.continuous.resize(da);
    for (int j = 0; j < da; ++j) {
      double u = head.data[j];
      if (!deterministic) {
        const double log_std =
            std::clamp(head.data[da + j], nets.cfg.log_std_min, nets.cfg.log_std_max);
        u += std::exp(log_std) * rng.normal();
      }
      a.continuous[j] = std::tanh(u);
    }
  }
  return a;
}

}  // namespace pearlplus
