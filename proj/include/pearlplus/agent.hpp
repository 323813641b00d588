#pragma once

#include <vector>

#include "pearlplus/distributions.hpp"
#include "pearlplus/inference.hpp"
#include "pearlplus/nn.hpp"
#include "pearlplus/replay.hpp"

namespace pearlplus {

struct EnvDims {
  int state_dim = 0;
  bool discrete = false;
  int n_actions = 0;  // discrete
  int action_dim = 0; // continuous
  int action_enc_dim() const { return discrete ? n_actions : action_dim; }
};

struct AgentConfig {
  int latent_dim = 5;
  double discount = 0.99;
  double reward_scale = 5.0;
  double entropy_temperature = 1.0;
  double alpha = 0.1;    // weight of the prior-context actor term
  double kl_beta = 0.1;  // weight of the KL regularizer
  int n_critics = 2;     // twin critics by default; 1 for the single-critic variant
  bool aux_critic = true;
  std::vector<int> hidden = {64, 64, 64};
  Activation activation = Activation::kRelu;
  double log_std_min = -20.0;
  double log_std_max = 2.0;
};

// Actor, twin critics, auxiliary prior-context critics, value net with its
// target copy, and the context encoder. The auxiliary critics have parameters
// disjoint from the main critics.
struct AgentNets {
  EnvDims dims;
  AgentConfig cfg;
  Mlp actor;
  std::vector<Mlp> q;
  std::vector<Mlp> q_aux;
  Mlp value;
  Mlp value_target;
  Mlp encoder;

  static AgentNets make(const EnvDims& dims, const AgentConfig& cfg, RngPool& rngs);

  std::vector<Tensor*> encoder_params() { return encoder.parameters(); }
  std::vector<Tensor*> actor_params() { return actor.parameters(); }
  // value head rides with the critic group: one grouped update per training step
  std::vector<Tensor*> critic_params();
  std::vector<Tensor*> aux_params();
  std::vector<Tensor*> all_params();
  std::vector<const Tensor*> all_params() const;
};

struct RlBatch {
  Tensor states;        // {b, d_s}
  Tensor next_states;   // {b, d_s}
  Tensor actions;       // {b, d_a}, continuous families
  std::vector<int> action_indices;  // discrete families
  Tensor rewards;       // {b}
  Tensor not_terminal;  // {b}

  int size() const { return states.shape.empty() ? 0 : states.shape[0]; }
  static RlBatch from_transitions(const std::vector<const Transition*>& transitions,
                                  const EnvDims& dims);
};

// Bellman residual on Q(s,a,z) against r + gamma * (1-d) * V_target(s', z_bar).
// Gradients reach the critics and, through z, the encoder; never the target.
Tensor critic_loss(Tape& tape, const RlBatch& batch, const Tensor& z, AgentNets& nets);

// Same residual on the auxiliary critics under prior context z0; by
// construction no gradient can reach the encoder.
Tensor prior_critic_loss(Tape& tape, const RlBatch& batch, const Tensor& z0, AgentNets& nets);

// SAC-style actor loss E[T*log pi - min Q] with the given critic family.
// `noise` is the {b, d_a} reparameterization noise (continuous families).
Tensor actor_loss(Tape& tape, const RlBatch& batch, const Tensor& z, AgentNets& nets,
                  bool gradient_stop_z, const Tensor* noise);

// actor_loss(batch, z) + alpha * actor_loss(batch, z0) with the prior branch
// evaluated on the auxiliary critics. At alpha == 0 this is exactly the
// posterior branch. Both branches share `noise`.
Tensor combined_actor_loss(Tape& tape, const RlBatch& batch, const Tensor& z, const Tensor& z0,
                           double alpha, AgentNets& nets, const Tensor* noise);

struct ActorLossParts {
  Tensor posterior;
  Tensor prior;  // valid only when has_prior
  Tensor combined;
  bool has_prior = false;
};

// Both actor branches at once (the prior branch only when alpha > 0).
ActorLossParts actor_loss_parts(Tape& tape, const RlBatch& batch, const Tensor& z,
                                const Tensor& z0, double alpha, AgentNets& nets,
                                const Tensor* noise);

// Squared residual between V(s, z_bar) and the detached soft value target
// E_pi[min Q - T*log pi].
Tensor value_loss(Tape& tape, const RlBatch& batch, const Tensor& z, AgentNets& nets,
                  const Tensor* noise);

struct LossBundle {
  double critic = 0.0;
  double prior_critic = 0.0;
  double actor_posterior = 0.0;
  double actor_prior = 0.0;
  double actor_combined = 0.0;
  double kl = 0.0;
  double value = 0.0;
};

// Action selection for rollouts; never records on the scratch tape.
Action select_action(const AgentNets& nets, const std::vector<double>& obs, const Tensor& z,
                     Rng& rng, bool deterministic);

}  // namespace pearlplus
