#pragma once

#include <vector>

#include "pearlplus/distributions.hpp"
#include "pearlplus/nn.hpp"
#include "pearlplus/replay.hpp"

namespace pearlplus {

// Transitions from one task, densified into the encoder input layout
// (s, a, r, s') with discrete actions one-hot encoded.
struct ContextBatch {
  Tensor inputs;  // {n, 2*d_s + d_a_enc + 1}

  static ContextBatch from_transitions(const std::vector<const Transition*>& transitions,
                                       int state_dim, int action_enc_dim, bool discrete);
};

int encoder_input_dim(int state_dim, int action_enc_dim);

struct LatentPosterior {
  DiagGaussian dist;  // {d_z}
};

// Per-transition Gaussian factors from the encoder (variance through
// softplus), combined with a precision-weighted product. Permutation
// invariant in the transitions.
LatentPosterior encode_posterior(Tape& tape, const ContextBatch& ctx, const Mlp& encoder,
                                 bool track_params = true);

// z ~ N(0, I_dz); held constant within an episode by callers.
Tensor sample_prior(Rng& rng, int latent_dim);

LatentPosterior prior_posterior(int latent_dim);

// Closed-form KL(q || N(0, I)).
Tensor kl_to_prior(Tape& tape, const LatentPosterior& post);

}  // namespace pearlplus
