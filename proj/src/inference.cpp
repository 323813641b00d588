#include "pearlplus/inference.hpp"

#include <stdexcept>

namespace pearlplus {

int encoder_input_dim(int state_dim, int action_enc_dim) {
  return 2 * state_dim + action_enc_dim + 1;
}

ContextBatch ContextBatch::from_transitions(const std::vector<const Transition*>& transitions,
                                            int state_dim, int action_enc_dim, bool discrete) {
  if (transitions.empty()) {
    throw std::invalid_argument("ContextBatch: empty context (use the prior instead)");
  }
  const int n = static_cast<int>(transitions.size());
  const int width = encoder_input_dim(state_dim, action_enc_dim);
  Tensor inputs = Tensor::zeros({n, width});
  for (int i = 0; i < n; ++i) {
    const Transition& tr = *transitions[i];
    if (static_cast<int>(tr.state.size()) != state_dim ||
        static_cast<int>(tr.next_state.size()) != state_dim) {
      throw std::invalid_argument("ContextBatch: transition state width mismatch");
    }
    double* row = inputs.data.data() + static_cast<std::size_t>(i) * width;
    int k = 0;
    for (double s : tr.state) row[k++] = s;
    if (discrete) {
      if (tr.action.discrete < 0 || tr.action.discrete >= action_enc_dim) {
        throw std::invalid_argument("ContextBatch: discrete action out of range");
      }
      row[k + tr.action.discrete] = 1.0;
      k += action_enc_dim;
    } else {
      if (static_cast<int>(tr.action.continuous.size()) != action_enc_dim) {
        throw std::invalid_argument("ContextBatch: continuous action width mismatch");
      }
      for (double a : tr.action.continuous) row[k++] = a;
    }
    row[k++] = tr.reward;
    for (double s : tr.next_state) row[k++] = s;
  }
  ContextBatch out;
  out.inputs = std::move(inputs);
  return out;
}

LatentPosterior encode_posterior(Tape& tape, const ContextBatch& ctx, const Mlp& encoder,
                                 bool track_params) {
  if (ctx.inputs.shape.size() != 2 || ctx.inputs.shape[0] < 1) {
    throw std::invalid_argument("encode_posterior: empty context");
  }
  const int out_dim = encoder.output_dim();
  if (out_dim % 2 != 0) {
    throw std::invalid_argument("encode_posterior: encoder output must be 2*d_z");
  }
  const int dz = out_dim / 2;
  Tensor raw = encoder.forward(tape, ctx.inputs, track_params);
  Tensor means = slice_cols(tape, raw, 0, dz);
  Tensor vars = softplus(tape, slice_cols(tape, raw, dz, 2 * dz));
  LatentPosterior post;
  post.dist = product_of_gaussians(tape, means, vars);
  return post;
}

Tensor sample_prior(Rng& rng, int latent_dim) {
  return Tensor::vector(rng.normal_vec(static_cast<std::size_t>(latent_dim)));
}

LatentPosterior prior_posterior(int latent_dim) {
  LatentPosterior p;
  p.dist.mean = Tensor::zeros({latent_dim});
  p.dist.var = Tensor::full({latent_dim}, 1.0);
  return p;
}

Tensor kl_to_prior(Tape& tape, const LatentPosterior& post) {
  const int dz = static_cast<int>(post.dist.mean.size());
  DiagGaussian prior;
  prior.mean = Tensor::zeros({dz});
  prior.var = Tensor::full({dz}, 1.0);
  return kl_diag_gaussians(tape, post.dist, prior);
}

}  // namespace pearlplus
