#pragma once

#include <utility>
#include <vector>

#include "pearlplus/rng.hpp"
#include "pearlplus/tensor.hpp"

namespace pearlplus {

// Diagonal Gaussian. `mean` and `var` share a shape: either {d} for a single
// distribution or {n, d} for a batch/stack of factors. Variances must be
// strictly positive.
struct DiagGaussian {
  Tensor mean;
  Tensor var;
};

void validate_diag_gaussian(const DiagGaussian& g);

// sample = mean + sqrt(var) * noise (reparameterized; gradients reach mean
// and var when they are tracked).
Tensor rsample(Tape& t, const DiagGaussian& dist, const Tensor& noise);

// Closed-form KL(q || p) for diagonal Gaussians of equal dimension.
Tensor kl_diag_gaussians(Tape& t, const DiagGaussian& q, const DiagGaussian& p);

// Precision-weighted product of Gaussian factors. Rows of {n, d} tensors are
// the factors; the result is a {d} Gaussian.
DiagGaussian product_of_gaussians(Tape& t, const Tensor& means, const Tensor& vars);
DiagGaussian product_of_gaussians(Tape& t, const std::vector<DiagGaussian>& factors);

// Log-density of `action` in (-1,1)^d under tanh(N(mean, var)), including the
// log-det Jacobian term sum log(1 - a^2). Batched form takes {n, d} inputs and
// returns {n}; the vector form returns a scalar.
Tensor squashed_gaussian_logprob_rows(Tape& t, const DiagGaussian& dist, const Tensor& actions);
Tensor squashed_gaussian_logprob(Tape& t, const DiagGaussian& dist, const Tensor& action);

// Log-density of a tanh-squashed reparameterized sample given its pre-squash
// value `u` (recorded on the tape). mean/log_std are {n, d}; result {n}.
Tensor squashed_logprob_from_presquash(Tape& t, const Tensor& mean, const Tensor& log_std,
                                       const Tensor& u);

inline constexpr double kSquashClamp = 1.0 - 1e-6;
inline constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

struct Categorical {
  Tensor logits;  // {n_actions}
};

// entropy = -sum p log p; logprob of `action`; both differentiable through
// the logits.
std::pair<Tensor, Tensor> categorical_entropy_and_logprob(Tape& t, const Categorical& dist,
                                                          int action);

std::vector<double> softmax_probs(const std::vector<double>& logits);
int sample_categorical(const std::vector<double>& logits, Rng& rng);
int argmax_index(const std::vector<double>& v);

}  // namespace pearlplus
