#include "pearlplus/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pearlplus {

void validate_diag_gaussian(const DiagGaussian& g) {
  if (g.mean.shape != g.var.shape) {
    throw std::invalid_argument("DiagGaussian: mean/var shape mismatch");
  }
  ensure_finite(g.mean.data, "DiagGaussian mean");
  ensure_finite(g.var.data, "DiagGaussian var");
  for (double v : g.var.data) {
    if (!(v > 0.0)) throw std::invalid_argument("DiagGaussian: variance must be positive");
  }
}

Tensor rsample(Tape& t, const DiagGaussian& dist, const Tensor& noise) {
  if (noise.shape != dist.mean.shape) {
    throw std::invalid_argument("rsample: noise shape mismatch");
  }
  return add(t, dist.mean, mul(t, sqrt(t, dist.var), noise));
}

Tensor kl_diag_gaussians(Tape& t, const DiagGaussian& q, const DiagGaussian& p) {
  validate_diag_gaussian(q);
  validate_diag_gaussian(p);
  if (q.mean.shape != p.mean.shape) {
    throw std::invalid_argument("kl_diag_gaussians: dimension mismatch");
  }
  // 0.5 * sum[ log vp - log vq + (vq + (mq - mp)^2) / vp - 1 ]
  Tensor log_ratio = sub(t, log(t, p.var), log(t, q.var));
  Tensor diff2 = square(t, sub(t, q.mean, p.mean));
  Tensor frac = div(t, add(t, q.var, diff2), p.var);
  Tensor elems = add_scalar(t, add(t, log_ratio, frac), -1.0);
  return mul_scalar(t, sum_all(t, elems), 0.5);
}

DiagGaussian product_of_gaussians(Tape& t, const Tensor& means, const Tensor& vars) {
  if (means.shape.size() != 2 || means.shape != vars.shape) {
    throw std::invalid_argument("product_of_gaussians: expected matching {n,d} tensors");
  }
  if (means.shape[0] < 1) throw std::invalid_argument("product_of_gaussians: empty factor list");
  Tensor prec = reciprocal(t, vars);
  Tensor prec_sum = sum_rows(t, prec);
  Tensor weighted = sum_rows(t, mul(t, means, prec));
  DiagGaussian out;
  out.var = reciprocal(t, prec_sum);
  out.mean = mul(t, weighted, out.var);
  return out;
}

DiagGaussian product_of_gaussians(Tape& t, const std::vector<DiagGaussian>& factors) {
  if (factors.empty()) throw std::invalid_argument("product_of_gaussians: empty factor list");
  for (const auto& f : factors) validate_diag_gaussian(f);
  Tensor prec = reciprocal(t, factors[0].var);
  Tensor weighted = mul(t, factors[0].mean, prec);
  for (std::size_t i = 1; i < factors.size(); ++i) {
    if (factors[i].mean.shape != factors[0].mean.shape) {
      throw std::invalid_argument("product_of_gaussians: dimension mismatch");
    }
    Tensor pi = reciprocal(t, factors[i].var);
    prec = add(t, prec, pi);
    weighted = add(t, weighted, mul(t, factors[i].mean, pi));
  }
  DiagGaussian out;
  out.var = reciprocal(t, prec);
  out.mean = mul(t, weighted, out.var);
  return out;
}

namespace {

// atanh composed from tape ops so tracked actions keep their gradient
Tensor atanh_op(Tape& t, const Tensor& a) {
  Tensor num = add_scalar(t, a, 1.0);
  Tensor den = add_scalar(t, neg(t, a), 1.0);
  return mul_scalar(t, log(t, div(t, num, den)), 0.5);
}

Tensor gaussian_logprob_rows(Tape& t, const Tensor& mean, const Tensor& var, const Tensor& x) {
  // sum_d [ -0.5 log(2 pi) - 0.5 log var - (x - mean)^2 / (2 var) ]
  const int d = mean.cols();
  Tensor quad = div(t, square(t, sub(t, x, mean)), mul_scalar(t, var, 2.0));
  Tensor logvar_half = mul_scalar(t, log(t, var), 0.5);
  Tensor elems = neg(t, add(t, quad, logvar_half));
  return add_scalar(t, sum_cols(t, elems), -0.5 * kLogTwoPi * d);
}

}  // namespace

Tensor squashed_gaussian_logprob_rows(Tape& t, const DiagGaussian& dist, const Tensor& actions) {
  validate_diag_gaussian(dist);
  if (actions.shape != dist.mean.shape || actions.shape.size() != 2) {
    throw std::invalid_argument("squashed_gaussian_logprob_rows: expected {n,d} inputs");
  }
  Tensor a = clamp(t, actions, -kSquashClamp, kSquashClamp);
  Tensor u = atanh_op(t, a);
  Tensor base = gaussian_logprob_rows(t, dist.mean, dist.var, u);
  Tensor jac = sum_cols(t, log(t, add_scalar(t, neg(t, square(t, a)), 1.0)));
  return sub(t, base, jac);
}

Tensor squashed_gaussian_logprob(Tape& t, const DiagGaussian& dist, const Tensor& action) {
  if (dist.mean.shape.size() != 1 || action.shape != dist.mean.shape) {
    throw std::invalid_argument("squashed_gaussian_logprob: expected {d} inputs");
  }
  for (double a : action.data) {
    if (!(std::abs(a) < 1.0)) {
      throw std::invalid_argument("squashed_gaussian_logprob: action on or outside (-1,1)");
    }
  }
  const int d = action.shape[0];
  DiagGaussian rows;
  rows.mean = reshape(t, dist.mean, {1, d});
  rows.var = reshape(t, dist.var, {1, d});
  Tensor a = reshape(t, action, {1, d});
  return reshape(t, squashed_gaussian_logprob_rows(t, rows, a), {1});
}

Tensor squashed_logprob_from_presquash(Tape& t, const Tensor& mean, const Tensor& log_std,
                                       const Tensor& u) {
  if (mean.shape.size() != 2 || mean.shape != log_std.shape || mean.shape != u.shape) {
    throw std::invalid_argument("squashed_logprob_from_presquash: shape mismatch");
  }
  Tensor std_dev = exp(t, log_std);
  Tensor zscore = div(t, sub(t, u, mean), std_dev);
  Tensor elems = add(t, mul_scalar(t, square(t, zscore), 0.5), log_std);
  Tensor base = add_scalar(t, neg(t, sum_cols(t, elems)), -0.5 * kLogTwoPi * mean.cols());
  Tensor a = clamp(t, pearlplus::tanh(t, u), -kSquashClamp, kSquashClamp);
  Tensor jac = sum_cols(t, log(t, add_scalar(t, neg(t, square(t, a)), 1.0)));
  return sub(t, base, jac);
}

std::pair<Tensor, Tensor> categorical_entropy_and_logprob(Tape& t, const Categorical& dist,
                                                          int action) {
  if (dist.logits.shape.size() != 1) {
    throw std::invalid_argument("categorical: logits must be a vector");
  }
  const int n = dist.logits.shape[0];
  if (action < 0 || action >= n) {
    throw std::invalid_argument("categorical: action index out of range");
  }
  Tensor ls = log_softmax_rows(t, reshape(t, dist.logits, {1, n}));
  Tensor probs = exp(t, ls);
  Tensor entropy = neg(t, sum_all(t, mul(t, probs, ls)));
  Tensor logprob = reshape(t, slice_cols(t, ls, action, action + 1), {1});
  return {entropy, logprob};
}

std::vector<double> softmax_probs(const std::vector<double>& logits) {
  double mx = logits[0];
  for (double x : logits) mx = std::max(mx, x);
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    z += p[i];
  }
  for (auto& x : p) x /= z;
  return p;
}

int sample_categorical(const std::vector<double>& logits, Rng& rng) {
  auto p = softmax_probs(logits);
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

int argmax_index(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace pearlplus
