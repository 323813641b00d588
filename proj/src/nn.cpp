#include "pearlplus/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace pearlplus {

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string activation_to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

Mlp Mlp::make(const std::vector<int>& dims, Activation act, Rng& init_rng,
              double final_init_scale) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp::make: need at least in/out dims");
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("Mlp::make: dims must be positive");
  }
  Mlp net;
  net.dims_ = dims;
  net.act_ = act;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int d_in = dims[l], d_out = dims[l + 1];
    const bool last = l + 2 == dims.size();
    const double bound = last ? final_init_scale : 1.0 / std::sqrt(static_cast<double>(d_in));
    Layer layer;
    layer.w = Tensor::zeros({d_in, d_out});
    layer.b = Tensor::zeros({d_out});
    for (auto& x : layer.w.data) x = init_rng.uniform(-bound, bound);
    for (auto& x : layer.b.data) x = init_rng.uniform(-bound, bound);
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

Tensor Mlp::forward(Tape& tape, const Tensor& input, bool track_params) const {
  if (input.shape.size() != 2 || input.shape[1] != input_dim()) {
    throw std::invalid_argument("Mlp::forward: input width mismatch");
  }
  ensure_finite(input.data, "Mlp::forward input");
  Tensor x = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    Tensor w = track_params ? tape.leaf_shared(layer.w) : layer.w;
    Tensor b = track_params ? tape.leaf_shared(layer.b) : layer.b;
    x = add_rowvec(tape, matmul(tape, x, w), b);
    if (l + 1 < layers_.size()) {
      x = act_ == Activation::kRelu ? relu(tape, x) : pearlplus::tanh(tape, x);
    }
  }
  return x;
}

std::vector<Tensor*> Mlp::parameters() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

std::vector<const Tensor*> Mlp::parameters() const {
  std::vector<const Tensor*> out;
  for (const auto& l : layers_) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

AdamState AdamState::make(const std::vector<Tensor*>& params, double lr) {
  AdamState s;
  s.lr = lr;
  for (const Tensor* p : params) {
    s.m.emplace_back(p->size(), 0.0);
    s.v.emplace_back(p->size(), 0.0);
  }
  return s;
}

void adam_step(AdamState& state, const std::vector<Tensor*>& params,
               const std::vector<Tensor>& grads) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& g = grads[k];
    if (g.shape != p.shape) throw std::invalid_argument("adam_step: gradient shape mismatch");
    ensure_finite(g.data, "adam_step gradient");
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g.data[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g.data[i] * g.data[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

void soft_update(std::vector<Tensor*> target, const std::vector<const Tensor*>& source,
                 double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau out of (0,1]");
  if (target.size() != source.size()) {
    throw std::invalid_argument("soft_update: parameter count mismatch");
  }
  for (std::size_t k = 0; k < target.size(); ++k) {
    Tensor& t = *target[k];
    const Tensor& s = *source[k];
    if (t.shape != s.shape) throw std::invalid_argument("soft_update: shape mismatch");
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      t.data[i] = (1.0 - tau) * t.data[i] + tau * s.data[i];
    }
  }
}

}  // namespace pearlplus
