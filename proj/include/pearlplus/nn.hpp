#pragma once

#include <string>
#include <vector>

#include "pearlplus/rng.hpp"
#include "pearlplus/tensor.hpp"

namespace pearlplus {

enum class Activation { kRelu, kTanh };

Activation activation_from_string(const std::string& s);
std::string activation_to_string(Activation a);

// Fully connected network. Weights are {d_in, d_out}, biases {d_out}.
class Mlp {
 public:
  struct Layer {
    Tensor w;
    Tensor b;
  };

  Mlp() = default;

  // dims = [d_in, hidden..., d_out]. Hidden layers use `act`; the output
  // layer is linear. Final-layer weights are drawn from a narrower range so
  // fresh heads start near zero.
  static Mlp make(const std::vector<int>& dims, Activation act, Rng& init_rng,
                  double final_init_scale = 3e-3);

  // Forward pass over a {batch, d_in} input. With track_params the layer
  // parameters are registered as shared leaves on `tape`; otherwise only
  // gradients through `input` (if tracked) survive.
  Tensor forward(Tape& tape, const Tensor& input, bool track_params = true) const;

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  std::size_t parameter_count() const;

  const std::vector<int>& dims() const { return dims_; }
  Activation activation() const { return act_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

 private:
  std::vector<int> dims_;
  Activation act_ = Activation::kRelu;
  std::vector<Layer> layers_;
};

// Adam optimizer state for one parameter group.
struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  static AdamState make(const std::vector<Tensor*>& params, double lr);
};

// One bias-corrected Adam update. `grads` must shape-match `params`.
void adam_step(AdamState& state, const std::vector<Tensor*>& params,
               const std::vector<Tensor>& grads);

// target <- (1 - tau) * target + tau * source, elementwise. tau in (0, 1].
void soft_update(std::vector<Tensor*> target, const std::vector<const Tensor*>& source,
                 double tau);

}  // namespace pearlplus
