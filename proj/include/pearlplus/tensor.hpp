#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace pearlplus {

using Shape = std::vector<int>;

class Tape;

// Dense row-major tensor of doubles. `node >= 0` means the value is recorded
// on some tape and participates in reverse-mode differentiation.
struct Tensor {
  Shape shape;
  std::vector<double> data;
  int node = -1;

  Tensor() = default;
  Tensor(Shape s, std::vector<double> d);

  const void* tape_owner() const { return owner_; }
  void set_tape_owner(const void* t) { owner_ = t; }

  static Tensor zeros(const Shape& s);
  static Tensor full(const Shape& s, double v);
  static Tensor scalar(double v) { return Tensor({1}, {v}); }
  static Tensor vector(std::vector<double> v);
  static Tensor matrix(int rows, int cols, std::vector<double> v);

  std::size_t size() const { return data.size(); }
  bool tracked() const { return node >= 0; }
  bool is_scalar() const { return data.size() == 1; }
  double value() const;

  int rows() const;
  int cols() const;
  double& at(int r, int c);
  double at(int r, int c) const;

  Tensor detached() const;

 private:
  const void* owner_ = nullptr;
};

std::size_t shape_numel(const Shape& s);

// Append-only record of operations. Nodes are stored in topological order by
// construction; backward seeds the root and sweeps the node list in reverse,
// visiting each node once. A tape can be consumed by backward() exactly once.
class Tape {
 public:
  using BackwardFn = std::function<void(const std::vector<double>& upstream, Tape&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Track a fresh copy of `value` as a leaf. Each call makes a new node.
  Tensor leaf(const Tensor& value);

  // Track `param` as a leaf, keyed by its address: repeated calls within one
  // tape return the same node, so gradients from multiple uses accumulate.
  Tensor leaf_shared(const Tensor& param);

  bool has_leaf_for(const Tensor& param) const;

  int add_node(std::size_t numel, std::vector<int> parents, BackwardFn back);

  // Run reverse-mode accumulation from a tracked scalar root. May be called
  // only once per tape.
  void backward(const Tensor& root);

  bool consumed() const { return consumed_; }

  // Gradient of the root w.r.t. a tracked tensor (post-backward).
  Tensor grad(const Tensor& t) const;

  // Gradient of a shared-leaf parameter; zeros if the parameter never
  // appeared on this tape.
  Tensor grad_or_zero(const Tensor& param) const;

  std::vector<double>& grad_buf(int id);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    std::vector<int> parents;
    BackwardFn back;
    std::vector<double> grad;
    std::size_t numel = 0;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, int> shared_leaves_;
  bool consumed_ = false;
};

// ---- ops -------------------------------------------------------------
// Every op validates shapes, checks outputs for NaN/Inf, and records itself
// on the tape iff at least one input is tracked.

Tensor add(Tape& t, const Tensor& a, const Tensor& b);
Tensor sub(Tape& t, const Tensor& a, const Tensor& b);
Tensor mul(Tape& t, const Tensor& a, const Tensor& b);
Tensor div(Tape& t, const Tensor& a, const Tensor& b);
Tensor minimum(Tape& t, const Tensor& a, const Tensor& b);
Tensor neg(Tape& t, const Tensor& a);
Tensor add_scalar(Tape& t, const Tensor& a, double c);
Tensor mul_scalar(Tape& t, const Tensor& a, double c);

// rows of `m` plus vector `v` (bias add)
Tensor add_rowvec(Tape& t, const Tensor& m, const Tensor& v);
// repeat vector `v` as `rows` identical rows
Tensor tile_rows(Tape& t, const Tensor& v, int rows);

Tensor matmul(Tape& t, const Tensor& a, const Tensor& b);

Tensor relu(Tape& t, const Tensor& a);
Tensor tanh(Tape& t, const Tensor& a);
Tensor exp(Tape& t, const Tensor& a);
Tensor log(Tape& t, const Tensor& a);
Tensor sqrt(Tape& t, const Tensor& a);
Tensor square(Tape& t, const Tensor& a);
Tensor softplus(Tape& t, const Tensor& a);
Tensor reciprocal(Tape& t, const Tensor& a);
// clamp with zero gradient outside [lo, hi]
Tensor clamp(Tape& t, const Tensor& a, double lo, double hi);

Tensor sum_all(Tape& t, const Tensor& a);
Tensor mean_all(Tape& t, const Tensor& a);
Tensor sum_cols(Tape& t, const Tensor& m);  // row-wise sum: {r,c} -> {r}
Tensor sum_rows(Tape& t, const Tensor& m);  // column-wise sum: {r,c} -> {c}

Tensor log_softmax_rows(Tape& t, const Tensor& m);
Tensor slice_cols(Tape& t, const Tensor& m, int c0, int c1);
Tensor concat_cols(Tape& t, const std::vector<Tensor>& parts);
// out[i] = m[i, idx[i]]
Tensor select_cols(Tape& t, const Tensor& m, const std::vector<int>& idx);
Tensor reshape(Tape& t, const Tensor& a, Shape s);

void ensure_finite(const std::vector<double>& v, const char* op);

}  // namespace pearlplus
