#include "pearlplus/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pearlplus {

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) {
    if (d < 0) throw std::invalid_argument("negative dimension in shape");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

void ensure_finite(const std::vector<double>& v, const char* op) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(std::string("non-finite value produced by ") + op);
    }
  }
}

Tensor::Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
  if (shape_numel(shape) != data.size()) {
    throw std::invalid_argument("tensor shape does not match data length");
  }
}

Tensor Tensor::zeros(const Shape& s) { return Tensor(s, std::vector<double>(shape_numel(s), 0.0)); }

Tensor Tensor::full(const Shape& s, double v) {
  return Tensor(s, std::vector<double>(shape_numel(s), v));
}

Tensor Tensor::vector(std::vector<double> v) {
  int n = static_cast<int>(v.size());
  return Tensor({n}, std::move(v));
}

Tensor Tensor::matrix(int rows, int cols, std::vector<double> v) {
  return Tensor({rows, cols}, std::move(v));
}

double Tensor::value() const {
  if (!is_scalar()) throw std::invalid_argument("Tensor::value on non-scalar tensor");
  return data[0];
}

int Tensor::rows() const {
  if (shape.size() != 2) throw std::invalid_argument("Tensor::rows on non-matrix");
  return shape[0];
}

int Tensor::cols() const {
  if (shape.size() != 2) throw std::invalid_argument("Tensor::cols on non-matrix");
  return shape[1];
}

double& Tensor::at(int r, int c) {
  return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols()) + c];
}

double Tensor::at(int r, int c) const {
  return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols()) + c];
}

Tensor Tensor::detached() const {
  Tensor out;
  out.shape = shape;
  out.data = data;
  return out;
}

// ---- tape ------------------------------------------------------------

namespace {

// Whether `x` participates in differentiation on tape `t`. A tracked tensor
// from another tape is a hard usage error.
bool tracked_on(const Tape& t, const Tensor& x) {
  if (!x.tracked()) return false;
  if (x.tape_owner() != &t) {
    throw std::invalid_argument("tensor is recorded on a different tape");
  }
  return true;
}

}  // namespace

Tensor Tape::leaf(const Tensor& value) {
  ensure_finite(value.data, "leaf");
  Tensor out = value.detached();
  out.node = add_node(out.size(), {}, nullptr);
  out.set_tape_owner(this);
  return out;
}

Tensor Tape::leaf_shared(const Tensor& param) {
  auto it = shared_leaves_.find(&param);
  if (it == shared_leaves_.end()) {
    ensure_finite(param.data, "leaf");
    int id = add_node(param.size(), {}, nullptr);
    it = shared_leaves_.emplace(&param, id).first;
  }
  Tensor out = param.detached();
  out.node = it->second;
  out.set_tape_owner(this);
  return out;
}

bool Tape::has_leaf_for(const Tensor& param) const {
  return shared_leaves_.count(&param) > 0;
}

int Tape::add_node(std::size_t numel, std::vector<int> parents, BackwardFn back) {
  Node n;
  n.parents = std::move(parents);
  n.back = std::move(back);
  n.numel = numel;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

std::vector<double>& Tape::grad_buf(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.empty()) n.grad.assign(n.numel, 0.0);
  return n.grad;
}

void Tape::backward(const Tensor& root) {
  if (consumed_) {
    throw std::runtime_error("Tape::backward called twice on one tape");
  }
  if (!tracked_on(*this, root)) {
    throw std::invalid_argument("backward root is not recorded on this tape");
  }
  if (!root.is_scalar()) {
    throw std::invalid_argument("backward root must be a scalar");
  }
  consumed_ = true;
  grad_buf(root.node)[0] = 1.0;
  // Nodes are appended after their parents, so a reverse index sweep is a
  // valid topological order; each node is visited exactly once.
  for (int i = root.node; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.empty() || !n.back) continue;
    n.back(n.grad, *this);
  }
}

Tensor Tape::grad(const Tensor& t) const {
  if (!tracked_on(*this, t)) {
    throw std::invalid_argument("Tape::grad: tensor not recorded on this tape");
  }
  const Node& n = nodes_[static_cast<std::size_t>(t.node)];
  if (n.grad.empty()) return Tensor::zeros(t.shape);
  return Tensor(t.shape, n.grad);
}

Tensor Tape::grad_or_zero(const Tensor& param) const {
  auto it = shared_leaves_.find(&param);
  if (it == shared_leaves_.end()) return Tensor::zeros(param.shape);
  const Node& n = nodes_[static_cast<std::size_t>(it->second)];
  if (n.grad.empty()) return Tensor::zeros(param.shape);
  return Tensor(param.shape, n.grad);
}

// ---- kernels -----------------------------------------------------------

namespace {

// C(m,n) += A(m,k) * B(k,n)
void mm_nn(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    double* crow = c + static_cast<std::size_t>(i) * n;
    for (int l = 0; l < k; ++l) {
      const double av = arow[l];
      const double* brow = b + static_cast<std::size_t>(l) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C(m,k) += G(m,n) * B(k,n)^T
void mm_nt(const double* g, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* grow = g + static_cast<std::size_t>(i) * n;
    double* crow = c + static_cast<std::size_t>(i) * k;
    for (int l = 0; l < k; ++l) {
      const double* brow = b + static_cast<std::size_t>(l) * n;
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
      crow[l] += s;
    }
  }
}

// C(k,n) += A(m,k)^T * G(m,n)
void mm_tn(const double* a, const double* g, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * k;
    const double* grow = g + static_cast<std::size_t>(i) * n;
    for (int l = 0; l < k; ++l) {
      const double av = arow[l];
      if (av == 0.0) continue;
      double* crow = c + static_cast<std::size_t>(l) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * grow[j];
    }
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape != b.shape) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

Tensor finish(Tape& t, Tensor out, const char* op, std::vector<int> parents,
              Tape::BackwardFn back) {
  ensure_finite(out.data, op);
  if (back) {
    out.node = t.add_node(out.size(), std::move(parents), std::move(back));
    out.set_tape_owner(&t);
  }
  return out;
}

void accumulate(Tape& tp, int node, const std::vector<double>& g) {
  auto& buf = tp.grad_buf(node);
  for (std::size_t i = 0; i < g.size(); ++i) buf[i] += g[i];
}

// Elementwise binary op with per-element partials taken by the closures.
template <typename Fwd, typename BackA, typename BackB>
Tensor binary_eltwise(Tape& t, const Tensor& a, const Tensor& b, const char* op, Fwd fwd,
                      BackA da, BackB db) {
  require_same_shape(a, b, op);
  Tensor out = Tensor::zeros(a.shape);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = fwd(a.data[i], b.data[i]);
  const bool ta = tracked_on(t, a), tb = tracked_on(t, b);
  if (!ta && !tb) return finish(t, std::move(out), op, {}, nullptr);
  std::vector<int> parents;
  if (ta) parents.push_back(a.node);
  if (tb) parents.push_back(b.node);
  const int pa = a.node, pb = b.node;
  auto av = a.data, bv = b.data;
  Tape::BackwardFn back = [ta, tb, pa, pb, av = std::move(av), bv = std::move(bv), da,
                           db](const std::vector<double>& g, Tape& tp) {
    if (ta) {
      auto& ga = tp.grad_buf(pa);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * da(av[i], bv[i]);
    }
    if (tb) {
      auto& gb = tp.grad_buf(pb);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * db(av[i], bv[i]);
    }
  };
  return finish(t, std::move(out), op, std::move(parents), std::move(back));
}

// Elementwise unary op; the backward partial may use input and output values.
template <typename Fwd, typename Back>
Tensor unary_eltwise(Tape& t, const Tensor& a, const char* op, Fwd fwd, Back dfdx) {
  Tensor out = Tensor::zeros(a.shape);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = fwd(a.data[i]);
  if (!tracked_on(t, a)) return finish(t, std::move(out), op, {}, nullptr);
  const int pa = a.node;
  auto av = a.data;
  auto ov = out.data;
  Tape::BackwardFn back = [pa, av = std::move(av), ov = std::move(ov),
                           dfdx](const std::vector<double>& g, Tape& tp) {
    auto& ga = tp.grad_buf(pa);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * dfdx(av[i], ov[i]);
  };
  return finish(t, std::move(out), op, {pa}, std::move(back));
}

}  // namespace

// ---- elementwise ops -----------------------------------------------------

Tensor add(Tape& t, const Tensor& a, const Tensor& b) {
  return binary_eltwise(
      t, a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(Tape& t, const Tensor& a, const Tensor& b) {
  return binary_eltwise(
      t, a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(Tape& t, const Tensor& a, const Tensor& b) {
  return binary_eltwise(
      t, a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor div(Tape& t, const Tensor& a, const Tensor& b) {
  return binary_eltwise(
      t, a, b, "div", [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Tensor minimum(Tape& t, const Tensor& a, const Tensor& b) {
  // subgradient: ties route to `a`
  return binary_eltwise(
      t, a, b, "minimum", [](double x, double y) { return x <= y ? x : y; },
      [](double x, double y) { return x <= y ? 1.0 : 0.0; },
      [](double x, double y) { return x <= y ? 0.0 : 1.0; });
}

Tensor neg(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "neg", [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor add_scalar(Tape& t, const Tensor& a, double c) {
  return unary_eltwise(
      t, a, "add_scalar", [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor mul_scalar(Tape& t, const Tensor& a, double c) {
  return unary_eltwise(
      t, a, "mul_scalar", [c](double x) { return x * c; }, [c](double, double) { return c; });
}

Tensor relu(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "log", [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "sqrt", [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor square(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "square", [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Tensor softplus(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "softplus",
      [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); },
      [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
}

Tensor reciprocal(Tape& t, const Tensor& a) {
  return unary_eltwise(
      t, a, "reciprocal", [](double x) { return 1.0 / x; },
      [](double, double y) { return -y * y; });
}

Tensor clamp(Tape& t, const Tensor& a, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("clamp: lo > hi");
  return unary_eltwise(
      t, a, "clamp", [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

// ---- structured ops --------------------------------------------------------

Tensor add_rowvec(Tape& t, const Tensor& m, const Tensor& v) {
  if (m.shape.size() != 2 || v.shape.size() != 1 || m.shape[1] != v.shape[0]) {
    throw std::invalid_argument("add_rowvec: expected {r,c} and {c}");
  }
  const int r = m.shape[0], c = m.shape[1];
  Tensor out = m.detached();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.data[static_cast<std::size_t>(i) * c + j] += v.data[j];
  const bool tm = tracked_on(t, m), tv = tracked_on(t, v);
  if (!tm && !tv) return finish(t, std::move(out), "add_rowvec", {}, nullptr);
  std::vector<int> parents;
  if (tm) parents.push_back(m.node);
  if (tv) parents.push_back(v.node);
  const int pm = m.node, pv = v.node;
  Tape::BackwardFn back = [tm, tv, pm, pv, r, c](const std::vector<double>& g, Tape& tp) {
    if (tm) accumulate(tp, pm, g);
    if (tv) {
      auto& gv = tp.grad_buf(pv);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) gv[j] += g[static_cast<std::size_t>(i) * c + j];
    }
  };
  return finish(t, std::move(out), "add_rowvec", std::move(parents), std::move(back));
}

Tensor tile_rows(Tape& t, const Tensor& v, int rows) {
  if (v.shape.size() != 1) throw std::invalid_argument("tile_rows: expected a vector");
  if (rows <= 0) throw std::invalid_argument("tile_rows: rows must be positive");
  const int c = v.shape[0];
  Tensor out = Tensor::zeros({rows, c});
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < c; ++j) out.data[static_cast<std::size_t>(i) * c + j] = v.data[j];
  if (!tracked_on(t, v)) return finish(t, std::move(out), "tile_rows", {}, nullptr);
  const int pv = v.node;
  Tape::BackwardFn back = [pv, rows, c](const std::vector<double>& g, Tape& tp) {
    auto& gv = tp.grad_buf(pv);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < c; ++j) gv[j] += g[static_cast<std::size_t>(i) * c + j];
  };
  return finish(t, std::move(out), "tile_rows", {pv}, std::move(back));
}

Tensor matmul(Tape& t, const Tensor& a, const Tensor& b) {
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0]) {
    throw std::invalid_argument("matmul: incompatible shapes");
  }
  const int m = a.shape[0], k = a.shape[1], n = b.shape[1];
  Tensor out = Tensor::zeros({m, n});
  mm_nn(a.data.data(), b.data.data(), out.data.data(), m, k, n);
  const bool ta = tracked_on(t, a), tb = tracked_on(t, b);
  if (!ta && !tb) return finish(t, std::move(out), "matmul", {}, nullptr);
  std::vector<int> parents;
  if (ta) parents.push_back(a.node);
  if (tb) parents.push_back(b.node);
  const int pa = a.node, pb = b.node;
  auto av = a.data, bv = b.data;
  Tape::BackwardFn back = [ta, tb, pa, pb, m, k, n, av = std::move(av),
                           bv = std::move(bv)](const std::vector<double>& g, Tape& tp) {
    if (ta) mm_nt(g.data(), bv.data(), tp.grad_buf(pa).data(), m, k, n);
    if (tb) mm_tn(av.data(), g.data(), tp.grad_buf(pb).data(), m, k, n);
  };
  return finish(t, std::move(out), "matmul", std::move(parents), std::move(back));
}

Tensor sum_all(Tape& t, const Tensor& a) {
  double s = 0.0;
  for (double x : a.data) s += x;
  Tensor out = Tensor::scalar(s);
  if (!tracked_on(t, a)) return finish(t, std::move(out), "sum_all", {}, nullptr);
  const int pa = a.node;
  const std::size_t n = a.size();
  Tape::BackwardFn back = [pa, n](const std::vector<double>& g, Tape& tp) {
    auto& ga = tp.grad_buf(pa);
    for (std::size_t i = 0; i < n; ++i) ga[i] += g[0];
  };
  return finish(t, std::move(out), "sum_all", {pa}, std::move(back));
}

Tensor mean_all(Tape& t, const Tensor& a) {
  if (a.size() == 0) throw std::invalid_argument("mean_all: empty tensor");
  return mul_scalar(t, sum_all(t, a), 1.0 / static_cast<double>(a.size()));
}

Tensor sum_cols(Tape& t, const Tensor& m) {
  const int r = m.rows(), c = m.cols();
  Tensor out = Tensor::zeros({r});
  for (int i = 0; i < r; ++i) {
    double s = 0.0;
    for (int j = 0; j < c; ++j) s += m.data[static_cast<std::size_t>(i) * c + j];
    out.data[i] = s;
  }
  if (!tracked_on(t, m)) return finish(t, std::move(out), "sum_cols", {}, nullptr);
  const int pm = m.node;
  Tape::BackwardFn back = [pm, r, c](const std::vector<double>& g, Tape& tp) {
    auto& gm = tp.grad_buf(pm);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) gm[static_cast<std::size_t>(i) * c + j] += g[i];
  };
  return finish(t, std::move(out), "sum_cols", {pm}, std::move(back));
}

Tensor sum_rows(Tape& t, const Tensor& m) {
  const int r = m.rows(), c = m.cols();
  Tensor out = Tensor::zeros({c});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.data[j] += m.data[static_cast<std::size_t>(i) * c + j];
  if (!tracked_on(t, m)) return finish(t, std::move(out), "sum_rows", {}, nullptr);
  const int pm = m.node;
  Tape::BackwardFn back = [pm, r, c](const std::vector<double>& g, Tape& tp) {
    auto& gm = tp.grad_buf(pm);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) gm[static_cast<std::size_t>(i) * c + j] += g[j];
  };
  return finish(t, std::move(out), "sum_rows", {pm}, std::move(back));
}

Tensor log_softmax_rows(Tape& t, const Tensor& m) {
  const int r = m.rows(), c = m.cols();
  Tensor out = Tensor::zeros({r, c});
  for (int i = 0; i < r; ++i) {
    const double* row = m.data.data() + static_cast<std::size_t>(i) * c;
    double mx = row[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double lse = 0.0;
    for (int j = 0; j < c; ++j) lse += std::exp(row[j] - mx);
    lse = mx + std::log(lse);
    for (int j = 0; j < c; ++j) out.data[static_cast<std::size_t>(i) * c + j] = row[j] - lse;
  }
  if (!tracked_on(t, m)) return finish(t, std::move(out), "log_softmax_rows", {}, nullptr);
  const int pm = m.node;
  auto ov = out.data;
  Tape::BackwardFn back = [pm, r, c, ov = std::move(ov)](const std::vector<double>& g, Tape& tp) {
    auto& gm = tp.grad_buf(pm);
    for (int i = 0; i < r; ++i) {
      const std::size_t off = static_cast<std::size_t>(i) * c;
      double gsum = 0.0;
      for (int j = 0; j < c; ++j) gsum += g[off + j];
      for (int j = 0; j < c; ++j) gm[off + j] += g[off + j] - std::exp(ov[off + j]) * gsum;
    }
  };
  return finish(t, std::move(out), "log_softmax_rows", {pm}, std::move(back));
}

Tensor slice_cols(Tape& t, const Tensor& m, int c0, int c1) {
  const int r = m.rows(), c = m.cols();
  if (c0 < 0 || c1 > c || c0 >= c1) throw std::invalid_argument("slice_cols: bad range");
  const int w = c1 - c0;
  Tensor out = Tensor::zeros({r, w});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < w; ++j)
      out.data[static_cast<std::size_t>(i) * w + j] = m.data[static_cast<std::size_t>(i) * c + c0 + j];
  if (!tracked_on(t, m)) return finish(t, std::move(out), "slice_cols", {}, nullptr);
  const int pm = m.node;
  Tape::BackwardFn back = [pm, r, c, c0, w](const std::vector<double>& g, Tape& tp) {
    auto& gm = tp.grad_buf(pm);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < w; ++j)
        gm[static_cast<std::size_t>(i) * c + c0 + j] += g[static_cast<std::size_t>(i) * w + j];
  };
  return finish(t, std::move(out), "slice_cols", {pm}, std::move(back));
}

Tensor concat_cols(Tape& t, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty list");
  const int r = parts[0].rows();
  int total = 0;
  for (const auto& p : parts) {
    if (p.rows() != r) throw std::invalid_argument("concat_cols: row mismatch");
    total += p.cols();
  }
  Tensor out = Tensor::zeros({r, total});
  int off = 0;
  for (const auto& p : parts) {
    const int c = p.cols();
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        out.data[static_cast<std::size_t>(i) * total + off + j] =
            p.data[static_cast<std::size_t>(i) * c + j];
    off += c;
  }
  bool any = false;
  std::vector<int> parents;
  std::vector<int> pnodes(parts.size(), -1);
  std::vector<int> pcols(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    pcols[k] = parts[k].cols();
    if (tracked_on(t, parts[k])) {
      any = true;
      pnodes[k] = parts[k].node;
      parents.push_back(parts[k].node);
    }
  }
  if (!any) return finish(t, std::move(out), "concat_cols", {}, nullptr);
  Tape::BackwardFn back = [pnodes, pcols, r, total](const std::vector<double>& g, Tape& tp) {
    int off = 0;
    for (std::size_t k = 0; k < pnodes.size(); ++k) {
      const int c = pcols[k];
      if (pnodes[k] >= 0) {
        auto& gp = tp.grad_buf(pnodes[k]);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < c; ++j)
            gp[static_cast<std::size_t>(i) * c + j] += g[static_cast<std::size_t>(i) * total + off + j];
      }
      off += c;
    }
  };
  return finish(t, std::move(out), "concat_cols", std::move(parents), std::move(back));
}

Tensor select_cols(Tape& t, const Tensor& m, const std::vector<int>& idx) {
  const int r = m.rows(), c = m.cols();
  if (static_cast<int>(idx.size()) != r) {
    throw std::invalid_argument("select_cols: index count must equal rows");
  }
  Tensor out = Tensor::zeros({r});
  for (int i = 0; i < r; ++i) {
    if (idx[i] < 0 || idx[i] >= c) throw std::invalid_argument("select_cols: index out of range");
    out.data[i] = m.data[static_cast<std::size_t>(i) * c + idx[i]];
  }
  if (!tracked_on(t, m)) return finish(t, std::move(out), "select_cols", {}, nullptr);
  const int pm = m.node;
  auto ix = idx;
  Tape::BackwardFn back = [pm, c, ix = std::move(ix)](const std::vector<double>& g, Tape& tp) {
    auto& gm = tp.grad_buf(pm);
    for (std::size_t i = 0; i < g.size(); ++i) gm[i * c + ix[i]] += g[i];
  };
  return finish(t, std::move(out), "select_cols", {pm}, std::move(back));
}

Tensor reshape(Tape& t, const Tensor& a, Shape s) {
  if (shape_numel(s) != a.size()) throw std::invalid_argument("reshape: size mismatch");
  Tensor out(std::move(s), a.data);
  if (!tracked_on(t, a)) return out;
  const int pa = a.node;
  Tape::BackwardFn back = [pa](const std::vector<double>& g, Tape& tp) { accumulate(tp, pa, g); };
  out.node = t.add_node(out.size(), {pa}, std::move(back));
  out.set_tape_owner(&t);
  return out;
}

}  // namespace pearlplus
