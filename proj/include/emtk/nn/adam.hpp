#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "emtk/nn/tensor.hpp"

namespace emtk::nn {

template <typename Scalar>
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t t = 0;
  std::vector<Tensor2<Scalar>> m;
  std::vector<Tensor2<Scalar>> v;
};

/// One bias-corrected Adam update over parallel lists of parameters and
/// gradients. Moments are allocated on the first call.
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, const std::vector<Tensor2<Scalar>*>& params,
               const std::vector<const Tensor2<Scalar>*>& grads) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.push_back(Tensor2<Scalar>::Zero(p->rows(), p->cols()));
      state.v.push_back(Tensor2<Scalar>::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam_step: state does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    check_shape(*params[i], *grads[i], "adam_step gradient");
    check_shape(*params[i], state.m[i], "adam_step moment");
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const Scalar b1 = static_cast<Scalar>(state.beta1);
  const Scalar b2 = static_cast<Scalar>(state.beta2);
  const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(state.beta1, t));
  const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(state.beta2, t));
  const Scalar lr = static_cast<Scalar>(state.lr);
  const Scalar eps = static_cast<Scalar>(state.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& g = grads[i]->array();
    auto m = state.m[i].array();
    auto v = state.v[i].array();
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g.square();
    params[i]->array() -= lr * (m / c1) / ((v / c2).sqrt() + eps);
  }
}

template <typename Scalar>
std::size_t param_count(const std::vector<const Tensor2<Scalar>*>& tensors) {
  std::size_t n = 0;
  for (const auto* t : tensors) n += static_cast<std::size_t>(t->size());
  return n;
}

}  // namespace emtk::nn
