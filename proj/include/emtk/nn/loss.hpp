#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "emtk/nn/tensor.hpp"

namespace emtk::nn {

inline constexpr double kProbClamp = 1e-7;

// All losses are means over the batch. Gradients are exact derivatives of the
// clamped losses, so a clamped probability has zero gradient.

template <typename Scalar>
Scalar mse(const Tensor2<Scalar>& pred, const Tensor2<Scalar>& target) {
  check_shape(pred, target, "mse target");
  return (pred - target).squaredNorm() / static_cast<Scalar>(pred.rows());
}

template <typename Scalar>
Tensor2<Scalar> grad_mse(const Tensor2<Scalar>& pred, const Tensor2<Scalar>& target) {
  check_shape(pred, target, "mse target");
  return (Scalar(2) / static_cast<Scalar>(pred.rows())) * (pred - target);
}

namespace detail {
template <typename Scalar>
Scalar clamp_prob(Scalar p) {
  return std::clamp(p, Scalar(kProbClamp), Scalar(1 - kProbClamp));
}
template <typename Scalar>
bool clamped(Scalar p) {
  return p < Scalar(kProbClamp) || p > Scalar(1 - kProbClamp);
}
}  // namespace detail

/// prob and target are n x 1; target entries are 0 or 1.
template <typename Scalar>
Scalar bce(const Tensor2<Scalar>& prob, const Tensor2<Scalar>& target) {
  check_shape(prob, target, "bce target");
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    const Scalar p = detail::clamp_prob(prob.data()[i]);
    const Scalar t = target.data()[i];
    sum -= t * std::log(p) + (1 - t) * std::log(1 - p);
  }
  return sum / static_cast<Scalar>(prob.rows());
}

template <typename Scalar>
Tensor2<Scalar> grad_bce(const Tensor2<Scalar>& prob, const Tensor2<Scalar>& target) {
  check_shape(prob, target, "bce target");
  Tensor2<Scalar> g(prob.rows(), prob.cols());
  const Scalar n = static_cast<Scalar>(prob.rows());
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    const Scalar p = prob.data()[i];
    const Scalar t = target.data()[i];
    g.data()[i] = detail::clamped(p) ? Scalar(0) : -(t / p - (1 - t) / (1 - p)) / n;
  }
  return g;
}

/// probs is n x E; classes holds one index per row.
template <typename Scalar>
Scalar ce(const Tensor2<Scalar>& probs, const std::vector<std::size_t>& classes) {
  if (static_cast<std::size_t>(probs.rows()) != classes.size()) throw ShapeError("ce: row count mismatch");
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const auto c = classes[static_cast<std::size_t>(i)];
    if (c >= static_cast<std::size_t>(probs.cols())) throw DomainError("ce: class index out of range");
    sum -= std::log(detail::clamp_prob(probs(i, static_cast<Eigen::Index>(c))));
  }
  return sum / static_cast<Scalar>(probs.rows());
}

template <typename Scalar>
Tensor2<Scalar> grad_ce(const Tensor2<Scalar>& probs, const std::vector<std::size_t>& classes) {
  if (static_cast<std::size_t>(probs.rows()) != classes.size()) throw ShapeError("ce: row count mismatch");
  Tensor2<Scalar> g = Tensor2<Scalar>::Zero(probs.rows(), probs.cols());
  const Scalar n = static_cast<Scalar>(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const auto c = static_cast<Eigen::Index>(classes[static_cast<std::size_t>(i)]);
    if (c >= probs.cols()) throw DomainError("ce: class index out of range");
    const Scalar p = probs(i, c);
    if (!detail::clamped(p)) g(i, c) = -1 / (n * p);
  }
  return g;
}

}  // namespace emtk::nn
