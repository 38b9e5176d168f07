#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emtk/nn/tensor.hpp"

namespace emtk::nn {

enum class Activation { Linear, Tanh, Sigmoid, Softmax };

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Linear: return "linear";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
  }
  return "linear";
}

/// y = act(x W + b). W is in x out, b is 1 x out. l2 penalizes W only.
template <typename Scalar>
struct DenseLayer {
  Tensor2<Scalar> W;
  Tensor2<Scalar> b;
  Activation activation = Activation::Linear;
  Scalar l2 = 0;

  DenseLayer() = default;
  DenseLayer(Eigen::Index in, Eigen::Index out, Activation act, Scalar l2_coeff = 0)
      : W(Tensor2<Scalar>::Zero(in, out)), b(Tensor2<Scalar>::Zero(1, out)), activation(act),
        l2(l2_coeff) {}

  Eigen::Index in_dim() const { return W.rows(); }
  Eigen::Index out_dim() const { return W.cols(); }

  /// Glorot uniform kernel, zero bias.
  void init(Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim()));
    for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = static_cast<Scalar>(uniform(rng, -limit, limit));
    b.setZero();
  }

  /// l2 * sum(W^2); 0 when l2 == 0.
  Scalar penalty() const { return l2 > 0 ? l2 * W.squaredNorm() : Scalar(0); }
};

template <typename Scalar>
struct DenseCache {
  Tensor2<Scalar> x;  ///< layer input
  Tensor2<Scalar> y;  ///< layer output (post-activation)
};

template <typename Scalar>
Tensor2<Scalar> softmax_rows(const Tensor2<Scalar>& z) {
  Tensor2<Scalar> out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Scalar m = z.row(i).maxCoeff();
    out.row(i) = (z.row(i).array() - m).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

template <typename Scalar>
Tensor2<Scalar> activate(Activation act, const Tensor2<Scalar>& z) {
  switch (act) {
    case Activation::Linear: return z;
    case Activation::Tanh: return z.array().tanh().matrix();
    case Activation::Sigmoid: return (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
    case Activation::Softmax: return softmax_rows(z);
  }
  return z;
}

template <typename Scalar>
Tensor2<Scalar> dense_forward(const DenseLayer<Scalar>& layer, const Tensor2<Scalar>& x,
                              DenseCache<Scalar>* cache = nullptr) {
  if (x.cols() != layer.in_dim()) {
    throw ShapeError("dense_forward: input has " + std::to_string(x.cols()) +
                     " columns, layer expects " + std::to_string(layer.in_dim()));
  }
  Tensor2<Scalar> z = x * layer.W;
  z.rowwise() += layer.b.row(0);
  Tensor2<Scalar> y = activate(layer.activation, z);
  check_finite(y, "dense layer output");
  if (cache) {
    cache->x = x;
    cache->y = y;
  }
  return y;
}

/// Gradient of the pre-activation given the gradient of the output, computed
/// from the cached output.
template <typename Scalar>
Tensor2<Scalar> activation_backward(Activation act, const Tensor2<Scalar>& y,
                                    const Tensor2<Scalar>& dy) {
  switch (act) {
    case Activation::Linear: return dy;
    case Activation::Tanh: return (dy.array() * (Scalar(1) - y.array().square())).matrix();
    case Activation::Sigmoid: return (dy.array() * y.array() * (Scalar(1) - y.array())).matrix();
    case Activation::Softmax: {
      // dz = y * (dy - <dy, y>) per row
      Tensor2<Scalar> dz(y.rows(), y.cols());
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const Scalar dot = dy.row(i).dot(y.row(i));
        dz.row(i) = (y.row(i).array() * (dy.row(i).array() - dot)).matrix();
      }
      return dz;
    }
  }
  return dy;
}

template <typename Scalar>
struct DenseGrad {
  Tensor2<Scalar> W;
  Tensor2<Scalar> b;

  static DenseGrad zeros_like(const DenseLayer<Scalar>& l) {
    return {Tensor2<Scalar>::Zero(l.W.rows(), l.W.cols()), Tensor2<Scalar>::Zero(1, l.b.cols())};
  }
};

/// Returns the gradient w.r.t. the input and accumulates into grad, which is
/// anything with W and b members shaped like the layer (a DenseGrad or a
/// zeroed DenseLayer). Includes 2*l2*W when l2 > 0.
template <typename Scalar, typename Grad>
Tensor2<Scalar> dense_backward(const DenseLayer<Scalar>& layer, const DenseCache<Scalar>& cache,
                               const Tensor2<Scalar>& dy, Grad& grad) {
  check_shape(cache.y, dy, "dense_backward upstream gradient");
  check_shape(layer.W, grad.W, "dense_backward weight gradient");
  check_shape(layer.b, grad.b, "dense_backward bias gradient");
  const Tensor2<Scalar> dz = activation_backward(layer.activation, cache.y, dy);
  grad.W.noalias() += cache.x.transpose() * dz;
  grad.b += dz.colwise().sum();
  if (layer.l2 > 0) grad.W += Scalar(2) * layer.l2 * layer.W;
  return dz * layer.W.transpose();
}

/// Lookup table of vocab_size x dim trainable vectors.
template <typename Scalar>
struct EmbeddingTable {
  Tensor2<Scalar> E;

  EmbeddingTable() = default;
  EmbeddingTable(Eigen::Index vocab, Eigen::Index dim) : E(Tensor2<Scalar>::Zero(vocab, dim)) {}

  Eigen::Index vocab_size() const { return E.rows(); }
  Eigen::Index dim() const { return E.cols(); }

  void init(Rng& rng, double limit = 0.05) {
    for (Eigen::Index i = 0; i < E.size(); ++i) E.data()[i] = static_cast<Scalar>(uniform(rng, -limit, limit));
  }

  Tensor2<Scalar> gather(const std::vector<std::size_t>& idx) const {
    Tensor2<Scalar> out(static_cast<Eigen::Index>(idx.size()), dim());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= static_cast<std::size_t>(vocab_size())) {
        throw ShapeError("embedding index " + std::to_string(idx[i]) + " out of range");
      }
      out.row(static_cast<Eigen::Index>(i)) = E.row(static_cast<Eigen::Index>(idx[i]));
    }
    return out;
  }

  /// Adds each upstream row into the gradient row of its index.
  static void scatter_add(const Tensor2<Scalar>& dy, const std::vector<std::size_t>& idx,
                          Tensor2<Scalar>& grad) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      grad.row(static_cast<Eigen::Index>(idx[i])) += dy.row(static_cast<Eigen::Index>(i));
    }
  }
};

struct DropoutSpec {
  double p = 0.2;
  bool train = false;
};

/// Inverted dropout. Returns (y, mask) where mask holds 0 for dropped units
/// and 1/(1-p) for kept ones; in eval mode or with p == 0 the mask is all 1.
template <typename Scalar>
std::pair<Tensor2<Scalar>, Tensor2<Scalar>> dropout_forward(const DropoutSpec& spec,
                                                            const Tensor2<Scalar>& x, Rng* rng) {
  if (spec.p < 0.0 || spec.p >= 1.0) throw ConfigError("dropout p must be in [0, 1)");
  Tensor2<Scalar> mask = Tensor2<Scalar>::Ones(x.rows(), x.cols());
  if (!spec.train || spec.p == 0.0) return {x, mask};
  if (!rng) throw ConfigError("train-mode dropout needs an rng");
  const Scalar keep = static_cast<Scalar>(1.0 / (1.0 - spec.p));
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = uniform01(*rng) < spec.p ? Scalar(0) : keep;
  }
  return {(x.array() * mask.array()).matrix(), mask};
}

}  // namespace emtk::nn
