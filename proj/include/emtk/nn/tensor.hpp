#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "emtk/error.hpp"

namespace emtk::nn {

/// Row-major dense matrix; rows are batch samples.
template <typename Scalar>
using Tensor2 = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

/// Uniform in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& m, const std::string& what) {
  if (!m.allFinite()) throw NumericFault("non-finite value in " + what);
}

template <typename A, typename B>
void check_shape(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                 const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(what + ": expected " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + ", got " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

}  // namespace emtk::nn
