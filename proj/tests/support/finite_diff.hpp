#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

namespace emtk::testing {

/// Central-difference gradient of f with respect to every entry of x.
/// x is perturbed in place and restored.
template <typename MatrixT>
MatrixT numeric_gradient(MatrixT& x, const std::function<double()>& f, double h = 1e-5) {
  MatrixT g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = f();
    x.data()[i] = saved - h;
    const double down = f();
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// max |a - b| / max(|a|, |b|, 1e-8) over entries, the symmetric relative
/// error used by most gradient checkers. Entries where both are below
/// abs_floor count as agreeing.
template <typename A, typename B>
double max_relative_error(const A& analytic, const B& numeric, double abs_floor = 1e-9) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double n = numeric.data()[i];
    const double diff = std::abs(a - n);
    if (diff < abs_floor) continue;
    worst = std::max(worst, diff / std::max({1e-8, std::abs(a), std::abs(n)}));
  }
  return worst;
}

}  // namespace emtk::testing
