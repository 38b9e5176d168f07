#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emtk {

/// Pearson correlation with 64-bit accumulation. Throws DegenerateInput when
/// n < 3, when lengths differ, or when either vector is constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

/// Two-sided p-value of r under the null of zero correlation, from Student's
/// t with n-2 degrees of freedom. |r| == 1 gives exactly 0.
double p_value(double r, std::size_t n);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

struct CorrelationReport {
  std::optional<double> r_empathy;
  std::optional<double> r_distress;
  /// Mean of both correlations; present only when both are.
  std::optional<double> r_average;
  std::size_t n = 0;
  std::optional<double> p_empathy;
  std::optional<double> p_distress;
};

struct ClassMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  /// Classes that never occur in the targets; excluded from the macro mean.
  std::vector<std::size_t> absent_classes;
};

/// Accuracy and macro-F1 over class indices in [0, classes).
ClassMetrics class_metrics(std::span<const std::size_t> predicted,
                           std::span<const std::size_t> target, std::size_t classes);

struct AuxMetrics {
  ClassMetrics bin;
  ClassMetrics emotion;
};

/// Bin predictions threshold bin_prob at 0.5; emotion predictions are argmax
/// indices.
AuxMetrics aux_metrics(std::span<const double> bin_prob, std::span<const int> bin_target,
                       std::span<const std::size_t> emotion_pred,
                       std::span<const std::size_t> emotion_target, std::size_t emotion_classes);

}  // namespace emtk
