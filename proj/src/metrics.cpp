#include "emtk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emtk/error.hpp"

namespace emtk {

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DegenerateInput("pearson_r: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw DegenerateInput("pearson_r needs at least 3 pairs, got " + std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson_r: constant input vector");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

namespace {

// Lentz's method for the continued fraction of I_x(a, b).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericFault("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw DomainError("incomplete_beta needs a, b > 0");
  if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta needs x in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double p_value(double r, std::size_t n) {
  if (n < 4) throw DegenerateInput("p_value needs n >= 4");
  if (!std::isfinite(r) || std::abs(r) > 1.0) throw DomainError("p_value needs |r| <= 1");
  if (std::abs(r) == 1.0) return 0.0;
  if (r == 0.0) return 1.0;
  const double df = static_cast<double>(n - 2);
  const double t2 = r * r * df / (1.0 - r * r);
  // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
  return incomplete_beta(df / 2.0, 0.5, df / (df + t2));
}

ClassMetrics class_metrics(std::span<const std::size_t> predicted,
                           std::span<const std::size_t> target, std::size_t classes) {
  if (predicted.size() != target.size()) throw ShapeError("class_metrics: length mismatch");
  if (target.empty()) throw DegenerateInput("class_metrics: empty input");
  std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0), support(classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto p = predicted[i], t = target[i];
    if (p >= classes || t >= classes) throw DomainError("class_metrics: class index out of range");
    ++support[t];
    if (p == t) {
      ++correct;
      ++tp[t];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  ClassMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(target.size());
  double f1_sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    if (support[c] == 0) {
      m.absent_classes.push_back(c);
      continue;
    }
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    f1_sum += 2.0 * tp[c] / denom;
    ++counted;
  }
  m.macro_f1 = f1_sum / static_cast<double>(counted);
  return m;
}

AuxMetrics aux_metrics(std::span<const double> bin_prob, std::span<const int> bin_target,
                       std::span<const std::size_t> emotion_pred,
                       std::span<const std::size_t> emotion_target, std::size_t emotion_classes) {
  if (bin_prob.size() != bin_target.size()) throw ShapeError("aux_metrics: bin length mismatch");
  std::vector<std::size_t> bp(bin_prob.size()), bt(bin_target.size());
  for (std::size_t i = 0; i < bin_prob.size(); ++i) {
    bp[i] = bin_prob[i] >= 0.5 ? 1 : 0;
    bt[i] = bin_target[i] == 1 ? 1 : 0;
  }
  return {class_metrics(bp, bt, 2), class_metrics(emotion_pred, emotion_target, emotion_classes)};
}

}  // namespace emtk
