#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace rtm {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow
inline double log_add(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double m = neg_inf;
  for (double x : xs) m = std::max(m, x);
  if (m == neg_inf) return neg_inf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Running sum kept as log value; terms are added in order.
class LogAccumulator {
 public:
  void add_log(double x) { value_ = log_add(value_, x); }
  double log_value() const { return value_; }
  double value() const { return std::exp(value_); }

 private:
  double value_ = neg_inf;
};

// Nonnegative vector stored as v * exp(log_scale) with max(v) == 1 (or v == 0).
struct ScaledVector {
  Eigen::VectorXd v;
  double log_scale = 0.0;

  void normalize() {
    double m = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    if (m > 0.0) {
      v /= m;
      log_scale += std::log(m);
    }
  }
  bool is_zero() const { return v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0; }
  double log_entry(int i) const {
    return v(i) > 0.0 ? std::log(v(i)) + log_scale : neg_inf;
  }
  double log_total() const {
    double s = v.sum();
    return s > 0.0 ? std::log(s) + log_scale : neg_inf;
  }
};

}  // namespace rtm
