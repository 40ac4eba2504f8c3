#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>

namespace hmi {

// Goal-directed motion error over a sliding window: the mean shortfall of the
// robot's goal-directed speed against the planner's expected speed,
// normalised by v_max and clamped to [0, 1].
class MotionErrorEstimator {
 public:
  MotionErrorEstimator() = default;
  MotionErrorEstimator(double window, double dt, double v_max)
      : capacity_(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window / dt)))), v_max_(v_max) {}

  void update(double v_actual, double v_expected) {
    samples_.push_back(v_expected - v_actual);
    while (samples_.size() > capacity_) samples_.pop_front();
    const double mean = std::accumulate(samples_.begin(), samples_.end(), 0.0) / static_cast<double>(samples_.size());
    value_ = std::clamp(mean / v_max_, 0.0, 1.0);
  }

  void reset() {
    samples_.clear();
    value_ = 0.0;
  }

  double value() const noexcept { return value_; }
  std::size_t samples() const noexcept { return samples_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t capacity_ = 60;
  double v_max_ = 1.0;
  std::deque<double> samples_;
  double value_ = 0.0;
};

inline MotionErrorEstimator update_error(MotionErrorEstimator est, double v_actual, double v_expected) {
  est.update(v_actual, v_expected);
  return est;
}

// Trapezoidal membership with feet a, d and shoulders b, c. Degenerate
// shoulders (a == b or c == d) give a flat edge.
inline double trapezoid(double x, double a, double b, double c, double d) {
  if (x < a || x > d) return 0.0;
  if (x < b) return (x - a) / (b - a);
  if (x <= c) return 1.0;
  return (d - x) / (d - c);
}

inline double membership_low(double e) { return trapezoid(e, 0.0, 0.0, 0.2, 0.4); }
inline double membership_high(double e) { return trapezoid(e, 0.3, 0.5, 1.0, 1.0); }

}  // namespace hmi
