#include "ned/safety.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ned/errors.hpp"

namespace ned::safety {

void SafetyLimits::validate() const {
  if (!(pos_min_mm < pos_max_mm) || !(laser_min_mm < laser_max_mm)) {
    throw std::invalid_argument("window minima must be below maxima");
  }
  if (!(v_limit_mm_s > 0.0) || !(a_limit_mm_s2 > 0.0) || !(torque_limit_nm > 0.0)) {
    throw std::invalid_argument("limits must be > 0");
  }
}

std::string cause_name(Cause c) {
  switch (c) {
    case Cause::position: return "position";
    case Cause::speed: return "speed";
    case Cause::acceleration: return "acceleration";
    case Cause::torque: return "torque";
    case Cause::laser: return "laser";
    case Cause::estop: return "estop";
  }
  return "?";
}

std::string FaultReport::to_line() const {
  if (!tripped) return "OK";
  char buf[96];
  std::snprintf(buf, sizeof buf, "FAULT cause=%s t=%zu value=%.9g", cause_name(cause).c_str(),
                sample_index, value);
  return buf;
}

namespace {

std::vector<double> median5(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  std::array<double, 5> w;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t k = (i >= 2 ? i - 2 : 0); k <= std::min(i + 2, n - 1); ++k) w[m++] = x[k];
    std::sort(w.begin(), w.begin() + m);
    out[i] = w[m / 2];
  }
  return out;
}

}  // namespace

FaultReport monitor(const plant::SensorLog& log, const SafetyLimits& limits, double lever_m) {
  limits.validate();
  if (!(lever_m > 0.0)) throw std::invalid_argument("lever must be > 0");
  const std::size_t n = log.size();
  FaultReport report;
  if (n == 0) return report;

  const std::vector<double> xf = median5(log.x_meas_mm);
  const double dt = log.dt;

  for (std::size_t i = 0; i < n; ++i) {
    const double x = log.x_meas_mm[i];
    if (x < limits.pos_min_mm || x > limits.pos_max_mm) {
      return {true, Cause::position, i, x};
    }
    if (i >= 1 && i + 1 < n) {
      const double v = (xf[i + 1] - xf[i - 1]) / (2.0 * dt);
      if (std::abs(v) > limits.v_limit_mm_s) return {true, Cause::speed, i, v};
      const double a = (xf[i + 1] - 2.0 * xf[i] + xf[i - 1]) / (dt * dt);
      if (std::abs(a) > limits.a_limit_mm_s2) return {true, Cause::acceleration, i, a};
    }
    const double torque = (log.f1_n[i] - log.f2_n[i]) * lever_m;
    if (std::abs(torque) > limits.torque_limit_nm) return {true, Cause::torque, i, torque};
    if (x < limits.laser_min_mm || x > limits.laser_max_mm) {
      return {true, Cause::laser, i, x};
    }
  }
  return report;
}

State interlock_step(State state, const Event& event) {
  if (std::holds_alternative<EstopEvent>(event)) return State::fault;
  switch (state) {
    case State::armed:
      if (std::holds_alternative<StartEvent>(event)) return State::running;
      return State::armed;
    case State::running:
      if (std::holds_alternative<ViolationEvent>(event)) return State::fault;
      return State::running;
    case State::fault:
      if (const auto* reset = std::get_if<ResetEvent>(&event)) {
        if (!reset->violation_cleared) throw RejectedReset();
        return State::armed;
      }
      return State::fault;  // latched
  }
  return state;
}

}  // namespace ned::safety
