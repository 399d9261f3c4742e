#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "ned/plant.hpp"

namespace ned::safety {

struct SafetyLimits {
  double pos_min_mm = -183.0;   // +/- 15 deg at the 0.7 m lever
  double pos_max_mm = 183.0;
  double v_limit_mm_s = 1000.0;
  double a_limit_mm_s2 = 5.0e4;
  double torque_limit_nm = 150.0;
  double laser_min_mm = -183.0;
  double laser_max_mm = 183.0;

  void validate() const;
};

enum class Cause { position, speed, acceleration, torque, laser, estop };

std::string cause_name(Cause c);

struct FaultReport {
  bool tripped = false;
  Cause cause = Cause::position;
  std::size_t sample_index = 0;
  double value = 0.0;

  /// `FAULT cause=<c> t=<ms> value=<v>` or `OK`.
  std::string to_line() const;
};

/// Scans the log in time order and latches the first strict limit violation.
/// Values exactly at a limit are safe. Speed/acceleration are centered
/// differences of the median-prefiltered measured position; torque is
/// (F1-F2)*lever.
FaultReport monitor(const plant::SensorLog& log, const SafetyLimits& limits, double lever_m);

enum class State { armed, running, fault };

struct StartEvent {};
struct ViolationEvent {
  Cause cause = Cause::position;
};
struct EstopEvent {};
struct ResetEvent {
  bool violation_cleared = true;
};
using Event = std::variant<StartEvent, ViolationEvent, EstopEvent, ResetEvent>;

/// Latching relay chain as a pure transition function. Faults latch until a
/// reset with the violation cleared; resetting into a live violation throws
/// RejectedReset. Estop faults from any state.
State interlock_step(State state, const Event& event);

/// Stateful wrapper owned by one simulated session.
class Interlock {
 public:
  State state() const { return state_; }
  State step(const Event& event) { return state_ = interlock_step(state_, event); }

 private:
  State state_ = State::armed;
};

}  // namespace ned::safety
