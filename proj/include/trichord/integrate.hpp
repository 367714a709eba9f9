#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trichord/dynamics.hpp"

namespace trichord {

/// Scalar event g(state); zeros are located on the dense output.
struct EventSpec {
  std::function<double(const PhaseState&)> g;
  int direction = 0;  // +1 rising only, -1 falling only, 0 either
  bool terminal = false;
  std::string name;
};

/// Zero of the given phase-space coordinate (0..5 over q1..q3, p1..p3).
EventSpec coordinate_event(int index, int direction = 0, bool terminal = false);

struct EventHit {
  std::size_t spec;  // index into the event list
  double t;
  PhaseState state;
  int direction;  // sign of g' at the zero
};

enum class Termination { completed, event_hit, guard_violation, step_underflow };

const char* to_string(Termination t);

struct GuardReport {
  double t;
  Primary primary;
  double distance;
};

/// Samples at accepted steps, sorted by time. A backward run is stored
/// reversed, so `times` is always increasing; use `final_state` for the end of
/// the integration.
struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  double max_energy_drift = 0.0;
  Termination termination = Termination::completed;
  std::optional<GuardReport> guard;
  double tol = 0.0;
  double final_time = 0.0;
  PhaseState final_state;
  std::size_t steps = 0;
};

struct IntegrateOptions {
  double tol = 1e-12;  // relative and absolute
  std::vector<EventSpec> events;
  bool with_stm = false;
  /// Include the STM in step-size control. Off, the STM follows the state's
  /// step sequence, so runs with and without it give identical states.
  bool stm_error_control = true;
  bool record = true;  // keep every accepted step
  /// Events closer than this to the start time are ignored.
  double event_skip = 0.0;
};

struct IntegrationResult {
  Trajectory trajectory;
  std::vector<EventHit> events;
  std::optional<Mat6> stm;  // at final_time, when requested
};

/// Adaptive DOP853 integration of the rotating-frame equations over t_span.
/// Backward spans are allowed. Guard violations end the run and are reported
/// in the trajectory rather than thrown.
IntegrationResult integrate(const PhaseState& s0, double t0, double t1, const SystemParams& params,
                            const IntegrateOptions& opts = {});

/// Final state (and optionally the STM) after flowing for time t; throws
/// GuardViolation or Error on failure.
PhaseState flow(const PhaseState& s0, double t, const SystemParams& params, double tol = 1e-12);
std::pair<PhaseState, Mat6> flow_with_stm(const PhaseState& s0, double t, const SystemParams& params,
                                          double tol = 1e-12);

}  // namespace trichord
