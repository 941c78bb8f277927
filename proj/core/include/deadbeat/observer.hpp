#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "deadbeat/numerics.hpp"
#include "deadbeat/plant_sim.hpp"
#include "deadbeat/system_model.hpp"
#include "deadbeat/window_kernel.hpp"

namespace deadbeat {

enum class ObserverMode {
  kFullOrder,     // flows (z, w) on the internal output copy w
  kReducedOrder,  // flows z on the measured output
};

enum class DegeneratePolicy {
  kHoldAndRetry,  // keep the flowed estimate, try again one window later
  kFail,          // throw kGramDegenerate
};

struct ObserverConfig {
  double r = 1.0;
  double h = 5e-4;
  ObserverMode mode = ObserverMode::kReducedOrder;
  double rel_threshold = kDefaultRelThreshold;
  DegeneratePolicy on_degenerate = DegeneratePolicy::kHoldAndRetry;
  double pivot_floor = kDefaultPivotFloor;

  /// r / h; throws kInvalidArgument (naming observer.r) unless it is an
  /// integer >= 2.
  std::size_t steps_per_window() const;
  void validate() const { (void)steps_per_window(); }
};

struct HistorySample {
  Vector y;
  Vector u;
};

enum class ResetOutcome : std::uint8_t {
  kNone,
  kApplied,
  kDegenerate,
};

struct ObserverSnapshot {
  double t0 = 0.0;
  double t = 0.0;
  std::size_t step = 0;
  Vector z;
  Vector w;
  double next_reset = 0.0;
  /// The last r seconds of (y, u) samples, at most r/h + 1 entries.
  std::deque<HistorySample> history;

  std::size_t resets = 0;
  std::size_t degenerate_events = 0;
  /// Resets whose estimate fell outside B(y); accepted but counted.
  std::size_t out_of_domain_resets = 0;

  ResetOutcome last_outcome = ResetOutcome::kNone;
  Vector z_before_reset;  // flowed estimate just before the last reset

  double history_duration(double h) const {
    return history.empty() ? 0.0
                           : h * static_cast<double>(history.size() - 1);
  }
};

/// Starts the observer at t0 from (z0, w0). The measurement taken at t0 seeds
/// the history so that the first window covers [t0, t0 + r]. w0 is ignored in
/// ReducedOrder mode.
ObserverSnapshot observer_init(const SystemSpec& spec,
                               const ObserverConfig& config, const Vector& z0,
                               const Vector& w0, double t0,
                               const Vector& y_at_t0, const Vector& u_at_t0);

/// Advances one step of size h. `y_meas` and `u` are the samples at the new
/// time; the flow over the step holds the previous input sample. Applies the
/// reset map when the new time reaches next_reset.
ObserverSnapshot observer_step(const SystemSpec& spec,
                               const ObserverConfig& config,
                               ObserverSnapshot snap, const Vector& y_meas,
                               const Vector& u);

struct ResetEvent {
  std::size_t node = 0;
  double t = 0.0;
  ResetOutcome outcome = ResetOutcome::kNone;
  bool out_of_domain = false;
  Vector z_before;
  Vector z_after;
};

struct EstimateTrace {
  Grid grid;
  std::vector<Vector> z;
  std::vector<Vector> w;  // empty vectors in ReducedOrder mode
  std::vector<std::uint8_t> reset_flag;
  std::vector<std::uint8_t> degenerate_flag;
  std::vector<ResetEvent> events;
  std::size_t degenerate_events = 0;
  std::size_t out_of_domain_resets = 0;

  std::size_t size() const { return z.size(); }
};

/// Replays the measured trace (y_meas, u) through the observer.
EstimateTrace run_observer(const SystemSpec& spec, const ObserverConfig& config,
                           const Trace& trace, const Vector& z0,
                           const Vector& w0);

}  // namespace deadbeat
