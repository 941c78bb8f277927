#pragma once

#include <span>
#include <vector>

#include "deadbeat/numerics.hpp"
#include "deadbeat/plant_sim.hpp"
#include "deadbeat/system_model.hpp"
#include "deadbeat/window_kernel.hpp"

namespace deadbeat {

/// y = A sin(omega t + phase), optionally corrupted by a sin(f t), observed
/// over one window of length r.
struct FrequencyScenario {
  double amplitude = 2.0;
  double omega = 3.0;
  double phase = 0.0;
  double noise_amplitude = 0.0;
  double noise_frequency = 10.0;
  double r = 1.0;

  void validate() const;
  /// (x1, x2) = (A omega cos(phase), -omega^2).
  Vector initial_x() const;
  Vector initial_y() const;
  SensorModel sensor() const;
};

/// ydot = x1, x1dot = x2 y, x2dot = 0. The default domain also requires
/// x2 < 0; `relaxed` keeps only y^2 + x1^2 > 0.
SystemSpec freq_spec(bool relaxed = false);

struct FrequencyEstimate {
  double z1 = 0.0;  // x1 at the window end
  double z2 = 0.0;  // -omega^2
};

/// Explicit quotient formulas in terms of phi(t) = int_0^t int_0^s y.
/// Throws kSingularDenominator on a degenerate window (e.g. y == 0).
FrequencyEstimate freq_closed_form(const IoWindow& window);

/// sqrt(-z2); throws kNonNegativeZ2 when z2 >= 0.
double omega_hat(double z2);

/// Largest step that is at most r/2000, resolves the noise with 20 samples
/// per period and divides r exactly.
double sweep_step(const FrequencyScenario& scn);

/// Simulated, corrupted window [0, r] for the scenario.
IoWindow scenario_window(const FrequencyScenario& scn, double h);

struct SweepTable {
  std::vector<double> sweep_value;
  std::vector<double> omega_hat;
  std::vector<double> rel_error;
  double max_error = 0.0;
  double argmax = 0.0;
};

/// `count` equally spaced phases in [0, 2 pi).
std::vector<double> phase_grid(std::size_t count = 64);

/// For each phase: simulate, corrupt, reconstruct the window end through the
/// generic window kernel and compare sqrt(-z2) against omega.
SweepTable phase_sweep(const FrequencyScenario& scn,
                       std::span<const double> phases, double h);

/// Same estimate at the scenario phase for each window length in r_grid.
/// Every r must be a multiple of h.
SweepTable horizon_sweep(const FrequencyScenario& scn,
                         std::span<const double> r_grid, double h);

}  // namespace deadbeat
