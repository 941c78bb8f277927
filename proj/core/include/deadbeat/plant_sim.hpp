#pragma once

#include <cstddef>
#include <vector>

#include "deadbeat/numerics.hpp"
#include "deadbeat/system_model.hpp"

namespace deadbeat {

struct SimConfig {
  double t_end = 0.0;
  double h = 0.0;
  Vector x0;
  Vector y0;
};

/// Measurement corruption. SinusoidNoise adds a*sin(f*t) to every output
/// component.
struct SensorModel {
  enum class Kind { kClean, kSinusoidNoise };
  Kind kind = Kind::kClean;
  double amplitude = 0.0;
  double frequency = 1.0;  // rad/s

  static SensorModel clean() { return {}; }
  static SensorModel sinusoid(double amplitude, double frequency);
  void validate() const;
};

/// Ground truth plus what the sensor delivered, one entry per grid node.
struct Trace {
  Grid grid;
  std::vector<Vector> x_true;
  std::vector<Vector> y_true;
  std::vector<Vector> y_meas;
  std::vector<Vector> u;

  std::size_t size() const { return y_meas.size(); }
};

/// RK4 on the coupled (x, y) dynamics over [0, t_end]. Membership in O is
/// checked at every node: kDomainExit carries the first node outside.
Trace simulate_plant(const SystemSpec& spec, const InputSignal& input,
                     const SimConfig& cfg);

Trace corrupt(Trace trace, const SensorModel& sensor);

}  // namespace deadbeat
