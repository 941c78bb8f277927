#include "deadbeat/plant_sim.hpp"

#include <cmath>
#include <string>

#include "deadbeat/error.hpp"

namespace deadbeat {

SensorModel SensorModel::sinusoid(double amplitude, double frequency) {
  SensorModel s;
  s.kind = Kind::kSinusoidNoise;
  s.amplitude = amplitude;
  s.frequency = frequency;
  s.validate();
  return s;
}

void SensorModel::validate() const {
  if (kind == Kind::kSinusoidNoise &&
      (!(amplitude >= 0.0) || !(frequency > 0.0))) {
    throw Error(ErrorKind::kInvalidArgument,
                "sinusoid noise needs amplitude >= 0 and frequency > 0");
  }
}

Trace simulate_plant(const SystemSpec& spec, const InputSignal& input,
                     const SimConfig& cfg) {
  const std::size_t steps = whole_steps(cfg.t_end, cfg.h, "sim.t_end");
  if (static_cast<std::size_t>(cfg.x0.size()) != spec.n ||
      static_cast<std::size_t>(cfg.y0.size()) != spec.k ||
      input.dimension() != spec.m) {
    throw Error(ErrorKind::kDimensionMismatch,
                "initial condition or input size does not match " + spec.name);
  }
  if (!spec.in_domain(cfg.x0, cfg.y0)) {
    throw Error(ErrorKind::kDomainViolation,
                "initial condition (x0, y0) is outside O", 0);
  }

  Trace trace;
  trace.grid = Grid{0.0, cfg.h, steps + 1};
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto k = static_cast<Eigen::Index>(spec.k);
  const bool held = input.kind() != InputSignal::Kind::kClosure;

  Vector s(n + k);
  s << cfg.x0, cfg.y0;
  trace.x_true.reserve(steps + 1);
  trace.y_true.reserve(steps + 1);
  trace.u.reserve(steps + 1);

  for (std::size_t j = 0; j <= steps; ++j) {
    const double t = trace.grid.time(j);
    Vector uj = input.at(t);
    if (!spec.in_input_set(uj)) {
      throw Error(ErrorKind::kDomainViolation,
                  "input is outside U at node " + std::to_string(j), j);
    }
    trace.x_true.emplace_back(s.head(n));
    trace.y_true.emplace_back(s.tail(k));
    trace.u.push_back(uj);
    if (j == steps) break;

    const VectorField field = [&](double tau, const Vector& st) -> Vector {
      const Vector u = held ? uj : input.at(tau);
      const auto d = eval_rhs_unchecked(spec, st.head(n), st.tail(k), u);
      Vector out(n + k);
      out << d.xdot, d.ydot;
      return out;
    };
    s = rk4_step(field, t, s, cfg.h);
    if (!s.allFinite()) {
      throw Error(ErrorKind::kNonFiniteState,
                  "plant state became non-finite at node " +
                      std::to_string(j + 1),
                  j + 1);
    }
    if (!spec.in_domain(s.head(n), s.tail(k))) {
      throw Error(ErrorKind::kDomainExit,
                  "plant left O at node " + std::to_string(j + 1), j + 1);
    }
  }
  trace.y_meas = trace.y_true;
  return trace;
}

Trace corrupt(Trace trace, const SensorModel& sensor) {
  sensor.validate();
  if (sensor.kind == SensorModel::Kind::kClean || sensor.amplitude == 0.0) {
    return trace;
  }
  for (std::size_t j = 0; j < trace.y_meas.size(); ++j) {
    const double noise =
        sensor.amplitude * std::sin(sensor.frequency * trace.grid.time(j));
    trace.y_meas[j] = trace.y_true[j].array() + noise;
  }
  return trace;
}

}  // namespace deadbeat
