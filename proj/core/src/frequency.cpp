#include "deadbeat/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "deadbeat/error.hpp"

namespace deadbeat {

void FrequencyScenario::validate() const {
  if (!(amplitude > 0.0) || !(omega > 0.0) || !(r > 0.0) ||
      !(noise_amplitude >= 0.0) || !(noise_frequency > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "frequency scenario needs A > 0, omega > 0, r > 0, a >= 0, "
                "f > 0");
  }
}

Vector FrequencyScenario::initial_x() const {
  Vector x(2);
  x << amplitude * omega * std::cos(phase), -omega * omega;
  return x;
}

Vector FrequencyScenario::initial_y() const {
  return Vector::Constant(1, amplitude * std::sin(phase));
}

SensorModel FrequencyScenario::sensor() const {
  if (noise_amplitude == 0.0) return SensorModel::clean();
  return SensorModel::sinusoid(noise_amplitude, noise_frequency);
}

SystemSpec freq_spec(bool relaxed) {
  SystemSpec spec;
  spec.name = relaxed ? "frequency-relaxed" : "frequency";
  spec.n = 2;
  spec.k = 1;
  spec.m = 0;
  spec.eval_A = [](const Vector& y, const Vector&) {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 1) = y(0);
    return A;
  };
  spec.eval_b = [](const Vector&, const Vector&) -> Vector {
    return Vector::Zero(2);
  };
  spec.eval_C = [](const Vector&) {
    Matrix C(2, 1);
    C << 1.0, 0.0;
    return C;
  };
  spec.eval_f = [](const Vector&, const Vector&) -> Vector {
    return Vector::Zero(1);
  };
  spec.in_output_domain = [](const Vector& y) {
    return y.size() == 1 && std::isfinite(y(0));
  };
  spec.in_domain = [relaxed](const Vector& x, const Vector& y) {
    if (x.size() != 2 || y.size() != 1 || !x.allFinite() || !y.allFinite()) {
      return false;
    }
    const bool off_manifold = y(0) * y(0) + x(0) * x(0) > 0.0;
    return relaxed ? off_manifold : off_manifold && x(1) < 0.0;
  };
  spec.in_input_set = [](const Vector& u) { return u.size() == 0; };
  return spec;
}

FrequencyEstimate freq_closed_form(const IoWindow& window) {
  const Grid& grid = window.grid;
  grid.validate();
  if (window.y.size() != grid.count) {
    throw Error(ErrorKind::kLengthMismatch, "one y sample per grid node");
  }
  const std::size_t N = grid.count;
  std::vector<double> y(N), t(N);
  for (std::size_t j = 0; j < N; ++j) {
    if (window.y[j].size() != 1) {
      throw Error(ErrorKind::kWrongOutputDimension, "needs a scalar output");
    }
    y[j] = window.y[j](0);
    t[j] = static_cast<double>(j) * grid.h;
  }
  const auto y_int = cumulative_cubic(y, grid);
  const auto phi = cumulative_cubic(y_int, grid);

  std::vector<double> t2(N), phi2(N), tphi(N), pt(N), pphi(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double p = y[j] - y[0];
    t2[j] = t[j] * t[j];
    phi2[j] = phi[j] * phi[j];
    tphi[j] = t[j] * phi[j];
    pt[j] = p * t[j];
    pphi[j] = p * phi[j];
  }
  const double I_phi2 = trapezoid(phi2, grid);
  const double I_tphi = trapezoid(tphi, grid);
  const double I_pt = trapezoid(pt, grid);
  const double I_pphi = trapezoid(pphi, grid);
  const double I_y = y_int.back();
  // r^3 taken as 3 * integral of t^2 under the same rule as the others.
  const double r3 = 3.0 * trapezoid(t2, grid);

  const double den = r3 * I_phi2 - 3.0 * I_tphi * I_tphi;
  if (!(r3 * I_phi2 > 0.0) || !(den > 1e-10 * r3 * I_phi2)) {
    throw Error(ErrorKind::kSingularDenominator,
                "frequency window is degenerate", std::nullopt, den);
  }
  FrequencyEstimate est;
  est.z1 = (3.0 * (I_phi2 - I_y * I_tphi) * I_pt +
            (r3 * I_y - 3.0 * I_tphi) * I_pphi) /
           den;
  est.z2 = (-3.0 * I_tphi * I_pt + r3 * I_pphi) / den;
  return est;
}

double omega_hat(double z2) {
  if (!(z2 < 0.0)) {
    throw Error(ErrorKind::kNonNegativeZ2,
                "z2 = " + std::to_string(z2) + " is not negative",
                std::nullopt, z2);
  }
  return std::sqrt(-z2);
}

double sweep_step(const FrequencyScenario& scn) {
  scn.validate();
  double h_max = scn.r / 2000.0;
  if (scn.noise_amplitude > 0.0) {
    h_max = std::min(h_max, 2.0 * std::numbers::pi / (20.0 * scn.noise_frequency));
  }
  const double steps = std::ceil(scn.r / h_max - 1e-9);
  return scn.r / steps;
}

IoWindow scenario_window(const FrequencyScenario& scn, double h) {
  scn.validate();
  const SystemSpec spec = freq_spec();
  SimConfig cfg;
  cfg.t_end = scn.r;
  cfg.h = h;
  cfg.x0 = scn.initial_x();
  cfg.y0 = scn.initial_y();
  const Trace trace =
      corrupt(simulate_plant(spec, InputSignal::none(), cfg), scn.sensor());
  IoWindow window;
  window.grid = trace.grid;
  window.y = trace.y_meas;
  window.u = trace.u;
  return window;
}

namespace {

void record(SweepTable& table, double value, double w_hat, double omega) {
  const double err = std::abs(w_hat - omega) / omega;
  table.sweep_value.push_back(value);
  table.omega_hat.push_back(w_hat);
  table.rel_error.push_back(err);
  if (table.rel_error.size() == 1 || err > table.max_error) {
    table.max_error = err;
    table.argmax = value;
  }
}

double estimate_omega(const FrequencyScenario& scn, double h) {
  const IoWindow window = scenario_window(scn, h);
  const Vector x_end = apply_p(freq_spec(), window);
  return omega_hat(x_end(1));
}

}  // namespace

std::vector<double> phase_grid(std::size_t count) {
  std::vector<double> phases(count);
  for (std::size_t i = 0; i < count; ++i) {
    phases[i] = 2.0 * std::numbers::pi * static_cast<double>(i) /
                static_cast<double>(count);
  }
  return phases;
}

SweepTable phase_sweep(const FrequencyScenario& scn,
                       std::span<const double> phases, double h) {
  scn.validate();
  SweepTable table;
  for (double phase : phases) {
    FrequencyScenario point = scn;
    point.phase = phase;
    record(table, phase, estimate_omega(point, h), scn.omega);
  }
  return table;
}

SweepTable horizon_sweep(const FrequencyScenario& scn,
                         std::span<const double> r_grid, double h) {
  scn.validate();
  SweepTable table;
  for (double r : r_grid) {
    (void)whole_steps(r, h, "sweep r");
    FrequencyScenario point = scn;
    point.r = r;
    record(table, r, estimate_omega(point, h), scn.omega);
  }
  return table;
}

}  // namespace deadbeat
