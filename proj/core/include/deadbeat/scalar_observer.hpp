#pragma once

#include <functional>

#include "deadbeat/system_model.hpp"
#include "deadbeat/window_kernel.hpp"

namespace deadbeat {

/// Scalar plant xdot = a(y, u) x, ydot = f(y, u) + c(y) x. Inputs are scalar
/// (pass m = 0 windows with u treated as 0).
struct ScalarCoefficients {
  std::function<double(double y, double u)> a;
  std::function<double(double y, double u)> f;
  std::function<double(double y)> c;
};

/// The same plant as a SystemSpec. D is (0, inf) when `positive_state`,
/// otherwise R; Omega = R; U = R (m = 1) or empty (m = 0).
SystemSpec scalar_spec(const ScalarCoefficients& coeffs, std::size_t m = 0,
                       bool positive_state = false);

/// Single-fraction reset value of the scalar reduced-order observer, built by
/// nested quadrature (fourth-order running integrals, trapezoid outer). Throws kSingularDenominator when
/// int (int c exp(int a))^2 vanishes.
double scalar_observer_P(const IoWindow& window, const ScalarCoefficients& coeffs);

}  // namespace deadbeat
