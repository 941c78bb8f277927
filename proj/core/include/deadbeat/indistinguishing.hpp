#pragma once

#include <functional>
#include <vector>

#include "deadbeat/numerics.hpp"
#include "deadbeat/system_model.hpp"

namespace deadbeat {

/// Two decoupled unmeasured modes feeding one output through an input:
///
///   x1dot = a1(y) x1,  x2dot = a2(y) x2,  ydot = u + c1(y) x1 + c2(y) x2
///
/// with c1, c2 > 0. `kappa` must be d/dy ln(c1(y)/c2(y)).
struct Example26Spec {
  std::function<double(double)> a1;
  std::function<double(double)> a2;
  std::function<double(double)> c1;
  std::function<double(double)> c2;
  std::function<double(double)> kappa;
};

/// The canonical instance a1 = -1, a2 = -2, c1 = exp(rate*y), c2 = 1, for
/// which kappa is the constant `rate`.
Example26Spec example26_exponential(double a1 = -1.0, double a2 = -2.0,
                                    double rate = 1.0);

/// The plant as a general SystemSpec (n = 2, k = 1, m = 1, O = R^3).
SystemSpec example26_system(const Example26Spec& ex);

struct IndistinguishingInput {
  std::vector<double> u;
  std::vector<double> y;
};

/// Builds the input under which (x0, y0) cannot be told apart from a family
/// of other initial states: y follows ydot = (a2 - a1)/kappa and u cancels
/// the state contribution. Throws kKappaVanished when kappa reaches zero and
/// kDomainExit when c1 or c2 stops being positive.
IndistinguishingInput indistinguishing_input(const Example26Spec& ex,
                                             const Vector& x0, double y0,
                                             const Grid& grid);

/// The initial state (xi1, xi2) that produces the same output as (x0, y0)
/// under the constructed input.
Vector indistinguishable_partner(const Example26Spec& ex, const Vector& x0,
                                 double y0, double xi1);

/// Input signal that linearly interpolates constructed samples; keeps the
/// plant simulation consistent with the smooth construction to O(h^2).
InputSignal interpolated_input(const Grid& grid, std::vector<double> u);

}  // namespace deadbeat
