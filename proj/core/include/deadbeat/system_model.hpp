#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "deadbeat/numerics.hpp"

namespace deadbeat {

/// One system that is linear in its unmeasured state x:
///
///   xdot = A(y, u) x + b(y, u)
///   ydot = f(y, u) + C(y)' x
///
/// `eval_C` returns the n-by-k matrix whose column i holds c_{i,1..n}; its
/// transpose is the k-by-n output coupling.
struct SystemSpec {
  std::string name;
  std::size_t n = 0;  // unmeasured states
  std::size_t k = 0;  // outputs
  std::size_t m = 0;  // inputs

  std::function<Matrix(const Vector& y, const Vector& u)> eval_A;
  std::function<Vector(const Vector& y, const Vector& u)> eval_b;
  std::function<Matrix(const Vector& y)> eval_C;
  std::function<Vector(const Vector& y, const Vector& u)> eval_f;

  std::function<bool(const Vector& x, const Vector& y)> in_domain;
  std::function<bool(const Vector& y)> in_output_domain;
  std::function<bool(const Vector& u)> in_input_set;
};

struct PlantState {
  Vector x;
  Vector y;
};

struct PlantDerivative {
  Vector xdot;
  Vector ydot;
};

/// Admissible input signal u(t).
class InputSignal {
 public:
  enum class Kind { kConstant, kPiecewiseConstant, kClosure };

  static InputSignal constant(Vector u);
  /// values[j] holds on [t0 + j h, t0 + (j+1) h); the last value holds after.
  static InputSignal piecewise_constant(Grid grid, std::vector<Vector> values);
  static InputSignal closure(std::size_t m, std::function<Vector(double)> fn);
  /// The empty input for systems with m = 0.
  static InputSignal none() { return constant(Vector(0)); }

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return m_; }
  Vector at(double t) const;

 private:
  Kind kind_ = Kind::kConstant;
  std::size_t m_ = 0;
  Vector value_;
  Grid grid_;
  std::vector<Vector> values_;
  std::function<Vector(double)> fn_;
};

/// Right-hand side of the plant. Throws kDomainViolation if (x, y) is not in
/// O or u is not in U.
PlantDerivative eval_rhs(const SystemSpec& spec, const PlantState& state,
                         const Vector& u);

/// Same as eval_rhs but without domain checks; used inside integrators.
PlantDerivative eval_rhs_unchecked(const SystemSpec& spec, const Vector& x,
                                   const Vector& y, const Vector& u);

/// Constant-coefficient system
///   xdot = A x + b + B u,   ydot = f + F u + C' x
/// with O = R^{n+k}, U = R^m. B and F may be empty (m = 0).
SystemSpec make_lti(const Matrix& A, const Vector& b, const Matrix& C,
                    const Vector& f, const Matrix& B = Matrix(),
                    const Matrix& F = Matrix());

/// Dimension checks on what the evaluators return at one probe point.
void check_dimensions(const SystemSpec& spec, const Vector& y, const Vector& u);

}  // namespace deadbeat
