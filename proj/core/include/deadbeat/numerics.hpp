#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace deadbeat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform sample grid: node j sits at t0 + j*h.
struct Grid {
  double t0 = 0.0;
  double h = 0.0;
  std::size_t count = 0;

  double time(std::size_t j) const { return t0 + static_cast<double>(j) * h; }
  double duration() const {
    return count == 0 ? 0.0 : h * static_cast<double>(count - 1);
  }
  /// Throws kInvalidArgument unless h > 0 and count >= 2.
  void validate() const;

  /// Grid over [t0, t0 + span] with `steps` intervals.
  static Grid over(double t0, double span, std::size_t steps);
};

/// Number of whole steps of size h in `span`; throws kInvalidArgument when the
/// ratio is not an integer to within 1e-9 relative.
std::size_t whole_steps(double span, double h, std::string_view what);

using VectorField = std::function<Vector(double, const Vector&)>;

/// One classical Runge-Kutta step from (t, x) with step h.
Vector rk4_step(const VectorField& field, double t, const Vector& x, double h);

/// Fixed-step RK4 over the grid. Result has one state per grid node and
/// result[0] == init. Throws kNonFiniteState with the first bad node index.
std::vector<Vector> integrate_rk4(const VectorField& field, const Vector& init,
                                  const Grid& grid);

/// Composite trapezoidal rule over the grid.
double trapezoid(std::span<const double> samples, const Grid& grid);

/// Running trapezoid: out[j] = integral from node 0 to node j.
std::vector<double> cumulative_trapezoid(std::span<const double> samples,
                                         const Grid& grid);

/// Running integral with the exact integral of the local cubic interpolant on
/// each step (fourth order; trapezoid below four samples).
std::vector<double> cumulative_cubic(std::span<const double> samples,
                                     const Grid& grid);

bool all_finite(const Matrix& m);

/// Value between samples[j] and samples[j+1] at fraction `frac` of the step,
/// from the cubic through the four nearest samples (one-sided near the ends,
/// linear when fewer than four samples exist). All samples share one size.
Vector interpolate_cubic(std::span<const Vector> samples, std::size_t j,
                         double frac);

struct SpdSolution {
  Vector x;
  double smallest_pivot = 0.0;
};

/// Solves Q x = rhs through a Cholesky factorization. Every pivot must exceed
/// pivot_floor * trace(Q) / n, otherwise kNotPositiveDefinite is thrown with
/// the smallest pivot seen as its value.
SpdSolution spd_solve(const Matrix& Q, const Vector& rhs,
                      double pivot_floor = 1e-10);

/// Smallest Cholesky pivot of a symmetric matrix without a floor (may be
/// negative or zero for indefinite or singular input).
double smallest_cholesky_pivot(const Matrix& Q);

}  // namespace deadbeat
