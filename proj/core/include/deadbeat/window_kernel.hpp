#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deadbeat/numerics.hpp"
#include "deadbeat/system_model.hpp"

namespace deadbeat {

/// Uniformly sampled input/output record over one window [0, r] in
/// window-local time. Between nodes y is interpolated by the cubic through
/// the four nearest samples; u is held from the left node.
struct IoWindow {
  Grid grid;
  std::vector<Vector> y;
  std::vector<Vector> u;

  double duration() const { return grid.duration(); }
  /// Sizes, grid validity and membership of every sample in Omega and U.
  void validate(const SystemSpec& spec) const;
};

/// Per-node transition matrix, forced response and the output-side
/// quantities q, xi, p along one window. C holds the output coupling matrix
/// (n-by-k) evaluated at each node.
struct WindowComputation {
  std::vector<Matrix> phi;
  std::vector<Vector> theta;
  std::vector<Matrix> q;   // n-by-k
  std::vector<Vector> xi;  // k
  std::vector<Vector> p;   // k
  std::vector<Matrix> c;   // n-by-k

  std::size_t size() const { return phi.size(); }
};

struct GramSummary {
  Matrix Q;
  Vector v;
  double smallest_pivot = 0.0;
  /// lambda_max / lambda_min, infinity when lambda_min <= 0.
  double condition_estimate = 0.0;
  Vector eigenvalues;  // ascending
};

struct ObservabilityCertificate {
  bool strongly_observable = false;
  double smallest_eigenvalue = 0.0;
  double threshold = 0.0;
  /// Unit eigenvector of the smallest eigenvalue; empty when observable.
  Vector null_direction;
};

inline constexpr double kDefaultPivotFloor = 1e-10;
inline constexpr double kDefaultRelThreshold = 1e-8;

/// Jointly integrates
///   dPhi/dt = A Phi,  dtheta/dt = A theta + b,  dq/dt = Phi' C,
///   dxi/dt = f + C' theta
/// with RK4 on the window grid, then p = y - y(0) - xi.
WindowComputation compute_window(const SystemSpec& spec,
                                 const IoWindow& window);

/// Q = int q q' and v = int q p by the trapezoid rule, with diagnostics.
GramSummary gram(const WindowComputation& wc, const Grid& grid);

/// Q^{-1} v without forming the inverse; throws kNotPositiveDefinite.
Vector reconstruct_initial(const GramSummary& gs,
                           double pivot_floor = kDefaultPivotFloor);

ObservabilityCertificate observability_certificate(
    const GramSummary& gs, double rel_threshold = kDefaultRelThreshold);

/// Determinant of the n-by-n matrix whose row i is C'(t_i) Phi(t_i). Only
/// defined for single-output systems.
double determinant_condition(const WindowComputation& wc,
                             std::span<const std::size_t> node_indices);

struct ReconstructionOptions {
  double pivot_floor = kDefaultPivotFloor;
  /// Also require the Gram certificate when positive.
  double rel_threshold = 0.0;
};

/// Everything the window reconstruction produced. `x_end` is empty when the
/// window was degenerate; `failure` then says why.
struct WindowEstimate {
  bool degenerate = false;
  std::string failure;
  Vector x0;     // estimate at the window start
  Vector x_end;  // Phi(r) x0 + theta(r)
  Matrix phi_end;
  Vector theta_end;
  GramSummary gram;
};

/// Non-throwing reconstruction used by the hybrid observer.
WindowEstimate try_apply_p(const SystemSpec& spec, const IoWindow& window,
                           const ReconstructionOptions& options = {});

/// Unmeasured state at the window end, Phi(r) Q^{-1} int q p + theta(r).
/// Throws kNotPositiveDefinite on a degenerate window.
Vector apply_p(const SystemSpec& spec, const IoWindow& window,
               double pivot_floor = kDefaultPivotFloor);

}  // namespace deadbeat
