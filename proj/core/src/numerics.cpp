#include "deadbeat/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "deadbeat/error.hpp"

namespace deadbeat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kNonFiniteState: return "NonFiniteState";
    case ErrorKind::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::kDomainViolation: return "DomainViolation";
    case ErrorKind::kDomainExit: return "DomainExit";
    case ErrorKind::kWrongOutputDimension: return "WrongOutputDimension";
    case ErrorKind::kKappaVanished: return "KappaVanished";
    case ErrorKind::kGramDegenerate: return "GramDegenerate";
    case ErrorKind::kInvalidParams: return "InvalidParams";
    case ErrorKind::kHypothesisFails: return "HypothesisFails";
    case ErrorKind::kSingularDenominator: return "SingularDenominator";
    case ErrorKind::kNonNegativeZ2: return "NonNegativeZ2";
  }
  return "Unknown";
}

void Grid::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::kInvalidArgument, "grid step must be positive");
  }
  if (count < 2) {
    throw Error(ErrorKind::kInvalidArgument, "grid needs at least two nodes");
  }
}

Grid Grid::over(double t0, double span, std::size_t steps) {
  if (steps == 0) {
    throw Error(ErrorKind::kInvalidArgument, "grid needs at least one step");
  }
  return Grid{t0, span / static_cast<double>(steps), steps + 1};
}

std::size_t whole_steps(double span, double h, std::string_view what) {
  if (!(h > 0.0) || !(span > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + " and the step must be positive");
  }
  const double ratio = span / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + " must be an integer multiple of h");
  }
  return static_cast<std::size_t>(rounded);
}

Vector rk4_step(const VectorField& field, double t, const Vector& x,
                double h) {
  const double half = 0.5 * h;
  const Vector k1 = field(t, x);
  const Vector k2 = field(t + half, x + half * k1);
  const Vector k3 = field(t + half, x + half * k2);
  const Vector k4 = field(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Vector interpolate_cubic(std::span<const Vector> samples, std::size_t j,
                         double frac) {
  const std::size_t N = samples.size();
  if (N < 2 || j + 1 >= N) {
    throw Error(ErrorKind::kInvalidArgument, "interpolation index out of range");
  }
  if (frac == 0.0) return samples[j];
  if (frac == 1.0) return samples[j + 1];
  if (N < 4) return samples[j] + frac * (samples[j + 1] - samples[j]);

  const std::size_t start = std::min(j == 0 ? 0 : j - 1, N - 4);
  const double x = static_cast<double>(j - start) + frac;
  Vector out = Vector::Zero(samples[j].size());
  for (std::size_t a = 0; a < 4; ++a) {
    double w = 1.0;
    for (std::size_t b = 0; b < 4; ++b) {
      if (b == a) continue;
      w *= (x - static_cast<double>(b)) /
           (static_cast<double>(a) - static_cast<double>(b));
    }
    out += w * samples[start + a];
  }
  return out;
}

std::vector<Vector> integrate_rk4(const VectorField& field, const Vector& init,
                                  const Grid& grid) {
  grid.validate();
  if (!init.allFinite()) {
    throw Error(ErrorKind::kNonFiniteState, "initial state is not finite", 0);
  }
  std::vector<Vector> out;
  out.reserve(grid.count);
  out.push_back(init);
  for (std::size_t j = 0; j + 1 < grid.count; ++j) {
    Vector next = rk4_step(field, grid.time(j), out.back(), grid.h);
    if (!next.allFinite()) {
      throw Error(ErrorKind::kNonFiniteState,
                  "state became non-finite at node " + std::to_string(j + 1),
                  j + 1);
    }
    out.push_back(std::move(next));
  }
  return out;
}

double trapezoid(std::span<const double> samples, const Grid& grid) {
  if (samples.size() != grid.count) {
    throw Error(ErrorKind::kLengthMismatch,
                "expected " + std::to_string(grid.count) + " samples, got " +
                    std::to_string(samples.size()));
  }
  if (samples.size() < 2) return 0.0;
  double interior = 0.0;
  for (std::size_t j = 1; j + 1 < samples.size(); ++j) interior += samples[j];
  return grid.h * (0.5 * (samples.front() + samples.back()) + interior);
}

std::vector<double> cumulative_trapezoid(std::span<const double> samples,
                                         const Grid& grid) {
  if (samples.size() != grid.count) {
    throw Error(ErrorKind::kLengthMismatch,
                "expected " + std::to_string(grid.count) + " samples, got " +
                    std::to_string(samples.size()));
  }
  std::vector<double> out(samples.size(), 0.0);
  for (std::size_t j = 1; j < samples.size(); ++j) {
    out[j] = out[j - 1] + 0.5 * grid.h * (samples[j - 1] + samples[j]);
  }
  return out;
}

std::vector<double> cumulative_cubic(std::span<const double> samples,
                                     const Grid& grid) {
  const std::size_t N = samples.size();
  if (N < 4) return cumulative_trapezoid(samples, grid);
  if (N != grid.count) {
    throw Error(ErrorKind::kLengthMismatch,
                "expected " + std::to_string(grid.count) + " samples, got " +
                    std::to_string(N));
  }
  const double c = grid.h / 24.0;
  std::vector<double> out(N, 0.0);
  for (std::size_t j = 0; j + 1 < N; ++j) {
    double piece;
    if (j == 0) {
      piece = 9 * samples[0] + 19 * samples[1] - 5 * samples[2] + samples[3];
    } else if (j + 2 == N) {
      piece = samples[j - 2] - 5 * samples[j - 1] + 19 * samples[j] +
              9 * samples[j + 1];
    } else {
      piece = -samples[j - 1] + 13 * samples[j] + 13 * samples[j + 1] -
              samples[j + 2];
    }
    out[j + 1] = out[j] + c * piece;
  }
  return out;
}

namespace {

void check_symmetric_square(const Matrix& Q) {
  if (Q.rows() != Q.cols() || Q.rows() == 0) {
    throw Error(ErrorKind::kDimensionMismatch, "matrix must be square");
  }
  const double scale = std::max(Q.cwiseAbs().maxCoeff(), 1e-300);
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::kInvalidArgument, "matrix is not symmetric");
  }
}

// In-place lower Cholesky; stops at the first non-positive pivot and returns
// the index of that pivot (or n on success). `pivots` receives d_j before the
// square root.
Eigen::Index cholesky(const Matrix& Q, Matrix& L, std::vector<double>& pivots) {
  const Eigen::Index n = Q.rows();
  L = Matrix::Zero(n, n);
  pivots.clear();
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = Q(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    pivots.push_back(d);
    if (!(d > 0.0)) return j;
    L(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = Q(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return n;
}

}  // namespace

double smallest_cholesky_pivot(const Matrix& Q) {
  check_symmetric_square(Q);
  Matrix L;
  std::vector<double> pivots;
  cholesky(Q, L, pivots);
  return *std::min_element(pivots.begin(), pivots.end());
}

SpdSolution spd_solve(const Matrix& Q, const Vector& rhs, double pivot_floor) {
  check_symmetric_square(Q);
  if (rhs.size() != Q.rows()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "right-hand side length does not match the matrix");
  }
  const auto n = static_cast<double>(Q.rows());
  const double floor = pivot_floor * Q.trace() / n;

  Matrix L;
  std::vector<double> pivots;
  const Eigen::Index stop = cholesky(Q, L, pivots);
  const double smallest = *std::min_element(pivots.begin(), pivots.end());
  if (stop != Q.rows() || !(smallest > floor) || !(Q.trace() > 0.0)) {
    throw Error(ErrorKind::kNotPositiveDefinite,
                "Cholesky pivot " + std::to_string(smallest) +
                    " is not above the floor " + std::to_string(floor),
                std::nullopt, smallest);
  }

  // L y = rhs, then L' x = y.
  Vector y(rhs.size());
  for (Eigen::Index i = 0; i < rhs.size(); ++i) {
    double s = rhs(i);
    for (Eigen::Index k = 0; k < i; ++k) s -= L(i, k) * y(k);
    y(i) = s / L(i, i);
  }
  Vector x(rhs.size());
  for (Eigen::Index i = rhs.size() - 1; i >= 0; --i) {
    double s = y(i);
    for (Eigen::Index k = i + 1; k < rhs.size(); ++k) s -= L(k, i) * x(k);
    x(i) = s / L(i, i);
  }
  return {std::move(x), smallest};
}

}  // namespace deadbeat
