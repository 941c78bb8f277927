#include "deadbeat/scalar_observer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "deadbeat/error.hpp"

namespace deadbeat {

SystemSpec scalar_spec(const ScalarCoefficients& coeffs, std::size_t m,
                       bool positive_state) {
  if (m > 1) {
    throw Error(ErrorKind::kDimensionMismatch, "scalar plant takes m <= 1");
  }
  auto input = [](const Vector& u) { return u.size() == 0 ? 0.0 : u(0); };
  SystemSpec spec;
  spec.name = "scalar";
  spec.n = 1;
  spec.k = 1;
  spec.m = m;
  spec.eval_A = [coeffs, input](const Vector& y, const Vector& u) {
    return Matrix::Constant(1, 1, coeffs.a(y(0), input(u)));
  };
  spec.eval_b = [](const Vector&, const Vector&) -> Vector {
    return Vector::Zero(1);
  };
  spec.eval_C = [coeffs](const Vector& y) {
    return Matrix::Constant(1, 1, coeffs.c(y(0)));
  };
  spec.eval_f = [coeffs, input](const Vector& y, const Vector& u) -> Vector {
    return Vector::Constant(1, coeffs.f(y(0), input(u)));
  };
  spec.in_domain = [positive_state](const Vector& x, const Vector& y) {
    return x.allFinite() && y.allFinite() && (!positive_state || x(0) > 0.0);
  };
  spec.in_output_domain = [](const Vector& y) { return y.allFinite(); };
  spec.in_input_set = [m](const Vector& u) {
    return static_cast<std::size_t>(u.size()) == m && u.allFinite();
  };
  return spec;
}

double scalar_observer_P(const IoWindow& window,
                         const ScalarCoefficients& coeffs) {
  const Grid& grid = window.grid;
  grid.validate();
  if (window.y.size() != grid.count || window.u.size() != grid.count) {
    throw Error(ErrorKind::kLengthMismatch, "one (y, u) sample per node");
  }
  const std::size_t N = grid.count;
  std::vector<double> y(N), u(N), a(N), f(N);
  for (std::size_t j = 0; j < N; ++j) {
    if (window.y[j].size() != 1) {
      throw Error(ErrorKind::kWrongOutputDimension, "needs a scalar output");
    }
    y[j] = window.y[j](0);
    u[j] = window.u[j].size() == 0 ? 0.0 : window.u[j](0);
    a[j] = coeffs.a(y[j], u[j]);
    f[j] = coeffs.f(y[j], u[j]);
  }
  const auto a_int = cumulative_cubic(a, grid);
  const auto f_int = cumulative_cubic(f, grid);
  std::vector<double> g(N);
  for (std::size_t j = 0; j < N; ++j) g[j] = coeffs.c(y[j]) * std::exp(a_int[j]);
  const auto q = cumulative_cubic(g, grid);

  std::vector<double> num(N), den(N);
  double q_peak = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const double p = y[j] - y[0] - f_int[j];
    num[j] = p * q[j];
    den[j] = q[j] * q[j];
    q_peak = std::max(q_peak, den[j]);
  }
  const double Q = trapezoid(den, grid);
  if (!(Q > 1e-10 * grid.duration() * q_peak) || !(Q > 0.0)) {
    throw Error(ErrorKind::kSingularDenominator,
                "scalar observer denominator vanishes", std::nullopt, Q);
  }
  return std::exp(a_int.back()) * trapezoid(num, grid) / Q;
}

}  // namespace deadbeat
