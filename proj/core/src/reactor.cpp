#include "deadbeat/reactor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "deadbeat/error.hpp"

namespace deadbeat {

ReactorParams ReactorParams::lumped() {
  ReactorParams p;
  p.E1 = 600.0;
  p.E2 = 600.0;
  p.k2 = p.J1 * p.k1 / (p.J1 + p.J2);
  return p;
}

void ReactorParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::kInvalidParams, what);
  };
  const double all[] = {k1, k2, E1, E2, J1, J2, h_coef,
                        Ts, c1_bar, c2_bar, Tmin, Tmax, a_margin};
  for (double v : all) {
    if (!(v > 0.0) || !std::isfinite(v)) fail("all parameters must be > 0");
  }
  if (!(Tmin <= Ts)) fail("Tmin must not exceed Ts");
  if (!(Tmin < Tmax)) fail("Tmin must be below Tmax");
  if (!((J1 * k1 * c1_bar + J2 * k2 * c2_bar) / h_coef + Ts <= Tmax)) {
    fail("(J1 k1 c1_bar + J2 k2 c2_bar)/h_coef + Ts must not exceed Tmax");
  }
  if (E1 >= E2) {
    if (!(k1 / k2 * c1_bar < c2_bar)) fail("need (k1/k2) c1_bar < c2_bar");
  } else if (!(k1 / k2 * std::exp((E2 - E1) / Tmin) * c1_bar < c2_bar)) {
    fail("need (k1/k2) exp((E2-E1)/Tmin) c1_bar < c2_bar");
  }
}

SystemSpec reactor_spec(const ReactorParams& p) {
  p.validate();
  SystemSpec spec;
  spec.name = "reactor";
  spec.n = 2;
  spec.k = 1;
  spec.m = 0;
  spec.eval_A = [p](const Vector& y, const Vector&) {
    const double r1 = p.k1 * std::exp(-p.E1 / y(0));
    const double r2 = p.k2 * std::exp(-p.E2 / y(0));
    Matrix A(2, 2);
    A << -r1, 0.0, r1, -r2;
    return A;
  };
  spec.eval_b = [](const Vector&, const Vector&) -> Vector {
    return Vector::Zero(2);
  };
  spec.eval_C = [p](const Vector& y) {
    Matrix C(2, 1);
    C << p.J1 * p.k1 * std::exp(-p.E1 / y(0)),
        p.J2 * p.k2 * std::exp(-p.E2 / y(0));
    return C;
  };
  spec.eval_f = [p](const Vector& y, const Vector&) -> Vector {
    return Vector::Constant(1, p.h_coef * (p.Ts - y(0)));
  };
  spec.in_output_domain = [p](const Vector& y) {
    return y.size() == 1 && y(0) > p.Tmin && y(0) < p.Tmax;
  };
  spec.in_domain = [p, omega = spec.in_output_domain](const Vector& x,
                                                      const Vector& y) {
    return x.size() == 2 && x(0) > 0.0 && x(0) < p.c1_bar && x(1) > 0.0 &&
           x(1) < p.c2_bar && omega(y);
  };
  spec.in_input_set = [](const Vector& u) { return u.size() == 0; };
  return spec;
}

double hypothesis_lhs(const ReactorParams& p, double T) {
  return T * T / ((p.E2 - p.E1) * p.J1) * std::exp(-p.E2 / T) *
         ((p.J1 + p.J2) * p.k2 - p.J1 * p.k1 * std::exp((p.E2 - p.E1) / T));
}

std::vector<double> temperature_grid(const ReactorParams& p,
                                     std::size_t count) {
  std::vector<double> grid(count);
  const double width = (p.Tmax - p.Tmin) / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = p.Tmin + (static_cast<double>(i) + 0.5) * width;
  }
  return grid;
}

namespace {

bool rates_lumped(const ReactorParams& p) {
  const double lhs = (p.J1 + p.J2) * p.k2;
  const double rhs = p.J1 * p.k1;
  return std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace

HypothesisResult check_hypothesis(const ReactorParams& p,
                                  ReactorHypothesis which,
                                  std::span<const double> T_grid) {
  HypothesisResult res;
  const double inf = std::numeric_limits<double>::infinity();
  if (p.E1 == p.E2) {
    res.holds = !rates_lumped(p);
    res.margin = res.holds ? inf : 0.0;
    res.worst_T = std::numeric_limits<double>::quiet_NaN();
    return res;
  }

  const double rate_gap = (p.J1 + p.J2) * p.k2 - p.J1 * p.k1;
  res.automatic = which == ReactorHypothesis::kA1
                      ? (p.E1 < p.E2 && rate_gap < 0.0)
                      : (p.E1 > p.E2 && rate_gap > 0.0);

  // Signed so that "larger is better" for either hypothesis.
  const double sign = which == ReactorHypothesis::kA1 ? -1.0 : 1.0;
  res.margin = inf;
  res.worst_T = std::numeric_limits<double>::quiet_NaN();
  for (double T : T_grid) {
    const double lhs = hypothesis_lhs(p, T);
    if (!(lhs / p.h_coef + T > p.Ts)) continue;
    ++res.gated;
    const double m = sign * lhs;
    if (m < res.margin) {
      res.margin = m;
      res.worst_T = T;
    }
  }
  res.holds = res.margin >= p.a_margin;
  return res;
}

double min_window_reactor(const ReactorParams& p) {
  if (p.E1 == p.E2) {
    if (rates_lumped(p)) {
      throw Error(ErrorKind::kHypothesisFails,
                  "E1 = E2 and (J1 + J2) k2 = J1 k1: only the lumped "
                  "quantity is observable");
    }
    return kEqualActivationWindow;
  }
  const auto grid = temperature_grid(p);
  const bool a1 = check_hypothesis(p, ReactorHypothesis::kA1, grid).holds;
  const bool a2 = check_hypothesis(p, ReactorHypothesis::kA2, grid).holds;
  if (!a1 && !a2) {
    throw Error(ErrorKind::kHypothesisFails,
                "neither hypothesis holds with margin a_margin");
  }
  return (p.Tmax - p.Tmin) / p.a_margin;
}

ReactorGains reactor_gains(std::span<const double> T, const Grid& grid,
                           const ReactorParams& p) {
  grid.validate();
  if (T.size() != grid.count) {
    throw Error(ErrorKind::kLengthMismatch, "one temperature per grid node");
  }
  const std::size_t N = grid.count;
  std::vector<double> e1(N), rate1(N), rate2(N), p_res(N), cooling(N);
  for (std::size_t j = 0; j < N; ++j) {
    if (!(T[j] > p.Tmin && T[j] < p.Tmax)) {
      throw Error(ErrorKind::kDomainViolation,
                  "temperature sample outside (Tmin, Tmax)", j);
    }
    e1[j] = std::exp(-p.E1 / T[j]);
    rate1[j] = p.k1 * e1[j];
    rate2[j] = p.k2 * std::exp(-p.E2 / T[j]);
    cooling[j] = p.h_coef * (p.Ts - T[j]);
  }
  const auto K1 = cumulative_cubic(rate1, grid);
  const auto K2 = cumulative_cubic(rate2, grid);
  const auto cool_int = cumulative_cubic(cooling, grid);

  // inner(t) = int_0^t exp(-E1/T(s) - (K2(t) - K2(s)) - K1(s)) ds
  std::vector<double> weighted(N);
  for (std::size_t j = 0; j < N; ++j) weighted[j] = e1[j] * std::exp(K2[j] - K1[j]);
  const auto weighted_int = cumulative_cubic(weighted, grid);

  ReactorGains g;
  g.phi1.resize(N);
  g.phi2.resize(N);
  std::vector<double> inner(N), s11(N), s22(N), s12(N), sp1(N), sp2(N);
  for (std::size_t j = 0; j < N; ++j) {
    inner[j] = std::exp(-K2[j]) * weighted_int[j];
    g.phi1[j] = (p.J1 + p.J2) * (1.0 - std::exp(-K1[j])) -
                p.J2 * p.k1 * inner[j];
    g.phi2[j] = p.J2 * (1.0 - std::exp(-K2[j]));
    p_res[j] = T[j] - T[0] - cool_int[j];
    s11[j] = g.phi1[j] * g.phi1[j];
    s22[j] = g.phi2[j] * g.phi2[j];
    s12[j] = g.phi1[j] * g.phi2[j];
    sp1[j] = p_res[j] * g.phi1[j];
    sp2[j] = p_res[j] * g.phi2[j];
  }
  const double I11 = trapezoid(s11, grid);
  const double I22 = trapezoid(s22, grid);
  const double I12 = trapezoid(s12, grid);
  const double P1 = trapezoid(sp1, grid);
  const double P2 = trapezoid(sp2, grid);
  const double den = I11 * I22 - I12 * I12;
  if (!(I11 * I22 > 0.0) || !(den > 1e-10 * I11 * I22)) {
    throw Error(ErrorKind::kSingularDenominator,
                "phi1/phi2 Gram is numerically singular", std::nullopt, den);
  }
  g.G1 = (I22 * P1 - I12 * P2) / den;
  g.G2 = (I11 * P2 - I12 * P1) / den;

  g.phi_end = Matrix(2, 2);
  g.phi_end << std::exp(-K1.back()), 0.0, p.k1 * inner.back(),
      std::exp(-K2.back());
  Vector G(2);
  G << g.G1, g.G2;
  g.x_end = g.phi_end * G;
  return g;
}

double optimal_stop(const Vector& z, double T, const ReactorParams& p) {
  return p.k1 * std::exp(-p.E1 / T) * z(0) - p.k2 * std::exp(-p.E2 / T) * z(1);
}

}  // namespace deadbeat
