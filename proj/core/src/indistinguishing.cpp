#include "deadbeat/indistinguishing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deadbeat/error.hpp"

namespace deadbeat {

Example26Spec example26_exponential(double a1, double a2, double rate) {
  Example26Spec ex;
  ex.a1 = [a1](double) { return a1; };
  ex.a2 = [a2](double) { return a2; };
  ex.c1 = [rate](double y) { return std::exp(rate * y); };
  ex.c2 = [](double) { return 1.0; };
  ex.kappa = [rate](double) { return rate; };
  return ex;
}

SystemSpec example26_system(const Example26Spec& ex) {
  SystemSpec spec;
  spec.name = "example26";
  spec.n = 2;
  spec.k = 1;
  spec.m = 1;
  spec.eval_A = [ex](const Vector& y, const Vector&) {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = ex.a1(y(0));
    A(1, 1) = ex.a2(y(0));
    return A;
  };
  spec.eval_b = [](const Vector&, const Vector&) -> Vector {
    return Vector::Zero(2);
  };
  spec.eval_C = [ex](const Vector& y) {
    Matrix C(2, 1);
    C << ex.c1(y(0)), ex.c2(y(0));
    return C;
  };
  spec.eval_f = [](const Vector&, const Vector& u) -> Vector { return u; };
  spec.in_domain = [](const Vector& x, const Vector& y) {
    return x.allFinite() && y.allFinite();
  };
  spec.in_output_domain = [](const Vector& y) { return y.allFinite(); };
  spec.in_input_set = [](const Vector& u) { return u.allFinite(); };
  return spec;
}

namespace {

constexpr double kKappaFloor = 1e-12;

void check_point(const Example26Spec& ex, double y, std::size_t node) {
  if (!std::isfinite(y)) {
    throw Error(ErrorKind::kDomainExit,
                "output left R at node " + std::to_string(node), node);
  }
  if (std::abs(ex.kappa(y)) <= kKappaFloor) {
    throw Error(ErrorKind::kKappaVanished,
                "kappa vanished at node " + std::to_string(node), node,
                ex.kappa(y));
  }
  if (!(ex.c1(y) > 0.0) || !(ex.c2(y) > 0.0)) {
    throw Error(ErrorKind::kDomainExit,
                "c1 or c2 is not positive at node " + std::to_string(node),
                node);
  }
}

}  // namespace

IndistinguishingInput indistinguishing_input(const Example26Spec& ex,
                                             const Vector& x0, double y0,
                                             const Grid& grid) {
  grid.validate();
  if (x0.size() != 2) {
    throw Error(ErrorKind::kDimensionMismatch, "x0 must have two entries");
  }
  check_point(ex, y0, 0);

  // state = (y, int_0^t a2(y) ds)
  const VectorField field = [&ex](double, const Vector& s) -> Vector {
    const double kappa = ex.kappa(s(0));
    if (std::abs(kappa) <= kKappaFloor) {
      throw Error(ErrorKind::kKappaVanished, "kappa vanished between nodes");
    }
    Vector d(2);
    d << (ex.a2(s(0)) - ex.a1(s(0))) / kappa, ex.a2(s(0));
    return d;
  };
  Vector init(2);
  init << y0, 0.0;
  const auto traj = integrate_rk4(field, init, grid);

  const double lumped = x0(1) + x0(0) * ex.c1(y0) / ex.c2(y0);
  IndistinguishingInput out;
  out.u.reserve(grid.count);
  out.y.reserve(grid.count);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double y = traj[j](0);
    check_point(ex, y, j);
    const double drift = (ex.a2(y) - ex.a1(y)) / ex.kappa(y);
    out.u.push_back(drift - ex.c2(y) * std::exp(traj[j](1)) * lumped);
    out.y.push_back(y);
  }
  return out;
}

Vector indistinguishable_partner(const Example26Spec& ex, const Vector& x0,
                                 double y0, double xi1) {
  Vector xi(2);
  xi << xi1, x0(1) + ex.c1(y0) / ex.c2(y0) * (x0(0) - xi1);
  return xi;
}

InputSignal interpolated_input(const Grid& grid, std::vector<double> u) {
  if (u.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "need at least two samples");
  }
  return InputSignal::closure(1, [grid, u = std::move(u)](double t) {
    const double pos = std::clamp((t - grid.t0) / grid.h, 0.0,
                                  static_cast<double>(u.size() - 1));
    const auto j = std::min(static_cast<std::size_t>(pos), u.size() - 2);
    const double frac = pos - static_cast<double>(j);
    Vector v(1);
    v(0) = u[j] + frac * (u[j + 1] - u[j]);
    return v;
  });
}

}  // namespace deadbeat
