#include "deadbeat/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "deadbeat/error.hpp"

namespace deadbeat {

InputSignal InputSignal::constant(Vector u) {
  InputSignal s;
  s.kind_ = Kind::kConstant;
  s.m_ = static_cast<std::size_t>(u.size());
  s.value_ = std::move(u);
  return s;
}

InputSignal InputSignal::piecewise_constant(Grid grid,
                                            std::vector<Vector> values) {
  if (!(grid.h > 0.0) || values.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "piecewise-constant input needs a positive step and values");
  }
  const auto m = values.front().size();
  for (const auto& v : values) {
    if (v.size() != m) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "piecewise-constant input values differ in size");
    }
  }
  InputSignal s;
  s.kind_ = Kind::kPiecewiseConstant;
  s.m_ = static_cast<std::size_t>(m);
  grid.count = values.size();
  s.grid_ = grid;
  s.values_ = std::move(values);
  return s;
}

InputSignal InputSignal::closure(std::size_t m,
                                 std::function<Vector(double)> fn) {
  InputSignal s;
  s.kind_ = Kind::kClosure;
  s.m_ = m;
  s.fn_ = std::move(fn);
  return s;
}

Vector InputSignal::at(double t) const {
  switch (kind_) {
    case Kind::kConstant:
      return value_;
    case Kind::kPiecewiseConstant: {
      const double pos = (t - grid_.t0) / grid_.h;
      // Nodes land exactly on sample boundaries up to roundoff.
      const double idx = std::floor(pos + 1e-9);
      if (idx <= 0.0) return values_.front();
      const auto j = static_cast<std::size_t>(idx);
      return values_[std::min(j, values_.size() - 1)];
    }
    case Kind::kClosure:
      return fn_(t);
  }
  return value_;
}

PlantDerivative eval_rhs_unchecked(const SystemSpec& spec, const Vector& x,
                                   const Vector& y, const Vector& u) {
  PlantDerivative d;
  d.xdot = spec.eval_A(y, u) * x + spec.eval_b(y, u);
  d.ydot = spec.eval_f(y, u) + spec.eval_C(y).transpose() * x;
  return d;
}

PlantDerivative eval_rhs(const SystemSpec& spec, const PlantState& state,
                         const Vector& u) {
  if (static_cast<std::size_t>(state.x.size()) != spec.n ||
      static_cast<std::size_t>(state.y.size()) != spec.k ||
      static_cast<std::size_t>(u.size()) != spec.m) {
    throw Error(ErrorKind::kDimensionMismatch,
                "state or input size does not match " + spec.name);
  }
  if (!spec.in_domain(state.x, state.y)) {
    throw Error(ErrorKind::kDomainViolation, "(x, y) is outside O");
  }
  if (!spec.in_input_set(u)) {
    throw Error(ErrorKind::kDomainViolation, "u is outside U");
  }
  return eval_rhs_unchecked(spec, state.x, state.y, u);
}

void check_dimensions(const SystemSpec& spec, const Vector& y,
                      const Vector& u) {
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto k = static_cast<Eigen::Index>(spec.k);
  const Matrix A = spec.eval_A(y, u);
  const Vector b = spec.eval_b(y, u);
  const Matrix C = spec.eval_C(y);
  const Vector f = spec.eval_f(y, u);
  if (A.rows() != n || A.cols() != n || b.size() != n || C.rows() != n ||
      C.cols() != k || f.size() != k) {
    throw Error(ErrorKind::kDimensionMismatch,
                "evaluators of " + spec.name + " return inconsistent sizes");
  }
}

SystemSpec make_lti(const Matrix& A, const Vector& b, const Matrix& C,
                    const Vector& f, const Matrix& B, const Matrix& F) {
  const Eigen::Index n = A.rows();
  const Eigen::Index k = C.cols();
  const Eigen::Index m = std::max(B.cols(), F.cols());
  if (A.cols() != n || b.size() != n || C.rows() != n || f.size() != k ||
      n == 0 || k == 0) {
    throw Error(ErrorKind::kDimensionMismatch,
                "make_lti: A must be n-by-n, b length n, C n-by-k, f length k");
  }
  const Matrix Bm = B.size() == 0 ? Matrix::Zero(n, m) : B;
  const Matrix Fm = F.size() == 0 ? Matrix::Zero(k, m) : F;
  if (Bm.rows() != n || Bm.cols() != m || Fm.rows() != k || Fm.cols() != m) {
    throw Error(ErrorKind::kDimensionMismatch,
                "make_lti: B must be n-by-m and F k-by-m");
  }

  SystemSpec spec;
  spec.name = "lti";
  spec.n = static_cast<std::size_t>(n);
  spec.k = static_cast<std::size_t>(k);
  spec.m = static_cast<std::size_t>(m);
  spec.eval_A = [A](const Vector&, const Vector&) { return A; };
  spec.eval_b = [b, Bm](const Vector&, const Vector& u) -> Vector {
    if (Bm.cols() == 0) return b;
    return b + Bm * u;
  };
  spec.eval_C = [C](const Vector&) { return C; };
  spec.eval_f = [f, Fm](const Vector&, const Vector& u) -> Vector {
    if (Fm.cols() == 0) return f;
    return f + Fm * u;
  };
  spec.in_domain = [](const Vector& x, const Vector& y) {
    return x.allFinite() && y.allFinite();
  };
  spec.in_output_domain = [](const Vector& y) { return y.allFinite(); };
  spec.in_input_set = [](const Vector& u) { return u.allFinite(); };
  return spec;
}

}  // namespace deadbeat
