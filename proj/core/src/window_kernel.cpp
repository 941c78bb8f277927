#include "deadbeat/window_kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "deadbeat/error.hpp"

namespace deadbeat {

void IoWindow::validate(const SystemSpec& spec) const {
  grid.validate();
  if (y.size() != grid.count || u.size() != grid.count) {
    throw Error(ErrorKind::kLengthMismatch,
                "window needs one y and one u sample per grid node");
  }
  for (std::size_t j = 0; j < grid.count; ++j) {
    if (static_cast<std::size_t>(y[j].size()) != spec.k ||
        static_cast<std::size_t>(u[j].size()) != spec.m) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "window sample " + std::to_string(j) + " has wrong size", j);
    }
    if (!spec.in_output_domain(y[j])) {
      throw Error(ErrorKind::kDomainViolation,
                  "window output sample " + std::to_string(j) +
                      " is outside Omega",
                  j);
    }
    if (!spec.in_input_set(u[j])) {
      throw Error(ErrorKind::kDomainViolation,
                  "window input sample " + std::to_string(j) +
                      " is outside U",
                  j);
    }
  }
}

namespace {

struct Layout {
  Eigen::Index n, k;
  Eigen::Index phi() const { return 0; }
  Eigen::Index theta() const { return n * n; }
  Eigen::Index q() const { return n * n + n; }
  Eigen::Index xi() const { return n * n + n + n * k; }
  Eigen::Index size() const { return n * n + n + n * k + k; }
};

}  // namespace

WindowComputation compute_window(const SystemSpec& spec,
                                 const IoWindow& window) {
  window.validate(spec);
  const Layout L{static_cast<Eigen::Index>(spec.n),
                 static_cast<Eigen::Index>(spec.k)};
  const Grid& grid = window.grid;

  Vector state = Vector::Zero(L.size());
  Eigen::Map<Matrix>(state.data() + L.phi(), L.n, L.n).setIdentity();

  WindowComputation wc;
  wc.phi.reserve(grid.count);
  wc.theta.reserve(grid.count);
  wc.q.reserve(grid.count);
  wc.xi.reserve(grid.count);

  auto record = [&](const Vector& s) {
    wc.phi.emplace_back(Eigen::Map<const Matrix>(s.data() + L.phi(), L.n, L.n));
    wc.theta.emplace_back(s.segment(L.theta(), L.n));
    wc.q.emplace_back(Eigen::Map<const Matrix>(s.data() + L.q(), L.n, L.k));
    wc.xi.emplace_back(s.segment(L.xi(), L.k));
  };
  record(state);

  for (std::size_t j = 0; j + 1 < grid.count; ++j) {
    const double tj = grid.time(j);
    const Vector& uj = window.u[j];
    const VectorField field = [&](double t, const Vector& s) -> Vector {
      const Vector y = interpolate_cubic(window.y, j, (t - tj) / grid.h);
      const Matrix A = spec.eval_A(y, uj);
      const Vector b = spec.eval_b(y, uj);
      const Matrix C = spec.eval_C(y);
      const Vector f = spec.eval_f(y, uj);

      const Eigen::Map<const Matrix> phi(s.data() + L.phi(), L.n, L.n);
      const auto theta = s.segment(L.theta(), L.n);

      Vector d(L.size());
      Eigen::Map<Matrix>(d.data() + L.phi(), L.n, L.n) = A * phi;
      d.segment(L.theta(), L.n) = A * theta + b;
      Eigen::Map<Matrix>(d.data() + L.q(), L.n, L.k) = phi.transpose() * C;
      d.segment(L.xi(), L.k) = f + C.transpose() * theta;
      return d;
    };
    state = rk4_step(field, tj, state, grid.h);
    if (!state.allFinite()) {
      throw Error(ErrorKind::kNonFiniteState,
                  "window quantities became non-finite at node " +
                      std::to_string(j + 1),
                  j + 1);
    }
    record(state);
  }

  wc.p.reserve(grid.count);
  wc.c.reserve(grid.count);
  for (std::size_t j = 0; j < grid.count; ++j) {
    wc.p.emplace_back(window.y[j] - window.y[0] - wc.xi[j]);
    wc.c.emplace_back(spec.eval_C(window.y[j]));
  }
  return wc;
}

GramSummary gram(const WindowComputation& wc, const Grid& grid) {
  if (wc.size() != grid.count) {
    throw Error(ErrorKind::kLengthMismatch,
                "window computation does not match the grid");
  }
  grid.validate();
  const Eigen::Index n = wc.q.front().rows();

  GramSummary gs;
  gs.Q = Matrix::Zero(n, n);
  gs.v = Vector::Zero(n);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double w = (j == 0 || j + 1 == grid.count) ? 0.5 * grid.h : grid.h;
    const Matrix& q = wc.q[j];
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a; b < n; ++b) {
        gs.Q(a, b) += w * q.row(a).dot(q.row(b));
      }
    }
    gs.v += w * (q * wc.p[j]);
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < a; ++b) gs.Q(a, b) = gs.Q(b, a);
  }

  gs.smallest_pivot = smallest_cholesky_pivot(gs.Q);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gs.Q, Eigen::EigenvaluesOnly);
  gs.eigenvalues = es.eigenvalues();
  const double lo = gs.eigenvalues(0);
  const double hi = gs.eigenvalues(n - 1);
  gs.condition_estimate =
      lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return gs;
}

Vector reconstruct_initial(const GramSummary& gs, double pivot_floor) {
  return spd_solve(gs.Q, gs.v, pivot_floor).x;
}

ObservabilityCertificate observability_certificate(const GramSummary& gs,
                                                   double rel_threshold) {
  const Eigen::Index n = gs.Q.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gs.Q);
  ObservabilityCertificate cert;
  cert.smallest_eigenvalue = es.eigenvalues()(0);
  cert.threshold = rel_threshold * gs.Q.trace() / static_cast<double>(n);
  cert.strongly_observable =
      gs.Q.trace() > 0.0 && cert.smallest_eigenvalue > cert.threshold;
  if (!cert.strongly_observable) {
    if (gs.Q.cwiseAbs().maxCoeff() == 0.0) {
      cert.null_direction = Vector::Unit(n, 0);
    } else {
      cert.null_direction = es.eigenvectors().col(0).normalized();
    }
  }
  return cert;
}

double determinant_condition(const WindowComputation& wc,
                             std::span<const std::size_t> node_indices) {
  if (wc.size() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "empty window computation");
  }
  const Eigen::Index n = wc.phi.front().rows();
  if (wc.c.front().cols() != 1) {
    throw Error(ErrorKind::kWrongOutputDimension,
                "determinant condition needs a single output");
  }
  if (static_cast<Eigen::Index>(node_indices.size()) != n) {
    throw Error(ErrorKind::kInvalidArgument,
                "determinant condition needs exactly n node indices");
  }
  Matrix rows(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t j = node_indices[static_cast<std::size_t>(i)];
    if (j >= wc.size()) {
      throw Error(ErrorKind::kInvalidArgument, "node index out of range", j);
    }
    rows.row(i) = wc.c[j].transpose() * wc.phi[j];
  }
  return rows.determinant();
}

WindowEstimate try_apply_p(const SystemSpec& spec, const IoWindow& window,
                           const ReconstructionOptions& options) {
  const WindowComputation wc = compute_window(spec, window);
  WindowEstimate est;
  est.gram = gram(wc, window.grid);
  est.phi_end = wc.phi.back();
  est.theta_end = wc.theta.back();

  if (options.rel_threshold > 0.0) {
    const auto cert = observability_certificate(est.gram, options.rel_threshold);
    if (!cert.strongly_observable) {
      est.degenerate = true;
      est.failure = "Gram smallest eigenvalue " +
                    std::to_string(cert.smallest_eigenvalue) +
                    " is below the certificate threshold";
      return est;
    }
  }
  try {
    est.x0 = reconstruct_initial(est.gram, options.pivot_floor);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNotPositiveDefinite) throw;
    est.degenerate = true;
    est.failure = e.what();
    return est;
  }
  est.x_end = est.phi_end * est.x0 + est.theta_end;
  return est;
}

Vector apply_p(const SystemSpec& spec, const IoWindow& window,
               double pivot_floor) {
  const WindowComputation wc = compute_window(spec, window);
  const GramSummary gs = gram(wc, window.grid);
  const Vector x0 = reconstruct_initial(gs, pivot_floor);
  return wc.phi.back() * x0 + wc.theta.back();
}

}  // namespace deadbeat
