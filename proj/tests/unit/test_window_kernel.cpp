#include "deadbeat/window_kernel.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "deadbeat/error.hpp"
#include "deadbeat/frequency.hpp"
#include "deadbeat/indistinguishing.hpp"
#include "deadbeat/plant_sim.hpp"
#include "deadbeat/reactor.hpp"
#include "support/oracles.hpp"

namespace deadbeat {
namespace {

Vector Vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

SystemSpec ScalarOracle() {
  return make_lti(Matrix::Zero(1, 1), Vector::Zero(1), Matrix::Ones(1, 1),
                  Vector::Zero(1));
}

// Window sampled from the exact LTI solution, not from the simulator.
IoWindow LtiWindow(const Matrix& A, const Vector& b, const Matrix& C,
                   const Vector& f, const Vector& x0, const Vector& y0,
                   double r, std::size_t steps) {
  IoWindow w;
  w.grid = Grid::over(0.0, r, steps);
  for (std::size_t j = 0; j < w.grid.count; ++j) {
    w.y.push_back(oracle::lti_solution(A, b, C, f, x0, y0, w.grid.time(j)).y);
    w.u.emplace_back(0);
  }
  return w;
}

IoWindow SinusoidWindow(double A, double omega, double phase, double r,
                        std::size_t steps) {
  IoWindow w;
  w.grid = Grid::over(0.0, r, steps);
  for (std::size_t j = 0; j < w.grid.count; ++j) {
    w.y.push_back(Vec({A * std::sin(omega * w.grid.time(j) + phase)}));
    w.u.emplace_back(0);
  }
  return w;
}

TEST(ComputeWindowTest, ScalarOracle) {
  const IoWindow w = LtiWindow(Matrix::Zero(1, 1), Vector::Zero(1),
                               Matrix::Ones(1, 1), Vector::Zero(1), Vec({2.0}),
                               Vec({0.0}), 1.0, 2000);
  const WindowComputation wc = compute_window(ScalarOracle(), w);
  ASSERT_EQ(wc.size(), w.grid.count);
  for (std::size_t j = 0; j < wc.size(); j += 97) {
    const double tau = w.grid.time(j);
    EXPECT_NEAR(wc.phi[j](0, 0), 1.0, 1e-8);
    EXPECT_NEAR(wc.theta[j](0), 0.0, 1e-8);
    EXPECT_NEAR(wc.q[j](0, 0), tau, 1e-8);
    EXPECT_NEAR(wc.p[j](0), 2.0 * tau, 1e-8);
  }
}

TEST(ComputeWindowTest, InitialNode) {
  const SystemSpec spec = reactor_spec(ReactorParams::canonical());
  SimConfig cfg{1.5, 1.5 / 300, Vec({0.6, 0.3}), Vec({322.0})};
  const Trace tr = simulate_plant(spec, InputSignal::none(), cfg);
  const WindowComputation wc =
      compute_window(spec, IoWindow{tr.grid, tr.y_meas, tr.u});
  EXPECT_EQ(wc.phi[0], Matrix::Identity(2, 2));
  EXPECT_EQ(wc.theta[0].norm(), 0.0);
  EXPECT_EQ(wc.q[0].norm(), 0.0);
  EXPECT_EQ(wc.xi[0].norm(), 0.0);
  EXPECT_EQ(wc.p[0].norm(), 0.0);
  for (const Matrix& phi : wc.phi) EXPECT_GT(phi.determinant(), 0.0);
}

TEST(ComputeWindowTest, FrequencyQMatchesDoubleIntegral) {
  const double A = 2.0, omega = 3.0, phase = 1.0;
  const IoWindow w = SinusoidWindow(A, omega, phase, 1.0, 2000);
  const WindowComputation wc = compute_window(freq_spec(true), w);
  for (std::size_t j = 0; j < wc.size(); j += 50) {
    const double tau = w.grid.time(j);
    EXPECT_NEAR(wc.q[j](0, 0), tau, 1e-8);
    EXPECT_NEAR(wc.q[j](1, 0), oracle::sinusoid_phi(A, omega, phase, tau),
                1e-8);
  }
}

TEST(ComputeWindowTest, LtiTransitionMatchesExponential) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sys = oracle::random_observable_lti(rng, 3, 1);
    const IoWindow w = LtiWindow(sys.A, sys.b, sys.C, sys.f, Vec({1, -1, 0.5}),
                                 Vec({0.2}), 1.0, 1000);
    const SystemSpec spec = make_lti(sys.A, sys.b, sys.C, sys.f);
    const WindowComputation wc = compute_window(spec, w);
    const Matrix expected = sys.A.exp();
    EXPECT_LT((wc.phi.back() - expected).cwiseAbs().maxCoeff(), 1e-10);
    const GramSummary gs = gram(wc, w.grid);
    // Same outer rule on exact L, then the exact Gram at the O(h^2) level.
    Matrix Q_trap = Matrix::Zero(3, 3);
    for (std::size_t j = 0; j < wc.size(); ++j) {
      const Matrix L = oracle::lti_output_integral(sys.A, sys.C, w.grid.time(j));
      const double wt = (j == 0 || j + 1 == wc.size()) ? 0.5 : 1.0;
      Q_trap += wt * w.grid.h * L * L.transpose();
    }
    EXPECT_LT((gs.Q - Q_trap).norm(), 1e-9 * Q_trap.norm());
    const Matrix Q = oracle::lti_window_gram(sys.A, sys.C, 1.0);
    EXPECT_LT((gs.Q - Q).norm(), 1e-5 * Q.norm());
    for (std::size_t j = 0; j < wc.size(); j += 250) {
      const Matrix L = oracle::lti_output_integral(sys.A, sys.C, w.grid.time(j));
      EXPECT_LT((wc.q[j] - L).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(GramTest, ScalarOracleAnalytic) {
  const IoWindow w = LtiWindow(Matrix::Zero(1, 1), Vector::Zero(1),
                               Matrix::Ones(1, 1), Vector::Zero(1), Vec({2.0}),
                               Vec({0.0}), 1.0, 2000);
  const GramSummary gs = gram(compute_window(ScalarOracle(), w), w.grid);
  EXPECT_NEAR(gs.Q(0, 0), 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(gs.v(0), 2.0 / 3.0, 1e-6);
  EXPECT_NEAR(reconstruct_initial(gs)(0), 2.0, 1e-9);
  const auto cert = observability_certificate(gs);
  EXPECT_TRUE(cert.strongly_observable);
  EXPECT_NEAR(cert.smallest_eigenvalue, 1.0 / 3.0, 1e-6);
  const WindowComputation wc = compute_window(ScalarOracle(), w);
  const std::size_t nodes[] = {1000};
  EXPECT_NEAR(determinant_condition(wc, nodes), 1.0, 1e-12);
}

TEST(GramTest, ZeroOutputMapGivesZeroGram) {
  const SystemSpec spec = make_lti(Matrix::Identity(2, 2), Vector::Zero(2),
                                   Matrix::Zero(2, 1), Vector::Zero(1));
  const IoWindow w = LtiWindow(Matrix::Identity(2, 2), Vector::Zero(2),
                               Matrix::Zero(2, 1), Vector::Zero(1),
                               Vec({1, 1}), Vec({0.0}), 1.0, 100);
  const WindowComputation wc = compute_window(spec, w);
  const GramSummary gs = gram(wc, w.grid);
  EXPECT_EQ(gs.Q.norm(), 0.0);
  EXPECT_EQ(gs.v.norm(), 0.0);
  const auto cert = observability_certificate(gs);
  EXPECT_FALSE(cert.strongly_observable);
  EXPECT_NEAR(cert.null_direction.norm(), 1.0, 1e-12);
  const std::size_t nodes[] = {10, 60};
  EXPECT_EQ(determinant_condition(wc, nodes), 0.0);
  try {
    reconstruct_initial(gs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotPositiveDefinite);
  }
}

TEST(GramTest, ExactlySymmetric) {
  std::mt19937_64 rng(23);
  const auto sys = oracle::random_observable_lti(rng, 4, 2);
  const IoWindow w = LtiWindow(sys.A, sys.b, sys.C, sys.f,
                               Vec({0.1, 0.2, 0.3, 0.4}), Vec({1, 2}), 0.7, 700);
  const GramSummary gs =
      gram(compute_window(make_lti(sys.A, sys.b, sys.C, sys.f), w), w.grid);
  EXPECT_EQ((gs.Q - gs.Q.transpose()).norm(), 0.0);
  EXPECT_GE(smallest_cholesky_pivot(gs.Q), -1e-12 * gs.Q.trace());
}

TEST(ReconstructTest, SyntheticIdentity) {
  GramSummary gs;
  gs.Q = Matrix::Identity(2, 2);
  gs.v = Vec({4, 5});
  EXPECT_EQ(reconstruct_initial(gs), Vec({4, 5}));
  gs.Q = Matrix::Zero(2, 2);
  EXPECT_THROW(reconstruct_initial(gs), Error);
}

TEST(ApplyPTest, ScalarAndZeroWindows) {
  const IoWindow w = LtiWindow(Matrix::Zero(1, 1), Vector::Zero(1),
                               Matrix::Ones(1, 1), Vector::Zero(1), Vec({2.0}),
                               Vec({0.0}), 1.0, 2000);
  EXPECT_NEAR(apply_p(ScalarOracle(), w)(0), 2.0, 1e-9);

  Matrix A(2, 2);
  A << 0, 1, -2, -0.3;
  Matrix C(2, 1);
  C << 1, 0;
  const IoWindow zero = LtiWindow(A, Vector::Zero(2), C, Vector::Zero(1),
                                  Vector::Zero(2), Vec({0.0}), 1.0, 500);
  const Vector x = apply_p(make_lti(A, Vector::Zero(2), C, Vector::Zero(1)),
                           zero);
  EXPECT_LT(x.norm(), 1e-12);
}

TEST(ApplyPTest, FrequencyCleanSinusoid) {
  const IoWindow w = SinusoidWindow(2.0, 3.0, 1.0, 1.0, 2000);
  const Vector x = apply_p(freq_spec(), w);
  EXPECT_NEAR(x(0), 6.0 * std::cos(4.0), 1e-4);
  EXPECT_NEAR(x(1), -9.0, 1e-4);
}

TEST(ApplyPTest, DegenerateWindowIsReported) {
  const SystemSpec spec = make_lti(Matrix::Zero(1, 1), Vector::Zero(1),
                                   Matrix::Zero(1, 1), Vector::Zero(1));
  const IoWindow w = LtiWindow(Matrix::Zero(1, 1), Vector::Zero(1),
                               Matrix::Zero(1, 1), Vector::Zero(1), Vec({1.0}),
                               Vec({0.0}), 1.0, 100);
  const WindowEstimate est = try_apply_p(spec, w);
  EXPECT_TRUE(est.degenerate);
  EXPECT_EQ(est.x_end.size(), 0);
  EXPECT_THROW(apply_p(spec, w), Error);
}

// Dead-beat identity and Gram consistency on random noiseless LTI windows.
TEST(ApplyPTest, DeadBeatOnRandomLti) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    const auto sys = oracle::random_well_conditioned_lti(rng, n, 1, 1.0, 1e-6);
    const Vector x0 = Vector::NullaryExpr(n, [&] { return U(rng); });
    const Vector y0 = Vec({U(rng)});
    const double r = 1.0;
    const IoWindow w = LtiWindow(sys.A, sys.b, sys.C, sys.f, x0, y0, r, 2000);
    const SystemSpec spec = make_lti(sys.A, sys.b, sys.C, sys.f);
    const Vector x_end = oracle::lti_solution(sys.A, sys.b, sys.C, sys.f, x0,
                                              y0, r).x;
    const Vector est = apply_p(spec, w);
    EXPECT_LE((est - x_end).cwiseAbs().maxCoeff(),
              1e-5 * (1.0 + x_end.cwiseAbs().maxCoeff()))
        << "trial " << trial;
    const GramSummary gs = gram(compute_window(spec, w), w.grid);
    EXPECT_LE((gs.v - gs.Q * x0).norm(), 1e-6 * (1.0 + gs.v.norm()));
  }
}

TEST(CertificateTest, ResidualQuadraticMinimizedAtEstimate) {
  Matrix A(2, 2);
  A << 0, 1, -1, 0;
  Matrix C(2, 1);
  C << 1, 0;
  const Vector x0 = Vec({0.4, -0.7});
  const IoWindow w =
      LtiWindow(A, Vector::Zero(2), C, Vector::Zero(1), x0, Vec({0.0}), 1.0,
                2000);
  const SystemSpec spec = make_lti(A, Vector::Zero(2), C, Vector::Zero(1));
  const WindowComputation wc = compute_window(spec, w);
  const GramSummary gs = gram(wc, w.grid);
  ASSERT_TRUE(observability_certificate(gs).strongly_observable);
  const Vector xhat = reconstruct_initial(gs);
  auto R = [&](const Vector& xi) {
    std::vector<double> s(wc.size());
    for (std::size_t j = 0; j < wc.size(); ++j) {
      s[j] = (wc.p[j] - wc.q[j].transpose() * xi).squaredNorm();
    }
    return trapezoid(s, w.grid);
  };
  const double at_hat = R(xhat);
  for (int i = -5; i < 5; ++i) {
    for (int j = -5; j < 5; ++j) {
      if (i == 0 && j == 0) continue;
      const Vector xi = xhat + 0.1 * Vec({double(i), double(j)});
      EXPECT_GE(R(xi), at_hat);
    }
  }
  EXPECT_LE(at_hat, 1e-6 * R(xhat + Vec({3.0, 3.0})));
}

TEST(DeterminantTest, ReactorNonzeroAndOutputDimension) {
  const SystemSpec spec = reactor_spec(ReactorParams::canonical());
  SimConfig cfg{1.5, 1.5 / 2000, Vec({0.6, 0.3}), Vec({322.0})};
  const Trace tr = simulate_plant(spec, InputSignal::none(), cfg);
  const WindowComputation wc =
      compute_window(spec, IoWindow{tr.grid, tr.y_meas, tr.u});
  const std::size_t nodes[] = {2000, 0};
  EXPECT_GT(std::abs(determinant_condition(wc, nodes)), 1e-8);

  Matrix C = Matrix::Identity(2, 2);
  const IoWindow w2 = LtiWindow(Matrix::Zero(2, 2), Vector::Zero(2), C,
                                Vector::Zero(2), Vec({1, 1}), Vec({0, 0}), 1.0,
                                10);
  const WindowComputation wc2 = compute_window(
      make_lti(Matrix::Zero(2, 2), Vector::Zero(2), C, Vector::Zero(2)), w2);
  try {
    determinant_condition(wc2, nodes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kWrongOutputDimension);
  }
}

TEST(IoWindowTest, ValidateRejectsOutOfDomainSamples) {
  const SystemSpec spec = reactor_spec(ReactorParams::canonical());
  IoWindow w;
  w.grid = Grid::over(0, 1, 2);
  w.y = {Vec({320.0}), Vec({400.0}), Vec({320.0})};
  w.u = {Vector(0), Vector(0), Vector(0)};
  EXPECT_THROW(w.validate(spec), Error);
  w.y.pop_back();
  EXPECT_THROW(w.validate(spec), Error);
}

TEST(Example26Test, InputFormulaAndDegenerateWindow) {
  const Example26Spec ex = example26_exponential();
  const Vector x0 = Vec({1.0, 1.0});
  const double y0 = 0.3;
  const Grid grid = Grid::over(0.0, 1.0, 2000);
  const IndistinguishingInput ii = indistinguishing_input(ex, x0, y0, grid);
  for (std::size_t j = 0; j < grid.count; j += 100) {
    const double t = grid.time(j);
    EXPECT_NEAR(ii.y[j], y0 - t, 1e-10);
    EXPECT_NEAR(ii.u[j],
                -1.0 - std::exp(-2.0 * t) * (x0(1) + x0(0) * std::exp(y0)),
                1e-9);
  }

  const SystemSpec spec = example26_system(ex);
  const InputSignal input = interpolated_input(grid, ii.u);
  const SimConfig cfg{1.0, grid.h, x0, Vec({y0})};
  const Trace tr = simulate_plant(spec, input, cfg);
  const WindowComputation wc =
      compute_window(spec, IoWindow{tr.grid, tr.y_meas, tr.u});
  const GramSummary gs = gram(wc, tr.grid);
  const auto cert = observability_certificate(gs);
  EXPECT_FALSE(cert.strongly_observable);
  EXPECT_LE(cert.smallest_eigenvalue, 1e-8 * gs.Q.trace());
  double residual = 0.0, qmax = 0.0;
  for (std::size_t j = 0; j < wc.size(); ++j) {
    residual = std::max(residual,
                        std::abs((wc.q[j].transpose() * cert.null_direction)(0)));
    qmax = std::max(qmax, wc.q[j].norm());
  }
  EXPECT_LE(residual, 1e-6 * qmax);

  const Vector partner = indistinguishable_partner(ex, x0, y0, 0.25);
  const Trace twin = simulate_plant(spec, input, {1.0, grid.h, partner,
                                                  Vec({y0})});
  for (std::size_t j = 0; j < tr.size(); ++j) {
    EXPECT_NEAR(tr.y_true[j](0), twin.y_true[j](0), 1e-6);
  }
}

TEST(Example26Test, EqualOutputMapsVanishKappa) {
  Example26Spec ex = example26_exponential();
  ex.c1 = [](double) { return 1.0; };
  ex.c2 = [](double) { return 1.0; };
  ex.kappa = [](double) { return 0.0; };
  try {
    indistinguishing_input(ex, Vec({1, 1}), 0.0, Grid::over(0, 1, 10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kKappaVanished);
  }
}

}  // namespace
}  // namespace deadbeat
