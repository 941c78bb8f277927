#include "deadbeat/observer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "deadbeat/error.hpp"

namespace deadbeat {

std::size_t ObserverConfig::steps_per_window() const {
  if (!(h > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "observer step h must be positive");
  }
  const std::size_t M = whole_steps(r, h, "observer.r");
  if (M < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "observer.r must span at least two steps of h");
  }
  if (!(rel_threshold >= 0.0) || !(pivot_floor >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "observer thresholds must be non-negative");
  }
  return M;
}

namespace {

bool estimate_in_domain(const SystemSpec& spec, const ObserverConfig& config,
                        const Vector& z, const Vector& w,
                        const Vector& y_meas) {
  return config.mode == ObserverMode::kFullOrder ? spec.in_domain(z, w)
                                                 : spec.in_domain(z, y_meas);
}

}  // namespace

ObserverSnapshot observer_init(const SystemSpec& spec,
                               const ObserverConfig& config, const Vector& z0,
                               const Vector& w0, double t0,
                               const Vector& y_at_t0, const Vector& u_at_t0) {
  config.validate();
  if (static_cast<std::size_t>(z0.size()) != spec.n ||
      static_cast<std::size_t>(y_at_t0.size()) != spec.k ||
      static_cast<std::size_t>(u_at_t0.size()) != spec.m) {
    throw Error(ErrorKind::kDimensionMismatch,
                "observer initial condition or measurement has wrong size");
  }
  if (config.mode == ObserverMode::kFullOrder) {
    if (static_cast<std::size_t>(w0.size()) != spec.k) {
      throw Error(ErrorKind::kDimensionMismatch, "w0 must have k entries");
    }
    if (!spec.in_domain(z0, w0)) {
      throw Error(ErrorKind::kDomainViolation, "(z0, w0) is outside O");
    }
  } else if (!spec.in_domain(z0, y_at_t0)) {
    throw Error(ErrorKind::kDomainViolation, "z0 is outside D");
  }
  if (!spec.in_output_domain(y_at_t0) || !spec.in_input_set(u_at_t0)) {
    throw Error(ErrorKind::kDomainViolation,
                "initial measurement is outside Omega x U");
  }

  ObserverSnapshot snap;
  snap.t0 = t0;
  snap.t = t0;
  snap.z = z0;
  snap.w = config.mode == ObserverMode::kFullOrder ? w0 : Vector();
  snap.next_reset = t0 + config.r;
  snap.history.push_back({y_at_t0, u_at_t0});
  return snap;
}

ObserverSnapshot observer_step(const SystemSpec& spec,
                               const ObserverConfig& config,
                               ObserverSnapshot snap, const Vector& y_meas,
                               const Vector& u) {
  const std::size_t M = config.steps_per_window();
  if (snap.history.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "observer history is empty; use observer_init");
  }
  if (snap.t + config.h > snap.next_reset + 1e-12 + 1e-9 * config.h) {
    throw Error(ErrorKind::kInvalidArgument, "step would overshoot the reset");
  }
  if (static_cast<std::size_t>(y_meas.size()) != spec.k ||
      static_cast<std::size_t>(u.size()) != spec.m) {
    throw Error(ErrorKind::kDimensionMismatch, "measurement has wrong size");
  }
  if (!spec.in_output_domain(y_meas) || !spec.in_input_set(u)) {
    throw Error(ErrorKind::kDomainViolation,
                "measurement at t = " + std::to_string(snap.t + config.h) +
                    " is outside Omega x U",
                snap.step + 1);
  }

  const HistorySample& prev = snap.history.back();
  const Vector u_hold = prev.u;
  const Eigen::Index n = snap.z.size();
  const bool full = config.mode == ObserverMode::kFullOrder;
  const bool was_inside =
      estimate_in_domain(spec, config, snap.z, snap.w, prev.y);

  if (full) {
    const Eigen::Index k = snap.w.size();
    Vector s(n + k);
    s << snap.z, snap.w;
    const VectorField field = [&](double, const Vector& st) -> Vector {
      const auto d = eval_rhs_unchecked(spec, st.head(n), st.tail(k), u_hold);
      Vector out(n + k);
      out << d.xdot, d.ydot;
      return out;
    };
    s = rk4_step(field, snap.t, s, config.h);
    snap.z = s.head(n);
    snap.w = s.tail(k);
  } else {
    // Up to three past samples plus the new one.
    std::vector<Vector> recent;
    const std::size_t back = std::min<std::size_t>(snap.history.size(), 3);
    for (std::size_t i = snap.history.size() - back; i < snap.history.size();
         ++i) {
      recent.push_back(snap.history[i].y);
    }
    recent.push_back(y_meas);
    const std::size_t j = recent.size() - 2;
    const double t_start = snap.t;
    const VectorField field = [&](double t, const Vector& z) -> Vector {
      const Vector y =
          interpolate_cubic(recent, j, (t - t_start) / config.h);
      return spec.eval_A(y, u_hold) * z + spec.eval_b(y, u_hold);
    };
    snap.z = rk4_step(field, snap.t, snap.z, config.h);
  }

  snap.step += 1;
  snap.t = snap.t0 + static_cast<double>(snap.step) * config.h;
  if (!snap.z.allFinite() || (full && !snap.w.allFinite())) {
    throw Error(ErrorKind::kNonFiniteState,
                "observer state became non-finite at t = " +
                    std::to_string(snap.t),
                snap.step);
  }
  if (was_inside && !estimate_in_domain(spec, config, snap.z, snap.w, y_meas)) {
    throw Error(ErrorKind::kDomainViolation,
                "observer estimate left O during flow at t = " +
                    std::to_string(snap.t),
                snap.step);
  }

  snap.history.push_back({y_meas, u});
  while (snap.history.size() > M + 1) snap.history.pop_front();

  snap.last_outcome = ResetOutcome::kNone;
  if (snap.step % M != 0) return snap;

  IoWindow window;
  window.grid = Grid{0.0, config.h, M + 1};
  window.y.reserve(M + 1);
  window.u.reserve(M + 1);
  for (const auto& sample : snap.history) {
    window.y.push_back(sample.y);
    window.u.push_back(sample.u);
  }
  ReconstructionOptions options;
  options.pivot_floor = config.pivot_floor;
  options.rel_threshold = config.rel_threshold;
  const WindowEstimate est = try_apply_p(spec, window, options);

  snap.z_before_reset = snap.z;
  snap.next_reset =
      snap.t0 + static_cast<double>(snap.step / M + 1) * config.r;
  if (est.degenerate) {
    if (config.on_degenerate == DegeneratePolicy::kFail) {
      throw Error(ErrorKind::kGramDegenerate,
                  "degenerate window ending at t = " + std::to_string(snap.t) +
                      ": " + est.failure,
                  snap.step);
    }
    snap.degenerate_events += 1;
    snap.last_outcome = ResetOutcome::kDegenerate;
    return snap;
  }

  snap.z = est.x_end;
  if (full) snap.w = y_meas;
  snap.resets += 1;
  snap.last_outcome = ResetOutcome::kApplied;
  if (!spec.in_domain(snap.z, y_meas)) snap.out_of_domain_resets += 1;
  return snap;
}

EstimateTrace run_observer(const SystemSpec& spec, const ObserverConfig& config,
                           const Trace& trace, const Vector& z0,
                           const Vector& w0) {
  EstimateTrace out;
  out.grid = trace.grid;
  if (trace.size() == 0) {
    out.grid.count = 0;
    return out;
  }
  config.validate();
  if (std::abs(trace.grid.h - config.h) > 1e-12 * config.h) {
    throw Error(ErrorKind::kInvalidArgument,
                "trace step does not match observer h");
  }
  if (trace.u.size() != trace.size()) {
    throw Error(ErrorKind::kLengthMismatch, "trace has no input per node");
  }

  ObserverSnapshot snap = observer_init(spec, config, z0, w0, trace.grid.t0,
                                        trace.y_meas[0], trace.u[0]);
  const std::size_t count = trace.size();
  out.z.reserve(count);
  out.w.reserve(count);
  auto record = [&](const ObserverSnapshot& s, std::size_t node) {
    out.z.push_back(s.z);
    out.w.push_back(s.w);
    out.reset_flag.push_back(s.last_outcome == ResetOutcome::kApplied);
    out.degenerate_flag.push_back(s.last_outcome == ResetOutcome::kDegenerate);
    if (s.last_outcome != ResetOutcome::kNone) {
      ResetEvent ev;
      ev.node = node;
      ev.t = s.t;
      ev.outcome = s.last_outcome;
      ev.z_before = s.z_before_reset;
      ev.z_after = s.z;
      ev.out_of_domain = s.out_of_domain_resets > out.out_of_domain_resets;
      out.events.push_back(std::move(ev));
    }
    out.degenerate_events = s.degenerate_events;
    out.out_of_domain_resets = s.out_of_domain_resets;
  };
  record(snap, 0);
  for (std::size_t j = 1; j < count; ++j) {
    snap = observer_step(spec, config, std::move(snap), trace.y_meas[j],
                         trace.u[j]);
    record(snap, j);
  }
  out.grid.count = count;
  return out;
}

}  // namespace deadbeat
