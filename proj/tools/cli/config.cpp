#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "deadbeat/error.hpp"
#include "deadbeat/scalar_observer.hpp"
#include "json.hpp"

namespace deadbeat::cli {

using nlohmann::json;

namespace {

const json* find(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
  const json* v = find(obj, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key, "is required");
  }
  if (!v->is_number()) throw ConfigError(path + "." + key, "must be a number");
  const double d = v->get<double>();
  if (!std::isfinite(d)) throw ConfigError(path + "." + key, "must be finite");
  return d;
}

std::vector<double> get_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(path, "must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Vector get_vector(const json& v, const std::string& path) {
  const auto list = get_list(v, path);
  Vector out(static_cast<Eigen::Index>(list.size()));
  for (std::size_t i = 0; i < list.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = list[i];
  }
  return out;
}

Matrix get_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError(path, "must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  Matrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = get_list(v[static_cast<std::size_t>(i)], path);
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      out.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(path, "rows differ in length");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = row[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

std::string get_string(const json& obj, const char* key,
                       const std::string& path, const std::string& fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) throw ConfigError(path + "." + key, "must be a string");
  return v->get<std::string>();
}

void parse_reactor(const json& sys, ScenarioConfig& cfg) {
  const std::string preset = get_string(sys, "preset", "system", "canonical");
  if (preset == "canonical") {
    cfg.reactor = ReactorParams::canonical();
  } else if (preset == "lumped") {
    cfg.reactor = ReactorParams::lumped();
  } else {
    throw ConfigError("system.preset", "must be canonical or lumped");
  }
  if (const json* params = find(sys, "params")) {
    ReactorParams& p = cfg.reactor;
    const std::string path = "system.params";
    p.k1 = get_number(*params, "k1", path, p.k1);
    p.k2 = get_number(*params, "k2", path, p.k2);
    p.E1 = get_number(*params, "E1", path, p.E1);
    p.E2 = get_number(*params, "E2", path, p.E2);
    p.J1 = get_number(*params, "J1", path, p.J1);
    p.J2 = get_number(*params, "J2", path, p.J2);
    p.h_coef = get_number(*params, "h_coef", path, p.h_coef);
    p.Ts = get_number(*params, "Ts", path, p.Ts);
    p.c1_bar = get_number(*params, "c1_bar", path, p.c1_bar);
    p.c2_bar = get_number(*params, "c2_bar", path, p.c2_bar);
    p.Tmin = get_number(*params, "Tmin", path, p.Tmin);
    p.Tmax = get_number(*params, "Tmax", path, p.Tmax);
    p.a_margin = get_number(*params, "a_margin", path, p.a_margin);
  }
  try {
    cfg.reactor.validate();
  } catch (const Error& e) {
    throw ConfigError("system.params", e.what());
  }
}

void parse_system(const json& root, ScenarioConfig& cfg) {
  const json* sys = find(root, "system");
  if (sys == nullptr || !sys->is_object()) {
    throw ConfigError("system", "is required and must be an object");
  }
  const std::string type = get_string(*sys, "type", "system", "");
  if (type == "reactor") {
    cfg.type = SystemType::kReactor;
    parse_reactor(*sys, cfg);
  } else if (type == "frequency") {
    cfg.type = SystemType::kFrequency;
    FrequencyScenario& s = cfg.frequency;
    s.amplitude = get_number(*sys, "amplitude", "system", 2.0);
    s.omega = get_number(*sys, "omega", "system", 3.0);
    s.phase = get_number(*sys, "phase", "system", 0.0);
    if (const json* relaxed = find(*sys, "relaxed_domain")) {
      if (!relaxed->is_boolean()) {
        throw ConfigError("system.relaxed_domain", "must be a boolean");
      }
      cfg.relaxed_domain = relaxed->get<bool>();
    }
  } else if (type == "lti") {
    cfg.type = SystemType::kLti;
    LtiMatrices& m = cfg.lti;
    auto need = [&](const char* key) -> const json& {
      const json* v = find(*sys, key);
      if (v == nullptr) throw ConfigError(std::string("system.") + key, "is required");
      return *v;
    };
    m.A = get_matrix(need("A"), "system.A");
    m.C = get_matrix(need("C"), "system.C");
    m.b = find(*sys, "b") ? get_vector(*find(*sys, "b"), "system.b")
                          : Vector::Zero(m.A.rows());
    m.f = find(*sys, "f") ? get_vector(*find(*sys, "f"), "system.f")
                          : Vector::Zero(m.C.cols());
    if (const json* B = find(*sys, "B")) m.B = get_matrix(*B, "system.B");
    if (const json* F = find(*sys, "F")) m.F = get_matrix(*F, "system.F");
  } else if (type == "scalar") {
    cfg.type = SystemType::kScalar;
    if (const json* v = find(*sys, "a")) cfg.scalar.a = get_list(*v, "system.a");
    if (const json* v = find(*sys, "f")) cfg.scalar.f = get_list(*v, "system.f");
    if (const json* v = find(*sys, "c")) cfg.scalar.c = get_list(*v, "system.c");
    if (const json* v = find(*sys, "positive_state")) {
      cfg.scalar.positive_state = v->is_boolean() && v->get<bool>();
    }
  } else if (type == "example26") {
    cfg.type = SystemType::kExample26;
    cfg.example26.a1 = get_number(*sys, "a1", "system", -1.0);
    cfg.example26.a2 = get_number(*sys, "a2", "system", -2.0);
    cfg.example26.rate = get_number(*sys, "c1_rate", "system", 1.0);
    cfg.example26.xi1 = get_number(*sys, "xi1", "system", 0.0);
  } else {
    throw ConfigError("system.type",
                      "must be one of reactor, frequency, lti, scalar, "
                      "example26");
  }
}

std::size_t dimension_n(const ScenarioConfig& cfg) {
  switch (cfg.type) {
    case SystemType::kLti: return static_cast<std::size_t>(cfg.lti.A.rows());
    case SystemType::kScalar: return 1;
    default: return 2;
  }
}

}  // namespace

SystemSpec build_spec(const ScenarioConfig& cfg) {
  switch (cfg.type) {
    case SystemType::kReactor:
      return reactor_spec(cfg.reactor);
    case SystemType::kFrequency:
      return freq_spec(cfg.relaxed_domain);
    case SystemType::kLti:
      return make_lti(cfg.lti.A, cfg.lti.b, cfg.lti.C, cfg.lti.f, cfg.lti.B,
                      cfg.lti.F);
    case SystemType::kScalar: {
      auto poly = [](std::vector<double> c) {
        return [c = std::move(c)](double y) {
          double acc = 0.0;
          for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * y + *it;
          return acc;
        };
      };
      ScalarCoefficients coeffs;
      coeffs.a = [a = poly(cfg.scalar.a)](double y, double) { return a(y); };
      coeffs.f = [f = poly(cfg.scalar.f)](double y, double) { return f(y); };
      coeffs.c = poly(cfg.scalar.c);
      return scalar_spec(coeffs, 0, cfg.scalar.positive_state);
    }
    case SystemType::kExample26:
      return example26_system(build_example26(cfg));
  }
  throw ConfigError("system.type", "unsupported");
}

Example26Spec build_example26(const ScenarioConfig& cfg) {
  return example26_exponential(cfg.example26.a1, cfg.example26.a2,
                               cfg.example26.rate);
}

InputSignal build_input(const ScenarioConfig& cfg) {
  return InputSignal::constant(cfg.u);
}

ScenarioConfig parse_config(const std::string& json_text,
                            const Overrides& overrides) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<config>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<config>", "must be an object");

  ScenarioConfig cfg;
  parse_system(root, cfg);
  const std::size_t n = dimension_n(cfg);

  const json empty = json::object();
  const json* sim = find(root, "sim");
  const json& s = sim ? *sim : empty;
  const json* obs = find(root, "observer");
  const json& o = obs ? *obs : empty;

  // Window length and step.
  if (find(o, "r")) {
    cfg.observer.r = get_number(o, "r", "observer");
  } else if (cfg.type == SystemType::kReactor) {
    try {
      cfg.observer.r = min_window_reactor(cfg.reactor);
    } catch (const Error& e) {
      throw ConfigError("observer.r", e.what());
    }
  } else {
    throw ConfigError("observer.r", "is required");
  }
  if (!(cfg.observer.r > 0.0)) throw ConfigError("observer.r", "must be > 0");
  cfg.frequency.r = cfg.observer.r;

  // Sensor.
  const json* sensor = find(root, "sensor");
  if (sensor != nullptr) {
    const std::string type = get_string(*sensor, "type", "sensor", "clean");
    if (type == "sinusoid") {
      cfg.sensor.kind = SensorModel::Kind::kSinusoidNoise;
      cfg.sensor.amplitude = get_number(*sensor, "amplitude", "sensor");
      cfg.sensor.frequency = get_number(*sensor, "frequency", "sensor");
      if (!(cfg.sensor.amplitude >= 0.0) || !(cfg.sensor.frequency > 0.0)) {
        throw ConfigError("sensor", "needs amplitude >= 0 and frequency > 0");
      }
    } else if (type != "clean") {
      throw ConfigError("sensor.type", "must be clean or sinusoid");
    }
  }
  if (cfg.sensor.kind == SensorModel::Kind::kSinusoidNoise) {
    cfg.frequency.noise_amplitude = cfg.sensor.amplitude;
    cfg.frequency.noise_frequency = cfg.sensor.frequency;
  }

  double h = 0.0;
  if (overrides.h) {
    h = *overrides.h;
  } else if (find(s, "h")) {
    h = get_number(s, "h", "sim");
  } else if (cfg.type == SystemType::kFrequency) {
    h = sweep_step(cfg.frequency);
  } else {
    h = cfg.observer.r / 2000.0;
  }
  if (!(h > 0.0)) throw ConfigError("sim.h", "must be > 0");
  cfg.sim.h = h;
  cfg.observer.h = h;
  try {
    (void)whole_steps(cfg.observer.r, h, "observer.r");
  } catch (const Error&) {
    throw ConfigError("observer.r", "must be an integer multiple of sim.h (r = " +
                                        std::to_string(cfg.observer.r) +
                                        ", h = " + std::to_string(h) + ")");
  }
  if (cfg.observer.r / h < 2.0 - 1e-9) {
    throw ConfigError("observer.r", "must span at least two steps");
  }

  cfg.sim.t_end = get_number(s, "t_end", "sim", 0.0);
  if (cfg.sim.t_end < 0.0) throw ConfigError("sim.t_end", "must be >= 0");
  if (cfg.sim.t_end > 0.0) {
    try {
      (void)whole_steps(cfg.sim.t_end, h, "sim.t_end");
    } catch (const Error&) {
      throw ConfigError("sim.t_end", "must be an integer multiple of sim.h");
    }
  }

  // Initial plant state.
  if (cfg.type == SystemType::kFrequency) {
    cfg.frequency.validate();
    cfg.sim.x0 = cfg.frequency.initial_x();
    cfg.sim.y0 = cfg.frequency.initial_y();
  }
  if (const json* v = find(s, "x0")) cfg.sim.x0 = get_vector(*v, "sim.x0");
  if (const json* v = find(s, "y0")) cfg.sim.y0 = get_vector(*v, "sim.y0");
  if (cfg.sim.x0.size() == 0) throw ConfigError("sim.x0", "is required");
  if (cfg.sim.y0.size() == 0) throw ConfigError("sim.y0", "is required");

  SystemSpec spec;
  try {
    spec = build_spec(cfg);
    check_dimensions(spec, cfg.sim.y0,
                     Vector::Zero(static_cast<Eigen::Index>(spec.m)));
  } catch (const Error& e) {
    throw ConfigError("system", e.what());
  }
  if (static_cast<std::size_t>(cfg.sim.x0.size()) != n) {
    throw ConfigError("sim.x0", "must have " + std::to_string(n) + " entries");
  }
  if (static_cast<std::size_t>(cfg.sim.y0.size()) != spec.k) {
    throw ConfigError("sim.y0",
                      "must have " + std::to_string(spec.k) + " entries");
  }
  cfg.u = find(s, "u") ? get_vector(*find(s, "u"), "sim.u")
                       : Vector::Zero(static_cast<Eigen::Index>(spec.m));
  if (static_cast<std::size_t>(cfg.u.size()) != spec.m) {
    throw ConfigError("sim.u", "must have " + std::to_string(spec.m) + " entries");
  }
  if (!spec.in_domain(cfg.sim.x0, cfg.sim.y0)) {
    throw ConfigError("sim.x0", "(x0, y0) is outside the system domain");
  }

  // Observer.
  const std::string mode = get_string(
      o, "mode", "observer",
      cfg.type == SystemType::kFrequency ? "full" : "reduced");
  if (mode == "full") {
    cfg.observer.mode = ObserverMode::kFullOrder;
  } else if (mode == "reduced") {
    cfg.observer.mode = ObserverMode::kReducedOrder;
  } else {
    throw ConfigError("observer.mode", "must be full or reduced");
  }
  cfg.observer.rel_threshold =
      get_number(o, "rel_threshold", "observer", kDefaultRelThreshold);
  if (cfg.observer.rel_threshold < 0.0) {
    throw ConfigError("observer.rel_threshold", "must be >= 0");
  }
  const std::string policy = get_string(o, "on_degenerate", "observer", "hold");
  if (policy == "hold") {
    cfg.observer.on_degenerate = DegeneratePolicy::kHoldAndRetry;
  } else if (policy == "fail") {
    cfg.observer.on_degenerate = DegeneratePolicy::kFail;
  } else {
    throw ConfigError("observer.on_degenerate", "must be hold or fail");
  }

  if (const json* v = find(o, "z0")) {
    cfg.z0 = get_vector(*v, "observer.z0");
  } else if (cfg.type == SystemType::kReactor) {
    cfg.z0 = Vector(2);
    cfg.z0 << 0.5 * cfg.reactor.c1_bar, 0.5 * cfg.reactor.c2_bar;
  } else if (cfg.type == SystemType::kFrequency) {
    cfg.z0 = Vector(2);
    cfg.z0 << 1.0, -1.0;
  } else {
    cfg.z0 = Vector::Zero(static_cast<Eigen::Index>(n));
  }
  if (static_cast<std::size_t>(cfg.z0.size()) != n) {
    throw ConfigError("observer.z0", "must have " + std::to_string(n) + " entries");
  }
  cfg.w0 = find(o, "w0") ? get_vector(*find(o, "w0"), "observer.w0") : cfg.sim.y0;
  if (cfg.observer.mode == ObserverMode::kFullOrder) {
    if (static_cast<std::size_t>(cfg.w0.size()) != spec.k) {
      throw ConfigError("observer.w0", "must have k entries");
    }
    if (!spec.in_domain(cfg.z0, cfg.w0)) {
      throw ConfigError("observer.z0", "(z0, w0) is outside the system domain");
    }
  } else if (!spec.in_domain(cfg.z0, cfg.sim.y0)) {
    throw ConfigError("observer.z0", "z0 is outside the state domain");
  }

  // Sweep and observability options.
  if (const json* sweep = find(root, "sweep")) {
    const double phases = get_number(*sweep, "phases", "sweep", 64.0);
    if (!(phases >= 1.0) || phases != std::floor(phases)) {
      throw ConfigError("sweep.phases", "must be a positive integer");
    }
    cfg.sweep_phases = static_cast<std::size_t>(phases);
    if (const json* v = find(*sweep, "r_values")) {
      cfg.sweep_r_values = get_list(*v, "sweep.r_values");
      for (double r : cfg.sweep_r_values) {
        try {
          (void)whole_steps(r, h, "sweep.r_values");
        } catch (const Error&) {
          throw ConfigError("sweep.r_values",
                            "every value must be a positive multiple of sim.h");
        }
      }
    }
  }
  if (const json* ob = find(root, "observability")) {
    if (const json* v = find(*ob, "nodes")) {
      for (double d : get_list(*v, "observability.nodes")) {
        if (d < 0.0 || d != std::floor(d)) {
          throw ConfigError("observability.nodes",
                            "must be non-negative integers");
        }
        cfg.observability_nodes.push_back(static_cast<std::size_t>(d));
      }
    }
  }

  if (const json* out = find(root, "output")) {
    if (!out->is_string()) throw ConfigError("output", "must be a string");
    cfg.output_prefix = out->get<std::string>();
  }
  if (overrides.out_prefix) cfg.output_prefix = *overrides.out_prefix;
  return cfg;
}

ScenarioConfig load_config(const std::string& path,
                           const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<config>", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), overrides);
}

}  // namespace deadbeat::cli
