#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deadbeat/frequency.hpp"
#include "deadbeat/indistinguishing.hpp"
#include "deadbeat/observer.hpp"
#include "deadbeat/plant_sim.hpp"
#include "deadbeat/reactor.hpp"
#include "deadbeat/system_model.hpp"

namespace deadbeat::cli {

/// Configuration problem; `field` is the dotted JSON path at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class SystemType { kReactor, kFrequency, kLti, kScalar, kExample26 };

struct LtiMatrices {
  Matrix A, C, B, F;
  Vector b, f;
};

/// Polynomial coefficients in y (constant term first).
struct ScalarPolynomials {
  std::vector<double> a{0.0};
  std::vector<double> f{0.0};
  std::vector<double> c{1.0};
  bool positive_state = false;
};

struct Example26Params {
  double a1 = -1.0;
  double a2 = -2.0;
  double rate = 1.0;
  double xi1 = 0.0;  // first component of the indistinguishable partner
};

struct ScenarioConfig {
  SystemType type = SystemType::kScalar;
  ReactorParams reactor;
  FrequencyScenario frequency;
  bool relaxed_domain = false;
  LtiMatrices lti;
  ScalarPolynomials scalar;
  Example26Params example26;

  SimConfig sim;
  Vector u;  // constant input, size m
  ObserverConfig observer;
  Vector z0;
  Vector w0;
  SensorModel sensor;

  std::size_t sweep_phases = 64;
  std::vector<double> sweep_r_values;
  std::vector<std::size_t> observability_nodes;

  std::string output_prefix = "deadbeat";
};

struct Overrides {
  std::optional<double> h;
  std::optional<std::string> out_prefix;
};

/// Parses and validates; throws ConfigError naming the field.
ScenarioConfig load_config(const std::string& path, const Overrides& overrides);
ScenarioConfig parse_config(const std::string& json_text,
                            const Overrides& overrides);

SystemSpec build_spec(const ScenarioConfig& cfg);
InputSignal build_input(const ScenarioConfig& cfg);
Example26Spec build_example26(const ScenarioConfig& cfg);

}  // namespace deadbeat::cli
