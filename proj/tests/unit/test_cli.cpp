#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "deadbeat/error.hpp"
#include "json.hpp"

namespace deadbeat::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ConfigPath(const std::string& name) {
  return std::string(DEADBEAT_CONFIG_DIR) + "/" + name + ".json";
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json ReadJson(const std::string& path) { return json::parse(Slurp(path)); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("deadbeat_cli_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Prefix(const std::string& stem) const {
    return (dir_ / stem).string();
  }

  ScenarioConfig Load(const std::string& name) const {
    Overrides o;
    o.out_prefix = Prefix(name);
    return load_config(ConfigPath(name), o);
  }

  std::string WriteConfig(const std::string& stem, const std::string& text) {
    const std::string path = (dir_ / (stem + ".json")).string();
    std::ofstream(path) << text;
    return path;
  }

  // Runs the built tool; returns the exit status and captures stderr.
  int RunTool(const std::string& args, std::string* err = nullptr) {
    const std::string err_path = (dir_ / "stderr.txt").string();
    const std::string cmd = std::string(DEADBEAT_OBS_EXE) + " " + args +
                            " > /dev/null 2> " + err_path;
    const int status = std::system(cmd.c_str());
    if (err) *err = Slurp(err_path);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

std::string FieldOf(const std::string& text) {
  try {
    parse_config(text, {});
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

// ------------------------------------------------------------ validation

TEST(ConfigTest, ValidationNamesField) {
  EXPECT_EQ(FieldOf("{"), "<config>");
  EXPECT_EQ(FieldOf("{}"), "system");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "pendulum"}})"), "system.type");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "scalar"},
      "sim": {"t_end": 1, "h": 0.0003, "x0": [1], "y0": [0]},
      "observer": {"r": 1}})"),
            "observer.r");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "scalar"},
      "sim": {"t_end": 1, "h": 0.001, "x0": [1, 2], "y0": [0]},
      "observer": {"r": 1}})"),
            "sim.x0");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "scalar"},
      "sim": {"t_end": 1, "h": 0.001, "x0": [1], "y0": [0]},
      "observer": {"r": 1, "mode": "partial"}})"),
            "observer.mode");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "scalar"},
      "sim": {"t_end": 1, "h": 0.001, "x0": [1], "y0": [0]},
      "observer": {"r": 1, "on_degenerate": "ignore"}})"),
            "observer.on_degenerate");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "scalar"},
      "sim": {"t_end": 1, "h": 0.001, "x0": [1], "y0": [0]},
      "observer": {"r": 1}, "sensor": {"type": "sinusoid", "amplitude": 0.1,
      "frequency": -3}})"),
            "sensor");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "reactor", "params": {"k1": -1}},
      "sim": {"t_end": 1, "x0": [0.5, 0.5], "y0": [320]}})"),
            "system.params");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "reactor"},
      "sim": {"t_end": 3, "x0": [1.5, 0.5], "y0": [320]}})"),
            "sim.x0");
  EXPECT_EQ(FieldOf(R"({"system": {"type": "lti", "A": [[0, 1], [0]],
      "C": [[1], [0]]}})"),
            "system.A");
}

TEST(ConfigTest, DefaultsAndOverrides) {
  Overrides o;
  o.h = 0.001;
  o.out_prefix = "elsewhere/run";
  const ScenarioConfig cfg = load_config(ConfigPath("scalar_oracle"), o);
  EXPECT_EQ(cfg.type, SystemType::kScalar);
  EXPECT_DOUBLE_EQ(cfg.sim.h, 0.001);
  EXPECT_DOUBLE_EQ(cfg.observer.h, 0.001);
  EXPECT_EQ(cfg.output_prefix, "elsewhere/run");

  const ScenarioConfig reactor = parse_config(R"({"system": {"type": "reactor"},
      "sim": {"t_end": 3, "x0": [0.5, 0.5], "y0": [320]}})", {});
  EXPECT_DOUBLE_EQ(reactor.observer.r, 1.5);
  EXPECT_DOUBLE_EQ(reactor.sim.h, 1.5 / 2000);
  EXPECT_EQ(reactor.observer.mode, ObserverMode::kReducedOrder);

  const ScenarioConfig freq = load_config(ConfigPath("fig1_phase_f10"), {});
  EXPECT_EQ(freq.observer.mode, ObserverMode::kFullOrder);
  EXPECT_DOUBLE_EQ(freq.frequency.noise_amplitude, 0.2);
  EXPECT_DOUBLE_EQ(freq.frequency.noise_frequency, 10.0);
}

// -------------------------------------------------------------- commands

TEST_F(CliTest, SimulateScalarOracle) {
  const ScenarioConfig cfg = Load("scalar_oracle");
  std::ostringstream log;
  cmd_simulate(cfg, log);
  const json s = ReadJson(cfg.output_prefix + "_summary.json");
  EXPECT_LE(s["max_post_r_error"].get<double>(), 1e-5);
  EXPECT_TRUE(fs::exists(cfg.output_prefix + "_trace.csv"));
  EXPECT_TRUE(fs::exists(cfg.output_prefix + "_estimate.csv"));
}

TEST_F(CliTest, SimulateFrequencyClean) {
  const ScenarioConfig cfg = Load("frequency_clean");
  std::ostringstream log;
  cmd_simulate(cfg, log);
  const json s = ReadJson(cfg.output_prefix + "_summary.json");
  EXPECT_NEAR(s["omega_hat"].get<double>(), 3.0, 1e-4);
}

TEST_F(CliTest, SweepCleanAllSmall) {
  const ScenarioConfig cfg = Load("frequency_clean");
  std::ostringstream log;
  cmd_sweep(cfg, SweepMode::kPhase, log);
  std::ifstream in(cfg.output_prefix + "_sweep.csv");
  const CsvTable t = read_csv(in);
  ASSERT_EQ(t.header,
            (std::vector<std::string>{"sweep_value", "omega_hat", "rel_error"}));
  ASSERT_EQ(t.rows.size(), 64u);
  for (const auto& row : t.rows) EXPECT_LE(row[2], 1e-4);
  const json s = ReadJson(cfg.output_prefix + "_sweep_summary.json");
  EXPECT_LE(s["max_rel_error"].get<double>(), 1e-4);
}

TEST_F(CliTest, SweepHorizonRows) {
  const ScenarioConfig cfg = Load("fig4_horizon_f10");
  std::ostringstream log;
  cmd_sweep(cfg, SweepMode::kHorizon, log);
  std::ifstream in(cfg.output_prefix + "_sweep.csv");
  const CsvTable t = read_csv(in);
  bool found = false;
  for (const auto& row : t.rows) {
    if (row[0] == 3.0) {
      found = true;
      EXPECT_GE(row[2], 0.0005);
      EXPECT_LE(row[2], 0.0009);
    }
  }
  EXPECT_TRUE(found);
}

TEST_F(CliTest, ObservabilityReports) {
  std::ostringstream log;
  {
    const ScenarioConfig cfg = Load("scalar_oracle");
    cmd_observability(cfg, log);
    const json r = ReadJson(cfg.output_prefix + "_observability.json");
    EXPECT_EQ(r["verdict"], "StronglyObservableOnWindow");
    EXPECT_NEAR(r["smallest_eigenvalue"].get<double>(), 1.0 / 3.0, 1e-6);
    EXPECT_NEAR(r["determinant_condition"]["value"].get<double>(), 1.0, 1e-9);
  }
  {
    const ScenarioConfig cfg = Load("example26");
    cmd_observability(cfg, log);
    const json r = ReadJson(cfg.output_prefix + "_observability.json");
    EXPECT_EQ(r["verdict"], "Degenerate");
    EXPECT_EQ(r["null_direction"].size(), 2u);
    EXPECT_LE(r["indistinguishable_pair"]["max_output_difference"].get<double>(),
              1e-6);
  }
  {
    const ScenarioConfig cfg = Load("reactor_lumped");
    cmd_observability(cfg, log);
    const json r = ReadJson(cfg.output_prefix + "_observability.json");
    EXPECT_EQ(r["verdict"], "Degenerate");
  }
  {
    const ScenarioConfig cfg = Load("reactor");
    cmd_observability(cfg, log);
    const json r = ReadJson(cfg.output_prefix + "_observability.json");
    EXPECT_EQ(r["verdict"], "StronglyObservableOnWindow");
    EXPECT_NE(r["determinant_condition"]["value"].get<double>(), 0.0);
  }
}

TEST_F(CliTest, ObservabilityNodeValidation) {
  ScenarioConfig cfg = Load("reactor");
  cfg.observability_nodes = {10};
  std::ostringstream log;
  try {
    cmd_observability(cfg, log);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "observability.nodes");
  }
  cfg.observability_nodes = {10, 99999};
  EXPECT_THROW(cmd_observability(cfg, log), ConfigError);
}

// ------------------------------------------------------------------- CSV

TEST_F(CliTest, CsvFormat) {
  const ScenarioConfig cfg = Load("frequency_clean");
  std::ostringstream log;
  cmd_simulate(cfg, log);
  const std::string text = Slurp(cfg.output_prefix + "_estimate.csv");
  const std::string header = text.substr(0, text.find('\n'));
  EXPECT_EQ(header,
            "t,x_true_1,x_true_2,y_true_1,y_meas_1,z_1,z_2,w_1,reset_flag,"
            "degenerate_flag");
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(1.0 / 3.0).size(), 19u);

  const ScenarioConfig reduced = Load("scalar_oracle");
  cmd_simulate(reduced, log);
  const std::string rtext = Slurp(reduced.output_prefix + "_estimate.csv");
  EXPECT_EQ(rtext.substr(0, rtext.find('\n')),
            "t,x_true_1,y_true_1,y_meas_1,z_1,reset_flag,degenerate_flag");
}

TEST_F(CliTest, CsvRoundTripReproducesEstimate) {
  for (const char* name : {"frequency_clean", "reactor"}) {
    const ScenarioConfig cfg = Load(name);
    std::ostringstream log;
    cmd_simulate(cfg, log);
    const SystemSpec spec = build_spec(cfg);
    std::ifstream tin(cfg.output_prefix + "_trace.csv");
    Trace trace = read_trace_csv(tin, spec.n, spec.k, spec.m);
    trace.grid.h = cfg.observer.h;
    const EstimateTrace est =
        run_observer(spec, cfg.observer, trace, cfg.z0, cfg.w0);
    std::ifstream ein(cfg.output_prefix + "_estimate.csv");
    const CsvTable table = read_csv(ein);
    ASSERT_EQ(table.rows.size(), est.size());
    const std::size_t z_col = 1 + spec.n + 2 * spec.k;
    for (std::size_t j = 0; j < est.size(); ++j) {
      for (std::size_t i = 0; i < spec.n; ++i) {
        const double a = table.rows[j][z_col + i];
        const double b = est.z[j](static_cast<Eigen::Index>(i));
        ASSERT_NEAR(a, b, 1e-12 * (1 + std::abs(a))) << name << " row " << j;
      }
    }
  }
}

TEST(CsvTest, ReadRejectsMalformed) {
  std::istringstream bad("a,b\n1,x\n");
  EXPECT_THROW(read_csv(bad), std::exception);
  std::istringstream ragged("a,b\n1\n");
  EXPECT_THROW(read_csv(ragged), std::exception);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), std::exception);
}

// ------------------------------------------------------------ exit codes

TEST_F(CliTest, ExitCodeSuccessAndOverrides) {
  const std::string prefix = Prefix("ok");
  EXPECT_EQ(RunTool("simulate " + ConfigPath("scalar_oracle") +
                    " --out-prefix " + prefix + " --h 0.001"),
            0);
  const json s = ReadJson(prefix + "_summary.json");
  EXPECT_DOUBLE_EQ(s["h"].get<double>(), 0.001);
  EXPECT_EQ(RunTool("sweep " + ConfigPath("frequency_clean") +
                    " --mode phase --out-prefix " + prefix),
            0);
  EXPECT_EQ(RunTool("observability " + ConfigPath("example26") +
                    " --out-prefix " + prefix),
            0);
}

TEST_F(CliTest, OutputPrefixCreatesDirectories) {
  const std::string prefix = (dir_ / "nested" / "deeper" / "run").string();
  EXPECT_EQ(RunTool("simulate " + ConfigPath("scalar_oracle") +
                    " --out-prefix " + prefix),
            0);
  EXPECT_TRUE(fs::exists(prefix + "_trace.csv"));
  EXPECT_TRUE(fs::exists(prefix + "_summary.json"));
}

TEST_F(CliTest, ExitCodeValidation) {
  std::string err;
  EXPECT_EQ(RunTool("simulate " + ConfigPath("scalar_oracle") +
                        " --h 0.0003 --out-prefix " + Prefix("v"),
                    &err),
            2);
  EXPECT_NE(err.find("observer.r"), std::string::npos) << err;

  EXPECT_EQ(RunTool("sweep " + ConfigPath("scalar_oracle") + " --out-prefix " +
                        Prefix("v"),
                    &err),
            2);
  EXPECT_NE(err.find("system.type"), std::string::npos) << err;

  EXPECT_EQ(RunTool("sweep " + ConfigPath("frequency_clean") +
                    " --mode sideways"),
            2);
  EXPECT_EQ(RunTool("teleport " + ConfigPath("frequency_clean")), 2);
  EXPECT_EQ(RunTool("simulate /nonexistent/config.json"), 2);
  EXPECT_EQ(RunTool("sweep " + ConfigPath("frequency_clean") +
                    " --mode horizon --out-prefix " + Prefix("v")),
            2);
  const std::string no_tend = WriteConfig("no_tend", R"({
    "system": {"type": "scalar"},
    "sim": {"h": 0.001, "x0": [1], "y0": [0]},
    "observer": {"r": 1}})");
  EXPECT_EQ(RunTool("simulate " + no_tend + " --out-prefix " + Prefix("v"), &err),
            2);
  EXPECT_NE(err.find("sim.t_end"), std::string::npos) << err;
}

TEST_F(CliTest, ExitCodeRuntime) {
  const std::string path = WriteConfig("blowup", R"({
    "system": {"type": "lti", "A": [[400.0]], "C": [[1.0]]},
    "sim": {"t_end": 5, "h": 0.01, "x0": [1], "y0": [0]},
    "observer": {"r": 1}})");
  std::string err;
  EXPECT_EQ(RunTool("simulate " + path + " --out-prefix " + Prefix("rt"), &err),
            3);
  EXPECT_NE(err.find("NonFiniteState"), std::string::npos) << err;
}

TEST_F(CliTest, ExitCodeDegenerateFail) {
  const std::string base = R"({
    "system": {"type": "lti", "A": [[-0.5]], "b": [1], "C": [[0.0]], "f": [1]},
    "sim": {"t_end": 2, "h": 0.01, "x0": [1], "y0": [0]},
    "observer": {"r": 1, "on_degenerate": "%s"}})";
  auto with = [&](const char* policy) {
    std::string s = base;
    s.replace(s.find("%s"), 2, policy);
    return s;
  };
  const std::string fail = WriteConfig("fail", with("fail"));
  const std::string hold = WriteConfig("hold", with("hold"));
  EXPECT_EQ(RunTool("simulate " + fail + " --out-prefix " + Prefix("d")), 4);
  EXPECT_EQ(RunTool("simulate " + hold + " --out-prefix " + Prefix("d")), 0);
  const json s = ReadJson(Prefix("d") + "_summary.json");
  EXPECT_EQ(s["degenerate_events"].get<int>(), 2);
}

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(exit_code_for(ConfigError("x", "y")), kExitValidation);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::kGramDegenerate, "g")),
            kExitDegenerate);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::kDomainExit, "d")), kExitRuntime);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::kNonFiniteState, "n")),
            kExitRuntime);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::kInvalidParams, "p")),
            kExitValidation);
}

}  // namespace
}  // namespace deadbeat::cli
