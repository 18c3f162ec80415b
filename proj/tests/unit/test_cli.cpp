#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "uowc/app/cli.hpp"

using namespace uowc;
using namespace uowc::app;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("uowc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

const fs::path fixture = fs::path(UOWC_SOURCE_DIR) / "configs" / "table2.json";

}  // namespace

TEST(ConfigIo, FixtureLoadsToDefaults) {
  EXPECT_EQ(load_config(fixture), default_params());
}

TEST(ConfigIo, ZeroAngleNamesTheField) {
  const auto dir = scratch("zero");
  report::write_text(dir / "c.json", R"({"phi_half_deg": 0})");
  try {
    load_config(dir / "c.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("phi_half"), std::string::npos);
  }
}

TEST(ConfigIo, UnknownKeyIsAnError) {
  const auto dir = scratch("unknown");
  report::write_text(dir / "c.json", R"({"phi_half": 1.0})");
  EXPECT_THROW(load_config(dir / "c.json"), ConfigError);
}

TEST(ConfigIo, ParseErrorReportsPosition) {
  const auto dir = scratch("parse");
  report::write_text(dir / "c.json", "{\n  \"tx_power\": 8,\n  oops\n}\n");
  try {
    load_config(dir / "c.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ConfigIo, TypeErrors) {
  ParamValues v;
  EXPECT_THROW(apply_key(v, "tx_power", "eight"), ConfigError);
  EXPECT_THROW(apply_key(v, "solar_spectral_fraction_mode", 3), ConfigError);
  EXPECT_THROW(apply_key(v, "solar_spectral_fraction_mode", "sunny"), ConfigError);
  EXPECT_THROW(parse_assignment("tx_power"), ConfigError);
  EXPECT_THROW(parse_assignment("tx_power=8x"), ConfigError);
}

TEST(ConfigIo, DefaultDocumentReproducesDefaults) {
  EXPECT_EQ(from_config_json(default_config_json()), ParamValues{});
}

TEST(Cli, FlagOverridesFileValue) {
  const auto dir = scratch("override");
  report::write_text(dir / "c.json", R"({"slab_depth": 50})");
  const auto r = call({"depth", "--config", (dir / "c.json").string(), "--slab-depth", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n0.001,500,"), std::string::npos) << r.out;
  const auto lvl = call({"depth", "--level", "3", "--set", "slab_depth=700"});
  EXPECT_NE(lvl.out.find("\n0.001,700,"), std::string::npos) << lvl.out;
}

TEST(Cli, CsvHeaders) {
  EXPECT_EQ(first_line(call({"nn-dist", "--points", "3"}).out), "s_m,survival,pdf_per_m,cdf");
  EXPECT_EQ(first_line(call({"offset-opt"}).out), "phi_half_deg,delta_exact_deg,delta_approx_deg");
  EXPECT_EQ(first_line(call({"sweep", "--lambda-count", "3"}).out),
            "lambda_per_m2,mean_link_m,mean_depth_m,ptx_min_base_w,ptx_min_offset_w,nb_base_bits,nb_offset_bits,"
            "floor_base,floor_offset,feasible_base,feasible_offset");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({"--help"}).code, exit_ok);
  EXPECT_EQ(call({"no-such-command"}).code, exit_config);
  EXPECT_EQ(call({"power", "--set", "phi_half_deg=0"}).code, exit_config);
  EXPECT_EQ(call({"power", "--config", "/nonexistent.json"}).code, exit_config);
  EXPECT_EQ(call({"figure", "nope"}).code, exit_config);
  EXPECT_EQ(call({"power", "--variant", "offset", "--delta-deg", "40"}).code, exit_config);
  // raw solar background makes every density infeasible at this grid
  EXPECT_EQ(call({"optimize", "--lambda-min", "1e-5", "--lambda-max", "1e-3", "--lambda-count", "5"}).code,
            exit_infeasible);
  EXPECT_EQ(call({"optimize", "--solar-irradiance", "0", "--lambda-count", "31"}).code, exit_ok);
}

TEST(Cli, McValidatePassesAndDefaultsToJson) {
  const auto r = call({"mc-validate", "--samples", "200000", "--trials", "20000", "--workers", "4"});
  EXPECT_EQ(r.code, exit_ok) << r.out << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["name"], "mc_validate");
  for (const auto& row : j["rows"]) EXPECT_TRUE(row["pass"].get<bool>()) << row.dump();
}

TEST(Cli, MonteCarloOutputsIndependentOfWorkers) {
  const std::vector<std::vector<std::string>> commands = {
      {"figure", "nn-dist", "--trials", "20000"},
      {"figure", "power-validate", "--samples", "50000"},
      {"depth", "--trials", "5000"},
      {"mc-validate", "--samples", "50000", "--trials", "5000"},
  };
  for (const auto& cmd : commands) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    auto args_a = cmd, args_b = cmd;
    args_a.insert(args_a.end(), {"--seed", "42", "--workers", "1", "--out", a.string()});
    args_b.insert(args_b.end(), {"--seed", "42", "--workers", "4", "--out", b.string()});
    ASSERT_EQ(call(args_a).code, 0);
    ASSERT_EQ(call(args_b).code, 0);
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().string().ends_with(".manifest.json")) continue;
      EXPECT_EQ(read_file(entry.path()), read_file(b / entry.path().filename())) << entry.path();
    }
  }
}

TEST(Cli, ManifestReplayReproducesOutputs) {
  const auto dir = scratch("replay_src");
  const auto again = scratch("replay_dst");
  ASSERT_EQ(call({"sweep", "--level", "2", "--solar-irradiance", "0", "--lambda-count", "25", "--out", dir.string()})
                .code,
            0);
  const auto manifest = dir / "sweep.manifest.json";
  ASSERT_TRUE(fs::exists(manifest));
  const auto m = RunManifest::from_json(nlohmann::json::parse(read_file(manifest)));
  EXPECT_EQ(m.outputs, std::vector<std::string>{"sweep.csv"});
  EXPECT_EQ(m.config["slab_depth"].get<double>(), 500.0);
  EXPECT_EQ(call({"replay", manifest.string(), "--into", again.string()}).code, exit_ok);

  // a tampered artifact no longer matches its manifest
  report::write_text(dir / "sweep.csv", read_file(dir / "sweep.csv") + "x\n");
  EXPECT_EQ(call({"replay", manifest.string(), "--into", again.string()}).code, exit_validation);
}

TEST(Cli, FigureIdsAllRun) {
  const auto dir = scratch("figures");
  for (auto id : figure_ids) {
    std::vector<std::string> args{"figure", std::string(id), "--out", dir.string(), "--trials", "2000", "--samples",
                                  "20000", "--solar-irradiance", "0"};
    const auto r = call(args);
    EXPECT_EQ(r.code, 0) << id << ": " << r.err;
    EXPECT_TRUE(fs::exists(dir / ("figure-" + std::string(id) + ".manifest.json"))) << id;
  }
  const auto delta = read_file(dir / "fig_delta_opt.csv");
  EXPECT_EQ(std::count(delta.begin(), delta.end(), '\n'), 72);  // header + 10..80 deg
}

TEST(Cli, BinaryExitCode) {
  const std::string bin = UOWC_CLI_PATH;
  EXPECT_EQ(std::system((bin + " --version > /dev/null").c_str()), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " power --set bogus=1 2> /dev/null").c_str())), exit_config);
}
