#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uowc/app/commands.hpp"
#include "uowc/app/config_io.hpp"
#include "uowc/app/figures.hpp"
#include "uowc/report.hpp"

namespace uowc::app {

inline constexpr std::string_view tool_name = "uowc";
inline constexpr std::string_view tool_version = "0.1.0";

/// Everything needed to regenerate a run's outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // arguments after the program name
  nlohmann::ordered_json config;  // effective parameters, external form
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string format;
  std::vector<std::string> outputs;  // file names relative to the manifest
  std::string timestamp;             // UTC, ISO 8601

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["command"] = command;
    j["argv"] = argv;
    j["config"] = config;
    j["seed"] = std::to_string(seed);
    j["workers"] = workers;
    j["format"] = format;
    j["outputs"] = outputs;
    j["timestamp"] = timestamp;
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config = j.at("config");
    m.seed = std::stoull(j.at("seed").get<std::string>());
    m.workers = j.at("workers").get<unsigned>();
    m.format = j.at("format").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.timestamp = j.value("timestamp", "");
    return m;
  }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string manifest_name(const std::string& command) { return command + ".manifest.json"; }

namespace detail {

/// Options shared by every command.
struct GlobalOptions {
  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_dir;
  std::string format = "csv";
  int level = 0;
  unsigned workers = 1;
  std::vector<std::string> assignments;
  std::optional<double> slab_depth;
  std::optional<double> lambda_2d;
  std::optional<double> phi_half_deg;
  std::optional<double> tx_power;
  std::optional<double> solar_irradiance;
  std::string solar_mode;
};

inline Overrides collect_overrides(const GlobalOptions& g) {
  // precedence: file < level < named flags < --set, applied in this order
  Overrides o;
  if (g.level != 0) o.emplace_back("slab_depth", level_preset(g.level).slab_depth);
  if (g.slab_depth) o.emplace_back("slab_depth", *g.slab_depth);
  if (g.lambda_2d) o.emplace_back("lambda_2d", *g.lambda_2d);
  if (g.phi_half_deg) o.emplace_back("phi_half_deg", *g.phi_half_deg);
  if (g.tx_power) o.emplace_back("tx_power", *g.tx_power);
  if (g.solar_irradiance) o.emplace_back("solar_surface_irradiance", *g.solar_irradiance);
  if (!g.solar_mode.empty()) o.emplace_back(std::string(solar_mode_key), g.solar_mode);
  for (const auto& a : g.assignments) o.push_back(parse_assignment(a));
  return o;
}

inline void add_global_options(CLI::App& app, GlobalOptions& g) {
  app.add_option("--config", g.config_path, "JSON parameter file (keys = field names, angles in degrees)");
  app.add_option("--seed", g.seed, "Master seed for Monte Carlo work");
  app.add_option("--out", g.out_dir, "Output directory; when absent, tables go to stdout without a manifest");
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--level", g.level, "Depth preset: 1 (R=50 m), 2 (R=500 m), 3 (R=6000 m)")
      ->check(CLI::IsMember({1, 2, 3}));
  app.add_option("--workers", g.workers, "Worker threads (results do not depend on this)")
      ->check(CLI::Range(1u, 256u));
  app.add_option("--set", g.assignments, "Override any configuration key: key=value (repeatable)");
  app.add_option("--slab-depth", g.slab_depth, "Slab depth R [m]");
  app.add_option("--lambda", g.lambda_2d, "Areal node density [nodes/m^2]");
  app.add_option("--phi-half-deg", g.phi_half_deg, "Half-power semi-angle [deg]");
  app.add_option("--ptx", g.tx_power, "Transmit power [W]");
  app.add_option("--solar-irradiance", g.solar_irradiance, "Surface solar irradiance [W/m^2]; 0 disables it");
  app.add_option("--solar-mode", g.solar_mode, "Solar spectral factor mode")
      ->check(CLI::IsMember({"raw_nm_multiplier", "band_fraction"}));
}

}  // namespace detail

/// Parses argv, runs one command, writes outputs. Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

namespace detail {

inline int replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir, std::ostream& out,
                  std::ostream& err) {
  const auto original_dir = manifest_path.parent_path();
  const RunManifest m = RunManifest::from_json(parse_json_text(read_file(manifest_path), manifest_path.string()));
  std::filesystem::create_directories(out_dir);
  const auto config_file = out_dir / "replay.config.json";
  report::write_text(config_file, m.config.dump(2) + "\n");

  // Same argv, with the recorded configuration and a fresh output directory.
  std::vector<std::string> argv;
  for (std::size_t i = 0; i < m.argv.size(); ++i) {
    const std::string& a = m.argv[i];
    if (a == "--config" || a == "--out") {
      ++i;
      continue;
    }
    if (a.rfind("--config=", 0) == 0 || a.rfind("--out=", 0) == 0) continue;
    argv.push_back(a);
  }
  argv.insert(argv.end(), {"--config", config_file.string(), "--out", out_dir.string()});
  const int code = run(argv, out, err);
  if (code != exit_ok && code != exit_infeasible) return code;

  bool same = true;
  for (const auto& name : m.outputs) {
    const bool equal = read_file(original_dir / name) == read_file(out_dir / name);
    out << name << ": " << (equal ? "identical" : "DIFFERENT") << "\n";
    same = same && equal;
  }
  return same ? exit_ok : exit_validation;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Underwater optical link analytics: node geometry, received power, SiPM noise, BER and energy "
               "optimization. Angles are given in degrees at this interface."};
  app.set_version_flag("--version", std::string(tool_version));
  app.require_subcommand(1);
  detail::GlobalOptions g;
  detail::add_global_options(app, g);

  std::string command;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    s->callback([&command, name] { command = name; });
    return s;
  };

  NNDistArgs nn_args;
  auto* c_nn = sub("nn-dist", "Nearest-neighbour distance law on a distance grid");
  c_nn->add_option("--s-max", nn_args.s_max, "Largest distance [m] (default: the 1 - 1e-6 quantile)");
  c_nn->add_option("--points", nn_args.points, "Number of grid points");

  DepthArgs depth_args;
  auto* c_depth = sub("depth", "Expected link depth and mean/median link distance");
  c_depth->add_option("--trials", depth_args.trials, "Also estimate the depth from this many realizations");

  PowerArgs power_args;
  auto* c_power = sub("power", "Received power for one link");
  c_power->add_option("--L", power_args.link_length, "Link length [m] (default: mean nearest-neighbour distance)");
  c_power->add_option("--variant", power_args.variant)
      ->check(CLI::IsMember({"all", "random", "main-lobe", "offset", "pat"}));
  c_power->add_option("--delta-deg", power_args.delta_deg, "Receiver offset [deg] (default: optimal)");
  c_power->add_option("--epsilon-deg", power_args.epsilon_deg, "PAT pointing error [deg]");

  ChannelGainArgs gain_args;
  auto* c_gain = sub("channel-gain", "Line-of-sight DC gain for one ray");
  c_gain->add_option("--theta-deg", gain_args.theta_deg, "Irradiance angle [deg]");
  c_gain->add_option("--psi-deg", gain_args.psi_deg, "Incidence angle [deg]");
  c_gain->add_option("--L", gain_args.link_length, "Link length [m]");

  std::optional<double> phi_min, phi_max;
  double phi_step = 1.0;
  auto* c_off = sub("offset-opt", "Optimal receiver offset, exact root and empirical formula");
  c_off->add_option("--phi-min", phi_min, "First half-power angle [deg] (default: configured value)");
  c_off->add_option("--phi-max", phi_max, "Last half-power angle [deg]");
  c_off->add_option("--phi-step", phi_step, "Step [deg]");

  PatArgs pat_args;
  auto* c_pat = sub("pat", "Tracking benchmark against offset pointing, with the crossover error");
  c_pat->add_option("--eps-step", pat_args.eps_step_deg, "Pointing-error step [deg]");
  c_pat->add_option("--L", pat_args.link_length, "Link length [m]");
  c_pat->add_option("--delta-deg", pat_args.delta_deg, "Strategy offset [deg] (default: optimal)");

  std::string grid_kind = "offset";
  OffsetGridSpec offset_spec;
  double og_phi[2] = {5.0, 85.0}, og_delta[2] = {0.0, 45.0};
  std::size_t og_counts[2] = {81, 91};
  double dg_r[2] = {10.0, 6000.0}, dg_lambda[2] = {1e-5, 1.0};
  std::size_t dg_counts[2] = {40, 51};
  double grid_delta_deg = 0.0;
  bool no_normalize = false;
  auto* c_grid = sub("grid", "Received-power heat map (offset x half-angle, or slab depth x density)");
  c_grid->add_option("--kind", grid_kind)->check(CLI::IsMember({"offset", "density"}));
  c_grid->add_option("--phi-min", og_phi[0]);
  c_grid->add_option("--phi-max", og_phi[1]);
  c_grid->add_option("--phi-count", og_counts[0]);
  c_grid->add_option("--delta-min", og_delta[0]);
  c_grid->add_option("--delta-max", og_delta[1]);
  c_grid->add_option("--delta-count", og_counts[1]);
  c_grid->add_option("--L", offset_spec.link_length, "Link length for the offset grid [m]");
  c_grid->add_option("--r-min", dg_r[0]);
  c_grid->add_option("--r-max", dg_r[1]);
  c_grid->add_option("--r-count", dg_counts[0]);
  c_grid->add_option("--lambda-min", dg_lambda[0]);
  c_grid->add_option("--lambda-max", dg_lambda[1]);
  c_grid->add_option("--lambda-count", dg_counts[1]);
  c_grid->add_option("--delta-deg", grid_delta_deg, "Receiver offset for the density grid [deg]");
  c_grid->add_flag("--no-normalize", no_normalize, "Do not divide by the grid maximum");

  SnrArgs snr_args;
  auto* c_snr = sub("snr", "Noise breakdown, SNR and BER");
  c_snr->add_option("--prx", snr_args.p_rx, "Received optical power [W]; otherwise the configured link is used");
  c_snr->add_option("--depth", snr_args.depth, "Receiver depth for the solar term [m]");
  c_snr->add_option("--tx", snr_args.p_tx, "Transmit power for the link mode [W]");
  c_snr->add_option("--delta-deg", snr_args.delta_deg, "Receiver offset for the link mode [deg]");

  std::vector<double> ber_snrs, ber_targets;
  auto* c_ber = sub("ber", "OOK bit error rate and its inverse");
  c_ber->add_option("--snr", ber_snrs, "SNR values (linear)");
  c_ber->add_option("--target-ber", ber_targets, "BER targets to invert");

  DensityGridArgs dens;
  auto add_density_opts = [&](CLI::App* s) {
    s->add_option("--lambda-min", dens.lambda_min);
    s->add_option("--lambda-max", dens.lambda_max);
    s->add_option("--lambda-count", dens.lambda_count);
    s->add_option("--link-quantile", dens.link_quantile, "Use this distance quantile instead of the mean")
        ->check(CLI::Range(0.0, 0.999999));
  };
  auto* c_sweep = sub("sweep", "Minimum power and total bits over a density grid, both strategies");
  add_density_opts(c_sweep);
  std::string strategy = "both";
  auto* c_opt = sub("optimize", "Density maximizing the total transmittable bits");
  add_density_opts(c_opt);
  c_opt->add_option("--strategy", strategy)->check(CLI::IsMember({"both", "baseline", "offset"}));

  McValidateArgs mcv;
  auto* c_mcv = sub("mc-validate", "Monte Carlo oracle suite against the closed forms (JSON by default)");
  c_mcv->add_option("--samples", mcv.samples)->check(CLI::Range(std::size_t{10000}, std::size_t{1} << 40));
  c_mcv->add_option("--trials", mcv.trials)->check(CLI::Range(std::size_t{1000}, std::size_t{1} << 40));
  c_mcv->add_option("--L", mcv.link_length, "Link length for the power checks [m]");

  std::string figure_id;
  FigureArgs fig;
  auto* c_fig = sub("figure", "Figure data sets");
  c_fig->add_option("id", figure_id, "Figure id")->required();
  c_fig->add_option("--trials", fig.trials)->check(CLI::Range(std::size_t{1000}, std::size_t{1} << 40));
  c_fig->add_option("--samples", fig.samples)->check(CLI::Range(std::size_t{10000}, std::size_t{1} << 40));
  c_fig->add_option("--lambda-min", fig.density.lambda_min);
  c_fig->add_option("--lambda-max", fig.density.lambda_max);
  c_fig->add_option("--lambda-count", fig.density.lambda_count);

  std::string manifest_path, replay_out;
  auto* c_replay = app.add_subcommand("replay", "Re-run a manifest and compare its outputs byte for byte");
  c_replay->add_option("manifest", manifest_path)->required();
  c_replay->add_option("--into", replay_out, "Directory for the regenerated files")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << tool_version << "\n";
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  }

  try {
    if (c_replay->parsed()) return detail::replay(manifest_path, replay_out, out, err);

    ResolvedConfig cfg = resolve_config(
        g.config_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(g.config_path),
        detail::collect_overrides(g));
    const SystemParams& params = cfg.params;
    const mc::McConfig mc_cfg{g.seed, g.workers};
    fig.workers = g.workers;

    report::Format format = g.format == "json" ? report::Format::json : report::Format::csv;
    if (c_mcv->parsed() && app.count("--format") == 0) format = report::Format::json;

    CommandOutput result;
    std::string manifest_stem = command;
    if (c_nn->parsed()) {
      result.tables.push_back(nn_dist_table(NNDistribution(params), nn_args));
    } else if (c_depth->parsed()) {
      result.tables.push_back(depth_table(params, depth_args, mc_cfg));
    } else if (c_power->parsed()) {
      result.tables.push_back(power_table(params, power_args));
    } else if (c_gain->parsed()) {
      result.tables.push_back(channel_gain_table(params, gain_args));
    } else if (c_off->parsed()) {
      const double lo = phi_min.value_or(rad_to_deg(params->phi_half));
      result.tables.push_back(offset_opt_table(stepped(lo, phi_max.value_or(lo), phi_step)));
    } else if (c_pat->parsed()) {
      result = pat_tables(params, pat_args, "pat", false);
    } else if (c_grid->parsed()) {
      PowerGrid grid;
      if (grid_kind == "offset") {
        offset_spec.phi_half = {deg_to_rad(og_phi[0]), deg_to_rad(og_phi[1]), og_counts[0], false};
        offset_spec.delta = {deg_to_rad(og_delta[0]), deg_to_rad(og_delta[1]), og_counts[1], false};
        offset_spec.normalize = !no_normalize;
        grid = power_grid(params, offset_spec);
      } else {
        DensityGridSpec spec{{dg_r[0], dg_r[1], dg_counts[0], true},
                             {dg_lambda[0], dg_lambda[1], dg_counts[1], true},
                             deg_to_rad(grid_delta_deg),
                             !no_normalize};
        grid = power_grid(params, spec);
      }
      result.tables.push_back(grid_table(grid, "grid_" + grid_kind, grid_kind == "density"));
    } else if (c_snr->parsed()) {
      result.tables.push_back(snr_table(params, snr_args));
    } else if (c_ber->parsed()) {
      result = ber_tables(params, ber_snrs, ber_targets);
    } else if (c_sweep->parsed()) {
      result = sweep_output(params, dens, g.workers, "sweep");
    } else if (c_opt->parsed()) {
      std::vector<Strategy> strategies;
      if (strategy != "offset") strategies.push_back(Strategy::baseline);
      if (strategy != "baseline") strategies.push_back(Strategy::offset);
      result = optimize_output(params, dens, strategies, g.workers, "optimize");
    } else if (c_mcv->parsed()) {
      result = mc_validate_output(params, mcv, mc_cfg);
    } else if (c_fig->parsed()) {
      if (std::find(figure_ids.begin(), figure_ids.end(), figure_id) == figure_ids.end()) {
        err << "error: unknown figure id '" << figure_id << "'\n";
        return exit_config;
      }
      result = run_figure(figure_id, params, fig, mc_cfg);
      manifest_stem = "figure-" + figure_id;
    }

    if (g.out_dir.empty()) {
      for (std::size_t i = 0; i < result.tables.size(); ++i) {
        if (result.tables.size() > 1) out << (i ? "\n" : "") << "# " << result.tables[i].name << "\n";
        out << report::render(result.tables[i], format);
      }
    } else {
      RunManifest m;
      m.command = manifest_stem;
      m.argv = args;
      m.config = cfg.document;
      m.seed = g.seed;
      m.workers = g.workers;
      m.format = format == report::Format::csv ? "csv" : "json";
      m.timestamp = utc_timestamp();
      for (const auto& t : result.tables) m.outputs.push_back(report::emit(t, format, g.out_dir).filename().string());
      report::write_text(std::filesystem::path(g.out_dir) / manifest_name(manifest_stem), m.to_json().dump(2) + "\n");
    }
    if (!result.message.empty()) err << (result.exit_code ? "error: " : "") << result.message << "\n";
    return result.exit_code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

/// argc/argv entry point.
inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace uowc::app
