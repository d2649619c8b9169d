#include <CLI11.hpp>
#include <cstdio>
#include <thread>

#include "hexband/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "hexband - boundary-integral subwavelength band structures of hexagonal "
      "crystals with six circular inclusions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int threads = 0;
  double sigma_override = std::numeric_limits<double>::quiet_NaN();
  std::string path_override;

  app.add_option("--config", config_path, "configuration file (TOML-style subset)");
  app.add_option("--out", out_dir, "output directory root");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--sigma", sigma_override, "override geometry.sigma");
  app.add_option("--path", path_override,
                 "override band path, e.g. \"M1,G,M2:81\"");

  const std::vector<std::string> commands = {"capacitance", "bands", "cone",      "gap",
                                             "fold",        "fields", "dispersion", "validate"};
  for (const std::string& name : commands) app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);

  try {
    hexband::ExperimentConfig cfg =
        config_path.empty() ? hexband::ExperimentConfig{} : hexband::load_config(config_path);
    if (!std::isnan(sigma_override)) cfg.geometry.sigma = sigma_override;
    if (!path_override.empty()) {
      const auto colon = path_override.rfind(':');
      if (colon == std::string::npos) {
        cfg.path.points = path_override;
      } else {
        cfg.path.points = path_override.substr(0, colon);
        cfg.path.samples = std::stoi(path_override.substr(colon + 1));
      }
    }
    cfg.validate();
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
    if (cfg.materials.contrast_warning())
      std::fprintf(stderr,
                   "warning: contrast delta = %g is not small; the asymptotic band "
                   "formulas degrade\n",
                   cfg.materials.delta());

    const std::string cmd = app.get_subcommands().front()->get_name();
    const int status = hexband::run_command(cmd, cfg, out_dir, threads);
    if (status != 0)
      std::fprintf(stderr, "%s failed; see error.json in the output directory\n", cmd.c_str());
    return status;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
