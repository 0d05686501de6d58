// Command-line front end: run, skorokhod, residual, sweep, histogram.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "inertdrift/cli.hpp"

namespace {

using namespace inertdrift;

int with_config(const std::string& path, const std::string& output_root,
                const std::function<int(const RunConfig&)>& body) {
  try {
    const std::filesystem::path root = output_root.empty() ? default_output_root() : std::filesystem::path(output_root);
    return body(load_run_config(path, root));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification of reflecting diffusions with inert drift"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config, output_root;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--output-root", output_root,
                    "Root for relative output directories (default: $INERTDRIFT_OUTPUT_ROOT or ./runs)");
  };

  auto* run = app.add_subcommand("run", "Simulate the configured ensemble and run its tests");
  add_common(run);
  bool dry_run = false, strict = false;
  run->add_flag("--dry-run", dry_run, "Write the manifest only");
  run->add_flag("--strict", strict, "Treat inconclusive tests as failures");

  auto* sko = app.add_subcommand("skorokhod", "Solve the Skorokhod problem for a path file");
  add_common(sko);
  std::string path_in, path_out;
  sko->add_option("--input", path_in, "CSV with header t,x1..xd")->required()->check(CLI::ExistingFile);
  sko->add_option("--output", path_out, "CSV t,x1..xd,ell")->required();

  auto* res = app.add_subcommand("residual", "Generator residuals by quadrature");
  add_common(res);

  auto* sweep = app.add_subcommand("sweep", "Weak-convergence sweep over potential indices");
  add_common(sweep);

  auto* hist = app.add_subcommand("histogram", "Histograms of a saved trajectory CSV");
  add_common(hist);
  std::string batch_csv, hist_dir;
  int bins = 20;
  hist->add_option("--batch", batch_csv, "trajectories.csv from a previous run")->required()->check(CLI::ExistingFile);
  hist->add_option("--bins", bins, "Bins per histogram")->check(CLI::Range(2, 100000));
  hist->add_option("--output-dir", hist_dir, "Destination directory (default: the config's output directory)");

  CLI11_PARSE(app, argc, argv);

  if (*run)
    return with_config(config, output_root, [&](const RunConfig& cfg) {
      RunOptions opt;
      opt.dry_run = dry_run;
      if (strict) opt.strict = true;
      return run_pipeline(cfg, opt, std::cout);
    });
  if (*sko)
    return with_config(config, output_root,
                       [&](const RunConfig& cfg) { return skorokhod_command(cfg, path_in, path_out, std::cout); });
  if (*res) return with_config(config, output_root, [&](const RunConfig& cfg) { return residual_command(cfg, std::cout); });
  if (*sweep) return with_config(config, output_root, [&](const RunConfig& cfg) { return sweep_command(cfg, std::cout); });
  if (*hist)
    return with_config(config, output_root, [&](const RunConfig& cfg) {
      const std::filesystem::path dir = hist_dir.empty() ? cfg.output_directory : std::filesystem::path(hist_dir);
      return histogram_command(cfg, batch_csv, bins, dir, std::cout);
    });
  return kExitOk;
}
