#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include <eqlab/eqlab.hpp>

namespace {

struct CliFlags {
  std::string config_path;
  std::string out_dir;
  std::string cache_dir;
  int workers = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

eqlab::RunConfig resolve(const CliFlags& flags) {
  eqlab::RunConfig config = eqlab::load_config_file(flags.config_path);
  if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
  if (!flags.cache_dir.empty()) config.cache_dir = flags.cache_dir;
  if (flags.workers >= 0) config.workers = flags.workers;
  if (flags.seed_given) config.seed = flags.seed;
  return config;
}

void add_common_flags(CLI::App* cmd, CliFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON run configuration (or a manifest)")
      ->required();
  cmd->add_option("--out", flags.out_dir, "Output directory (overrides config)");
  cmd->add_option("--workers", flags.workers, "Worker thread count (0 = hardware default)");
  cmd->add_option("--cache", flags.cache_dir, "Spectrum cache directory (overrides config)");
  cmd->add_option("--seed", flags.seed, "Seed for sampled gap diagnostics")
      ->each([&flags](const std::string&) { flags.seed_given = true; });
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-chain equilibration laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(eqlab::version()));

  CliFlags flags;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Eigenvalues and gap diagnostics");
  CLI::App* evolve = app.add_subcommand("evolve", "Magnetization time trace");
  CLI::App* sweep = app.add_subcommand("sweep", "NE and d_eff over the Bloch-angle grid");
  CLI::App* scaling = app.add_subcommand("scaling", "d_eff versus N with exponential fits");
  CLI::App* eth = app.add_subcommand("eth", "Eigenstate expectations and shell averages");
  for (CLI::App* cmd : {spectrum, evolve, sweep, scaling, eth}) add_common_flags(cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const eqlab::RunConfig config = resolve(flags);
    if (spectrum->parsed()) eqlab::cmd_spectrum(config);
    if (evolve->parsed()) eqlab::cmd_evolve(config);
    if (sweep->parsed()) eqlab::cmd_sweep(config);
    if (scaling->parsed()) eqlab::cmd_scaling(config);
    if (eth->parsed()) eqlab::cmd_eth(config);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
