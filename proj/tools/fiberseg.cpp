#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fiberseg/error.hpp"
#include "fiberseg/pipeline.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string method = "ray";
  std::optional<uint64_t> seed;
};

fiberseg::PipelineConfig resolve_config(const CommonOpts& opts) {
  fiberseg::PipelineConfig cfg = opts.config_path.empty()
                                     ? fiberseg::default_torus_config()
                                     : fiberseg::load_config(opts.config_path);
  // Precedence: flag > config > default.
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.seed) {
    cfg.torus.rng_seed = *opts.seed;
    cfg.curved_tube.rng_seed = *opts.seed;
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_method) {
  cmd->add_option("--config", opts.config_path, "pipeline configuration JSON");
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "phantom RNG seed (overrides config)");
  if (with_method) {
    cmd->add_option("--method", opts.method, "segmentation method")
        ->check(CLI::IsMember({"ray", "graph"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiber bundle boundary estimation pipeline"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto* cmd_phantom = app.add_subcommand("phantom", "generate phantom volume and ground truth");
  auto* cmd_track = app.add_subcommand("track", "track, crop and frame the fiber bundle");
  auto* cmd_segment = app.add_subcommand("segment", "run one segmentation method");
  auto* cmd_mesh = app.add_subcommand("mesh", "triangulate a boundary field");
  auto* cmd_evaluate = app.add_subcommand("evaluate", "voxelize results and report DSC");
  auto* cmd_pipeline = app.add_subcommand("pipeline", "run every stage with both methods");
  add_common(cmd_phantom, opts, false);
  add_common(cmd_track, opts, false);
  add_common(cmd_segment, opts, true);
  add_common(cmd_mesh, opts, true);
  add_common(cmd_evaluate, opts, false);
  add_common(cmd_pipeline, opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    const fiberseg::PipelineConfig cfg = resolve_config(opts);
    if (cmd_phantom->parsed()) {
      fiberseg::stage_phantom(cfg);
    } else if (cmd_track->parsed()) {
      fiberseg::stage_track(cfg);
    } else if (cmd_segment->parsed()) {
      fiberseg::stage_segment(cfg, opts.method);
    } else if (cmd_mesh->parsed()) {
      fiberseg::stage_mesh(cfg, opts.method);
    } else if (cmd_evaluate->parsed()) {
      fiberseg::stage_evaluate(cfg);
    } else if (cmd_pipeline->parsed()) {
      fiberseg::run_pipeline(cfg);
    }
  } catch (const fiberseg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fiberseg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
