// decaylab command line: run campaigns from config files or presets.

#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>

#include "CLI11.hpp"

#include "decaylab/presets.hpp"

namespace {

using namespace decaylab;

enum Exit : int { ok = 0, violation = 1, config_error = 2, numerical_error = 3 };

struct Overrides {
  std::string out_dir;
  std::size_t node_cap = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t jobs = 1;
  std::string cache_dir;
  bool quiet = false;
};

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::invalid_argument:
    case ErrorKind::config:
      return config_error;
    case ErrorKind::domain:
    case ErrorKind::numerical:
    case ErrorKind::io:
      return numerical_error;
  }
  return numerical_error;
}

void apply(Campaign& c, const Overrides& o) {
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (o.node_cap) c.node_cap = o.node_cap;
  if (o.seed_set) {
    c.seed = o.seed;
    c.solver.options.seed = o.seed;
  }
  if (!o.cache_dir.empty()) c.cache_dir = o.cache_dir;
}

int execute(Campaign c, const Overrides& o) {
  apply(c, o);
  std::mutex mu;
  RunOptions ro;
  ro.jobs = o.jobs;
  if (!o.quiet)
    ro.log = [&mu](const std::string& s) {
      std::lock_guard<std::mutex> lock(mu);
      std::cerr << s << '\n';
    };
  const CampaignResult r = run_campaign(c, ro);
  const auto files = write_outputs(r, c.out_dir, c.formats);
  if (c.formats.count("text")) std::cout << summary_text(r);
  std::cerr << "wrote";
  for (const auto& f : files) std::cerr << ' ' << (std::filesystem::path(c.out_dir) / f).string();
  std::cerr << '\n';
  return r.pass() ? ok : violation;
}

void add_run_flags(CLI::App* app, Overrides& o) {
  app->add_option("--out-dir", o.out_dir, "Output directory (overrides the config)");
  app->add_option("--node-cap", o.node_cap, "Interior node cap for every domain")->check(CLI::PositiveNumber);
  app->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t s) { o.seed = s, o.seed_set = true; }, "Seed for random test vectors");
  app->add_option("--jobs", o.jobs, "Checks run in parallel per domain")->check(CLI::PositiveNumber);
  app->add_option("--cache-dir", o.cache_dir, "Eigensystem cache directory");
  app->add_flag("-q,--quiet", o.quiet, "No progress lines on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decaylab: numerical checks of boundary decay estimates for elliptic operators"};
  app.require_subcommand(1);
  Overrides o;

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a campaign from a JSON config file");
  run->add_option("config", config_path, "Config file")->required();
  add_run_flags(run, o);

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Run a built-in campaign");
  preset->add_option("name", preset_name, "Preset name (see list-presets)")->required();
  add_run_flags(preset, o);

  auto* list = app.add_subcommand("list-presets", "List built-in campaigns");

  std::string show_name;
  auto* show = app.add_subcommand("show-preset", "Print a preset's config");
  show->add_option("name", show_name, "Preset name")->required();

  auto* cache = app.add_subcommand("cache", "Manage the eigensystem cache");
  cache->require_subcommand(1);
  std::string cache_target;
  std::string cache_dir = ".decaylab-cache";
  auto* cache_build = cache->add_subcommand("build", "Compute and store the eigensystems a campaign needs");
  cache_build->add_option("target", cache_target, "Config file or preset name")->required();
  cache_build->add_option("--cache-dir", cache_dir, "Cache directory");
  cache_build->add_option("--node-cap", o.node_cap, "Interior node cap")->check(CLI::PositiveNumber);
  auto* cache_clear = cache->add_subcommand("clear", "Delete cached eigensystems");
  cache_clear->add_option("--cache-dir", cache_dir, "Cache directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : config_error;
  }

  try {
    if (*list) {
      for (const auto& p : presets()) std::cout << p.name << "  " << p.summary << '\n';
      return ok;
    }
    if (*show) {
      std::cout << find_preset(show_name).config << '\n';
      return ok;
    }
    if (*run) return execute(load_campaign(config_path), o);
    if (*preset) return execute(preset_campaign(preset_name), o);
    if (*cache_clear) {
      std::size_t removed = 0;
      if (std::filesystem::exists(cache_dir))
        for (const auto& entry : std::filesystem::directory_iterator(cache_dir))
          if (entry.path().extension() == ".eig") removed += std::filesystem::remove(entry.path());
      std::cout << "removed " << removed << " cached eigensystem(s) from " << cache_dir << '\n';
      return ok;
    }
    if (*cache_build) {
      Campaign c = std::filesystem::exists(cache_target) ? load_campaign(cache_target) : preset_campaign(cache_target);
      if (o.node_cap) c.node_cap = o.node_cap;
      for (auto spec : c.domains) {
        spec.node_cap = c.node_cap;
        auto dom = std::make_shared<const GridDomain>(build_domain(spec));
        const auto op = assemble(dom, detail::make_recipe(c.op));
        cached_eigensolve(op, c.solver.eigenpairs, c.solver.options, cache_dir);
        std::cout << "cached " << dom->name << " (" << op.describe() << ")\n";
      }
      return ok;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return numerical_error;
  }
  return ok;
}
