// Batch front end: reduce, reference, audit, estimate.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kinred/error_estimator.hpp"
#include "kinred/errors.hpp"
#include "kinred/io.hpp"
#include "kinred/parallel.hpp"
#include "kinred/reduced_solver.hpp"
#include "kinred/reference_solver.hpp"
#include "kinred/scenario.hpp"

namespace fs = std::filesystem;
using namespace kinred;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::string out = ".";
  int threads = 0;
  std::string reduced_dir;
  std::string reference_dir;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

void emit(const std::string& dir, const std::vector<ManifestFile>& files) {
  for (const auto& f : files) write_file((fs::path(dir) / f.name).string(), f.content);
}

int cmd_reduce(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig cfg = load_scenario(o.config);
  prepare_out(o.out);
  const ReducedTrajectory traj = run_reduced(cfg);
  const std::string hash = config_hash(cfg);
  std::vector<ManifestFile> files = {
      {"trajectory.csv", trajectory_csv(traj.times, traj.totals, traj.entropy, hash)},
      {"omega.csv", omega_csv(traj, hash)},
  };
  emit(o.out, files);
  write_file((fs::path(o.out) / "manifest.json").string(),
             manifest_json("reduce", cfg, files, seconds_since(t0),
                           {{"steps", traj.steps}, {"max_radius", traj.max_radius}}));
  return 0;
}

int cmd_reference(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig cfg = load_scenario(o.config);
  prepare_out(o.out);
  const KineticTrajectory traj = run_reference(cfg);
  const std::string hash = config_hash(cfg);
  std::vector<ManifestFile> files = {
      {"trajectory.csv", trajectory_csv(traj.times, traj.totals, traj.entropy, hash)},
      {"snapshots.bin", encode_snapshots(traj)},
  };
  emit(o.out, files);
  write_file((fs::path(o.out) / "manifest.json").string(),
             manifest_json("reference", cfg, files, seconds_since(t0), {{"steps", traj.steps}}));
  return 0;
}

int cmd_audit(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig cfg = load_scenario(o.config);
  prepare_out(o.out);
  bool pass = false;
  std::vector<ManifestFile> files = {{"audit.json", audit_json(cfg, &pass)}};
  emit(o.out, files);
  write_file((fs::path(o.out) / "manifest.json").string(),
             manifest_json("audit", cfg, files, seconds_since(t0)));
  std::cerr << "audit: " << (pass ? "all checks pass" : "some checks fail, see audit.json") << "\n";
  return 0;
}

void require_match(bool ok, const std::string& what) {
  if (!ok) throw ConfigurationError("reduced and reference runs differ in " + what);
}

int cmd_estimate(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string red_manifest = read_file((fs::path(o.reduced_dir) / "manifest.json").string());
  const std::string ref_manifest = read_file((fs::path(o.reference_dir) / "manifest.json").string());
  const ScenarioConfig red = manifest_config(red_manifest, "reduced run");
  const ScenarioConfig ref = manifest_config(ref_manifest, "reference run");
  if (!o.config.empty()) {
    const ScenarioConfig given = load_scenario(o.config);
    if (config_hash(given) != config_hash(red)) {
      throw ConfigurationError("--config does not match the reduced run's config");
    }
  }
  require_match(red.mesh.cells == ref.mesh.cells && red.mesh.length == ref.mesh.length, "mesh");
  require_match(red.velocity_cells == ref.velocity_cells && red.half_width() == ref.half_width(),
                "velocity grid");
  require_match(red.output_times() == ref.output_times(), "output times");
  require_match(scenario_to_json(ScenarioConfig{.initial = red.initial}) ==
                    scenario_to_json(ScenarioConfig{.initial = ref.initial}),
                "initial condition");
  require_match(red.collision.kind == ref.collision.kind && red.collision.tau == ref.collision.tau &&
                    red.collision.prandtl == ref.collision.prandtl,
                "collision model");
  prepare_out(o.out);

  ReducedTrajectory rt;
  rt.manifold = red.manifold;
  rt.mesh = red.mesh;
  rt.grid = red.make_grid();
  OmegaTable table = parse_omega_csv(read_file((fs::path(o.reduced_dir) / "omega.csv").string()),
                                     red.manifold, red.mesh.cells);
  rt.times = table.times;
  rt.omega = std::move(table.omega);

  const SnapshotBlock block =
      decode_snapshots(read_file((fs::path(o.reference_dir) / "snapshots.bin").string()));
  KineticTrajectory kt;
  kt.mesh = ref.mesh;
  kt.grid = ref.make_grid();
  kt.times = ref.output_times();
  require_match(block.ntimes == kt.times.size() && block.cells == static_cast<std::uint64_t>(kt.mesh.cells) &&
                    block.nodes == kt.grid->size() && block.half_width == kt.grid->half_width(),
                "snapshot header");
  kt.snapshots = block.snapshots;
  require_match(rt.times.size() == kt.times.size(), "recorded times");
  for (std::size_t t = 0; t < rt.times.size(); ++t) {
    require_match(std::abs(rt.times[t] - kt.times[t]) <= 1e-12, "recorded times");
  }

  const ErrorReport report = estimate_error(rt, kt, red.collision, red.norm_p, red.seed);
  const std::string hash = config_hash(red);
  std::vector<ManifestFile> files = {
      {"error.csv", error_csv(report, hash)},
      {"error.json", error_summary_json(report, hash)},
  };
  emit(o.out, files);
  write_file((fs::path(o.out) / "manifest.json").string(),
             manifest_json("estimate", red, files, seconds_since(t0),
                           {{"lipschitz", report.lipschitz}}));
  if (report.violated()) std::cerr << "estimate: measured error exceeds the bound\n";
  return 0;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Configuration:
    case ErrorKind::Io:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinred: reduced models of 1D kinetic equations"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "scenario JSON");
    if (config_required) c->required();
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads, 0 = auto")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  };
  auto* reduce = app.add_subcommand("reduce", "run the reduced model");
  add_common(reduce, true);
  auto* reference = app.add_subcommand("reference", "run the discrete-velocity reference");
  add_common(reference, true);
  auto* audit = app.add_subcommand("audit", "stability and hyperbolicity audit");
  add_common(audit, true);
  auto* estimate = app.add_subcommand("estimate", "a posteriori error bound vs measured error");
  add_common(estimate, false);
  estimate->add_option("--reduced", o.reduced_dir, "output directory of a reduce run")->required();
  estimate->add_option("--reference", o.reference_dir, "output directory of a reference run")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    set_thread_count(o.threads);
    if (*reduce) return cmd_reduce(o);
    if (*reference) return cmd_reference(o);
    if (*audit) return cmd_audit(o);
    return cmd_estimate(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
