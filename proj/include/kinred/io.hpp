#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kinred/error_estimator.hpp"
#include "kinred/reduced_solver.hpp"
#include "kinred/reference_solver.hpp"
#include "kinred/scenario.hpp"

namespace kinred {

/// 17 significant digits, so text round-trips to the same double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(const std::string& content);

/// Hash of the canonical config JSON.
std::string config_hash(const ScenarioConfig& cfg);

/// Snapshot block: 8-byte magic "KRSNAP01", then uint64 ntimes, cells,
/// nodes and float64 L, dx, then ntimes * cells * nodes float64 values
/// in row-major order. Everything little-endian.
inline constexpr std::size_t kSnapshotHeaderBytes = 48;

struct SnapshotBlock {
  std::uint64_t ntimes = 0;
  std::uint64_t cells = 0;
  std::uint64_t nodes = 0;
  double half_width = 0.0;
  double dx = 0.0;
  std::vector<FieldMatrix> snapshots;
};

std::string encode_snapshots(const KineticTrajectory& traj);
SnapshotBlock decode_snapshots(const std::string& bytes);

/// Lines "# config_hash <hash>", header, then rows.
std::string trajectory_csv(const std::vector<double>& times,
                           const std::vector<Eigen::VectorXd>& totals,
                           const std::vector<double>& entropy, const std::string& hash);

/// One row per (time, cell): time_index, time, cell, omega_0..omega_{n-1}.
std::string omega_csv(const ReducedTrajectory& traj, const std::string& hash);

struct OmegaTable {
  std::vector<double> times;
  std::vector<std::vector<AnsatzPoint>> omega;
};
OmegaTable parse_omega_csv(const std::string& text, const Manifold& manifold, int cells);

std::string error_csv(const ErrorReport& report, const std::string& hash);
std::string error_summary_json(const ErrorReport& report, const std::string& hash);

/// Runs the stability suite described by the config and returns its JSON
/// report; `all_pass` receives the conjunction of every verdict.
std::string audit_json(const ScenarioConfig& cfg, bool* all_pass = nullptr);

struct ManifestFile {
  std::string name;
  std::string content;
};

/// Run manifest: config echo, config hash, hashes of every output file,
/// then the run timings (the only entry that varies between runs).
std::string manifest_json(const std::string& command, const ScenarioConfig& cfg,
                          const std::vector<ManifestFile>& files, double seconds,
                          const std::vector<std::pair<std::string, double>>& counters = {});

/// Config echo of a manifest written by `manifest_json`.
ScenarioConfig manifest_config(const std::string& manifest_text, const std::string& what);

}  // namespace kinred
