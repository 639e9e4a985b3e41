#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "kinred/ansatz.hpp"
#include "kinred/kinetic.hpp"
#include "kinred/quadrature.hpp"

namespace kinred {

enum class InitialPreset { Maxwellian, SineDensity, TwoMaxwellianMix };

const char* to_string(InitialPreset preset);

/**
 * Named initial data on the periodic mesh, all nondimensional.
 *
 * maxwellian:          M(rho, u, theta) in every cell.
 * sine-density:        density rho * (1 + amplitude sin(2 pi mode x / length)),
 *                      velocity profile G(u, theta) * (1 + shape w^2) normalized;
 *                      shape = 0 is a Maxwellian, shape > 0 flattens the top.
 * two-maxwellian-mix:  (1 - m(x)) M(rho, u, theta) + m(x) M(rho2, u2, theta2),
 *                      m(x) = (1 + amplitude sin(2 pi mode x / length)) / 2.
 */
struct InitialCondition {
  InitialPreset preset = InitialPreset::Maxwellian;
  double rho = 1.0;
  double u = 0.0;
  double theta = 1.0;
  double amplitude = 0.0;
  int mode = 1;
  double shape = 0.0;
  double rho2 = 1.0;
  double u2 = 0.0;
  double theta2 = 1.0;

  /// Velocity profile of one cell centred at x.
  Profile profile_at(double x, double length, const QuadratureRule& grid) const;
  /// Largest |u| and theta over the mesh, for sizing the velocity box.
  double max_speed() const;
  double max_theta() const;
};

struct AuditConfig {
  int samples = 100;
  /// Claimed GUSC constant; unset means min(Pr, 1) / tau.
  std::optional<double> lambda_claim;
  int hermite_degree = 6;
  int dimension = 1;
  double theta_max = 1.0;
};

struct ScenarioConfig {
  Manifold manifold = Manifold::conservative_moment(2);
  CollisionModel collision = CollisionModel::bgk(1.0);
  /// Velocity half-width; unset means default_truncation of the initial data.
  std::optional<double> velocity_half_width;
  int velocity_cells = 64;
  PeriodicMesh mesh{100, 1.0};
  InitialCondition initial;
  double final_time = 0.1;
  double cfl = 0.45;
  /// Number of equally spaced output times after t = 0.
  int outputs = 10;
  double norm_p = 2.0;
  std::uint64_t seed = 1;
  AuditConfig audit;

  double half_width() const;
  std::shared_ptr<const QuadratureRule> make_grid() const;
  DistributionField initial_field() const;
  /// Output times 0, T/outputs, ..., T.
  std::vector<double> output_times() const;
  /// Throws ConfigurationError naming the offending field.
  void validate() const;
};

/// Strict parser: unknown keys and out-of-range values throw
/// ConfigurationError with the JSON path of the field.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

/// Canonical JSON with every field explicit (the velocity half-width
/// resolved); parse_scenario of the result gives back the same config.
std::string scenario_to_json(const ScenarioConfig& cfg);

}  // namespace kinred
