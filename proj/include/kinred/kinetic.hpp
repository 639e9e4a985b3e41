#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Core>

#include "kinred/quadrature.hpp"

namespace kinred {

using FieldMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Positivity floor applied before logarithms.
inline constexpr double kPositivityFloor = 1e-300;

/// Uniform periodic 1D mesh on [0, length).
struct PeriodicMesh {
  int cells = 0;
  double length = 1.0;

  double dx() const { return length / cells; }
  double center(int i) const { return (i + 0.5) * dx(); }
  int wrap(int i) const { return ((i % cells) + cells) % cells; }
};

/// f(x, xi) sampled per space cell (rows) and velocity node (columns).
struct DistributionField {
  std::shared_ptr<const QuadratureRule> grid;
  PeriodicMesh mesh;
  FieldMatrix values;

  DistributionField(std::shared_ptr<const QuadratureRule> grid, PeriodicMesh mesh);

  Profile cell(int i) const { return values.row(i).transpose(); }
  void set_cell(int i, const Profile& p) { values.row(i) = p.transpose(); }
  /// Clip to the positivity floor; returns the most negative value clipped.
  double clip_nonnegative();
  bool all_finite() const { return values.allFinite(); }
};

/// Macroscopic state in one velocity dimension. `pressure` is P with
/// rho*P = int (xi-u)^2 f, so P == theta for d = 1.
struct MomentState {
  double rho = 1.0;
  double u = 0.0;
  double theta = 1.0;
  double pressure = 1.0;
  double heat_flux = 0.0;

  static MomentState equilibrium(double rho, double u, double theta) {
    return {rho, u, theta, theta, 0.0};
  }
  void validate() const;
};

enum class CollisionKind { None, BGK, Shakhov, ESBGK };

struct CollisionModel {
  CollisionKind kind = CollisionKind::BGK;
  double tau = 1.0;
  double prandtl = 1.0;

  static CollisionModel none() { return {CollisionKind::None, 1.0, 1.0}; }
  static CollisionModel bgk(double tau) { return {CollisionKind::BGK, tau, 1.0}; }
  static CollisionModel shakhov(double tau, double pr) { return {CollisionKind::Shakhov, tau, pr}; }
  static CollisionModel esbgk(double tau, double pr) { return {CollisionKind::ESBGK, tau, pr}; }

  /// Throws ParameterError unless tau > 0 and Pr satisfies the model's range
  /// (ES-BGK: Pr >= (d-1)/d).
  void validate(int dimension = 1) const;
  /// Rate multiplying (target - f): 1/tau, or Pr/tau for ES-BGK.
  double rate() const;
};

const char* to_string(CollisionKind kind);
std::optional<CollisionKind> collision_kind_from_string(const std::string& name);

/// Pointwise entropy density eta(f) = f log f - f and its second derivative.
struct EntropyFunctional {
  static double eta(double f);
  static double eta_second(double f);
};

/// Columns 1, xi, xi^2 sampled on the grid.
Eigen::MatrixXd collision_invariants(const QuadratureRule& grid);

MomentState compute_moments(const Profile& f, const QuadratureRule& grid);
MomentState compute_moments(const DistributionField& f, int cell);

Profile maxwellian(const MomentState& m, const QuadratureRule& grid);
Profile maxwellian(double rho, double u, double theta, const QuadratureRule& grid);

/// Equilibrium the model relaxes toward: f_eq, Shakhov f_S or ES-BGK f_G.
Profile collision_target(const CollisionModel& model, const MomentState& m,
                         const QuadratureRule& grid);

/// Q[f] on one velocity profile.
Profile collision_apply(const CollisionModel& model, const Profile& f, const QuadratureRule& grid);
Profile collision_apply(const CollisionModel& model, const DistributionField& f, int cell);

/// int eta(f) dxi for one profile, with 0 log 0 := 0.
double entropy_density(const Profile& f, const QuadratureRule& grid);
/// Sum over cells of dx * int eta(f) dxi.
double entropy(const DistributionField& f);

/// S(f) = int log(f) Q[f] dxi.
double entropy_production(const Profile& f, const CollisionModel& model,
                          const QuadratureRule& grid);
double entropy_production(const DistributionField& f, const CollisionModel& model, int cell);

using ProfileFunctional = std::function<double(const Profile&)>;

struct FluxVerdict {
  bool passes = true;
  int trials = 0;
  double worst_ratio = 0.0;  ///< max |cross| / (1 + |diag|) over trials
  // Witness pair when the check fails.
  std::optional<Profile> witness_h1;
  std::optional<Profile> witness_h2;
  double witness_cross = 0.0;
};

/**
 * Tests whether the second derivative of `c` at `f` is diagonal, i.e. of the
 * form <A(f), h1 h2>: mixed second differences along disjoint-support bumps
 * must vanish. Tolerance 1e-6 relative to 1 + |d^2 c(f; h1, h1)|.
 */
FluxVerdict flux_existence_check(const ProfileFunctional& c, const Profile& f,
                                 const QuadratureRule& grid, int trials, std::uint64_t seed = 7);

}  // namespace kinred
