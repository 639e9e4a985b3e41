#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "kinred/ansatz.hpp"
#include "kinred/kinetic.hpp"
#include "kinred/scenario.hpp"

namespace kinred {

/// Eigenvalues of the pencil A1 x = lambda A0 x at p, ascending. For
/// ConservativeMoment the pencil is assembled in `natural_frame`, which gives
/// the same eigenvalues where the chart is regular and stays defined where it
/// is not.
Eigen::VectorXd pencil_eigenvalues(const AnsatzPoint& p, const QuadratureRule& grid);
double spectral_radius(const AnsatzPoint& p, const QuadratureRule& grid);

/**
 * Reduced solution on a periodic mesh. For ConservativeMoment the raw
 * moments c_0..c_{N+2} per cell are the evolved variables and `omega` is
 * recovered from them; otherwise `omega` is evolved directly.
 */
struct ReducedState {
  std::shared_ptr<const QuadratureRule> grid;
  PeriodicMesh mesh;
  Manifold manifold;
  std::vector<AnsatzPoint> omega;
  Eigen::MatrixXd moments;  ///< cells x (N+3); empty for other manifolds
  double time = 0.0;
  /// Per-cell spectral radii of this state, filled on first use.
  mutable std::vector<double> radius_cache;

  bool conservative() const { return manifold.kind == ManifoldKind::ConservativeMoment; }
  /// f_hat of every cell.
  DistributionField evaluate_field() const;
  /// Integrals over x of the raw moments 0..count-1 of f_hat.
  Eigen::VectorXd moment_totals(int count = 3) const;
  double entropy() const;
  const std::vector<double>& radii() const;
};

/// Projects the initial kinetic field onto the manifold cell by cell.
ReducedState make_reduced_state(const Manifold& manifold, const DistributionField& f0);

struct StepInfo {
  double dt = 0.0;
  double max_radius = 0.0;
};

/// Largest stable step: min(cfl dx / max radius, cfl / (4 * collision rate)).
double stable_dt(const ReducedState& state, const CollisionModel& model, double cfl,
                 double* max_radius = nullptr);

/// One SSP-RK2 step of size dt (conservative LLF for ConservativeMoment,
/// quasi-linear Rusanov otherwise).
ReducedState step(const ReducedState& state, const CollisionModel& model, double dt);
/// One step with dt from `stable_dt`.
ReducedState step(const ReducedState& state, const CollisionModel& model, double cfl,
                  StepInfo* info);

struct ReducedTrajectory {
  Manifold manifold;
  PeriodicMesh mesh;
  std::shared_ptr<const QuadratureRule> grid;
  std::vector<double> times;
  std::vector<std::vector<AnsatzPoint>> omega;
  std::vector<Eigen::VectorXd> totals;  ///< mass, momentum, energy per time
  std::vector<double> entropy;
  int steps = 0;
  double max_radius = 0.0;
};

struct RunOptions {
  /// Record after every step instead of only at output times.
  bool every_step = false;
};

ReducedTrajectory run_reduced(const ScenarioConfig& scenario, const RunOptions& opts = {});
/// Integrates an explicit state to `final_time`, recording at `times`.
ReducedTrajectory run_reduced(ReducedState state, const CollisionModel& model, double cfl,
                              const std::vector<double>& times, const RunOptions& opts = {});

}  // namespace kinred
