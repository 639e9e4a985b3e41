#pragma once

#include <vector>

#include <Eigen/Core>

#include "kinred/kinetic.hpp"
#include "kinred/reduced_solver.hpp"
#include "kinred/scenario.hpp"

namespace kinred {

struct KineticState {
  DistributionField f;
  double time = 0.0;
};

/// Largest transport step allowed on this grid: dx / L.
double max_transport_dt(const DistributionField& f);

/// First-order upwind transport of every velocity node, periodic in x.
/// Throws ParameterError when dt exceeds dx / L.
KineticState transport_step(const KineticState& state, double dt);

/// Collision-only update per cell: exact exponential for BGK, RK2 with
/// substeps of rate * h <= 0.1 for Shakhov and ES-BGK.
KineticState relaxation_step(const KineticState& state, const CollisionModel& model, double dt);

/// Strang step: half relaxation, transport, half relaxation.
KineticState strang_step(const KineticState& state, const CollisionModel& model, double dt);

struct KineticTrajectory {
  PeriodicMesh mesh;
  std::shared_ptr<const QuadratureRule> grid;
  std::vector<double> times;
  std::vector<FieldMatrix> snapshots;
  std::vector<Eigen::VectorXd> totals;  ///< mass, momentum, energy per time
  std::vector<double> entropy;
  int steps = 0;
};

/// Integrals over x and xi of 1, xi, xi^2.
Eigen::VectorXd kinetic_totals(const DistributionField& f);

KineticTrajectory run_reference(const ScenarioConfig& scenario, const RunOptions& opts = {});
KineticTrajectory run_reference(KineticState state, const CollisionModel& model, double cfl,
                                const std::vector<double>& times, const RunOptions& opts = {});

}  // namespace kinred
