#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "kinred/ansatz.hpp"
#include "kinred/kinetic.hpp"
#include "kinred/reduced_solver.hpp"
#include "kinred/reference_solver.hpp"

namespace kinred {

/// (sum over cells of dx * int |v|^p dxi)^(1/p); rows of `values` are cells.
double field_norm(const FieldMatrix& values, const QuadratureRule& grid, double dx, double p);

/// Residual R = (I - P)(xi df_hat/dx - Q[f_hat]) per cell, with df_hat/dx
/// from periodic central differences of the evaluated field.
FieldMatrix residual_field(const std::vector<AnsatzPoint>& omega, const PeriodicMesh& mesh,
                           const QuadratureRule& grid, const CollisionModel& model);

double residual_norm(const std::vector<AnsatzPoint>& omega, const PeriodicMesh& mesh,
                     const QuadratureRule& grid, const CollisionModel& model, double p);

/// int |f1-f2|^(p-1) |Q[f1]-Q[f2]| / int |f1-f2|^p.
double lipschitz_quotient(const CollisionModel& model, const Profile& f1, const Profile& f2,
                          const QuadratureRule& grid, double p);

/**
 * Empirical L_Q: for each sample f, pairs (f + eps h, f) with h = f times a
 * random polynomial in w of degree <= 4 scaled to relative size
 * `perturbation_scale`. Returns 1.5 times the largest quotient.
 */
double lipschitz_estimate(const CollisionModel& model, const std::vector<Profile>& samples,
                          const QuadratureRule& grid, double perturbation_scale, double p,
                          std::uint64_t seed, int pairs_per_sample = 4);

/// delta0 + trapezoid of exp(L (t_i - s)) R(s) over [0, t_i], per time.
std::vector<double> gronwall_bound(double delta0, const std::vector<double>& times,
                                   const std::vector<double>& residuals, double lipschitz);

/// ||f_hat - f||_p at each recorded time; trajectories must share grid,
/// mesh and output times.
std::vector<double> actual_error(const ReducedTrajectory& reduced, const KineticTrajectory& reference,
                                 double p);

struct ErrorReport {
  std::vector<double> times;
  std::vector<double> residual_norms;
  double lipschitz = 0.0;
  std::vector<double> bound;
  std::vector<double> actual;
  double p = 2.0;

  /// bound / actual, +inf where actual is zero.
  std::vector<double> ratio() const;
  bool violated() const;
};

ErrorReport estimate_error(const ReducedTrajectory& reduced, const KineticTrajectory& reference,
                           const CollisionModel& model, double p, std::uint64_t seed,
                           double perturbation_scale = 0.1);

}  // namespace kinred
