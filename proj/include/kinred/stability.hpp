#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "kinred/ansatz.hpp"
#include "kinred/kinetic.hpp"

namespace kinred {

/**
 * Truncated Hermite space at a Maxwellian in d velocity dimensions.
 *
 * Every element is f~ * p(w) with w = (xi - u)/sqrt(theta), f~ the Maxwellian
 * M(rho, u e_1, theta). Elements are stored by their polynomial factor
 * sampled on a tensor Gauss-Hermite rule, so the metric
 * g(h1, h2) = scale * int h1 h2 / f~ dxi becomes scale * rho * E[p1 p2]
 * under the standard normal law.
 */
struct HermiteSpace {
  int dimension = 1;
  int max_degree = 0;
  double rho = 1.0;
  double u = 0.0;
  double theta = 1.0;
  double metric_scale = 1.0;
  std::vector<std::array<int, 3>> indices;  ///< multi-indices with |k| <= K
  Eigen::MatrixXd nodes;                    ///< quadrature nodes in w, one row per node
  Eigen::VectorXd weights;                  ///< normal-law weights, sum 1
  Eigen::MatrixXd basis;                    ///< polynomial factor of each basis element at the nodes
  double orthonormality_defect = 0.0;

  int size() const { return static_cast<int>(indices.size()); }
  /// Coordinates of f~ * poly in the orthonormal basis. `poly` receives xi - u.
  Eigen::VectorXd coordinates(const std::function<double(const double*)>& poly) const;
};

/// Builds the space and checks orthonormality; a defect above 1e-8 (for
/// instance from too few quadrature nodes) throws ConfigurationError.
/// quadrature_order = 0 selects K + 2 nodes per axis.
HermiteSpace make_hermite_space(int dimension, int max_degree, const MomentState& m,
                                int quadrature_order = 0, double metric_scale = 1.0);

/// Orthonormal bases (columns, in space coordinates) of W0, W1, W2.
struct EquilibriumSubspaces {
  Eigen::MatrixXd w0;
  Eigen::MatrixXd w1;
  Eigen::MatrixXd w2;
  /// max |<a, b>| between W0 and W1 / W2 columns.
  double w1_w0_overlap = 0.0;
  double w2_w0_overlap = 0.0;

  static Eigen::MatrixXd projector(const Eigen::MatrixXd& q) { return q * q.transpose(); }
};

EquilibriumSubspaces equilibrium_subspaces(const HermiteSpace& space);

/// Modified Gram-Schmidt with one re-orthogonalization pass. Columns whose
/// remaining norm drops below tol times their original norm are dropped.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& vectors, double tol = 1e-12);

/// Matrix of the linearized collision operator in the orthonormal basis.
Eigen::MatrixXd linearized_collision_matrix(const CollisionModel& model, const HermiteSpace& space,
                                            const EquilibriumSubspaces& subspaces);
Eigen::MatrixXd linearized_collision_matrix(const CollisionModel& model, const HermiteSpace& space);

struct GuscReport {
  double worst_quotient = 0.0;
  double lambda_claim = 0.0;
  bool pass = false;
  /// Weak variant: worst_quotient <= 1e-10.
  bool gwsc_pass = false;
  /// max(|D P0|, |P0 D|) entrywise.
  double kernel_defect = 0.0;
};

GuscReport gusc_check(const Eigen::MatrixXd& d, const Eigen::MatrixXd& w0_projector,
                      double lambda_claim);

/// Default claimed constant min(Pr, 1) / tau (Pr = 1 for BGK).
double default_lambda_claim(const CollisionModel& model);

struct YongReport {
  double block_defect = 0.0;
  bool block_pass = false;
  double symmetrizer_defect = 0.0;
  double symmetrizer_relative = 0.0;
  bool symmetric_pass = false;
  /// Smallest generalized eigenvalue of -(A0 Qu + Qu^T A0)/2 against A0 on
  /// the A0-orthogonal complement of the equilibrium basis.
  double dissipation = 0.0;
  bool dissipative_pass = false;
  /// Largest eigenvalue of (A0 Qu + Qu^T A0)/2; the weak condition is <= 0.
  double weak_max = 0.0;
  bool weak_pass = false;
};

/// `jacobian` is the flux Jacobian A0^{-1} A1 of the quasi-linear system.
YongReport yong_conditions_check(const Eigen::MatrixXd& a0, const Eigen::MatrixXd& jacobian,
                                 const Eigen::MatrixXd& qu, const Eigen::MatrixXd& equilibrium_basis);

/// Linearization of a reduced system at a Maxwellian, in frame coordinates.
struct EquilibriumSystem {
  Eigen::MatrixXd a0;
  Eigen::MatrixXd a1;
  Eigen::MatrixXd jacobian;
  Eigen::MatrixXd qu;
  Eigen::MatrixXd equilibrium_basis;
};

/// Point of the manifold that represents M(rho, u, theta).
AnsatzPoint equilibrium_point(const Manifold& manifold, const MomentState& m);

/// Uses `natural_frame` (regular at equilibrium for every family). The
/// source Jacobian comes from central differences of the projected source.
EquilibriumSystem equilibrium_system(const Manifold& manifold, const MomentState& m,
                                     const CollisionModel& model, const QuadratureRule& grid);

struct SpeedAudit {
  int samples = 0;
  double max_radius = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

/// Checks spectral_radius <= bound + 1e-9 over random valid points.
SpeedAudit propagation_speed_audit(const Manifold& manifold, int samples, double bound,
                                   const QuadratureRule& grid, std::uint64_t seed,
                                   const SamplingBox& box = {});

struct HyperbolicityAudit {
  int samples = 0;
  int cholesky_failures = 0;
  /// max |A1 - A1^T|_inf / |A1|_inf before symmetrization.
  double max_asymmetry = 0.0;
  bool pass = false;
};

HyperbolicityAudit hyperbolicity_audit(const Manifold& manifold, int samples,
                                       const QuadratureRule& grid, std::uint64_t seed,
                                       const SamplingBox& box = {});

}  // namespace kinred
