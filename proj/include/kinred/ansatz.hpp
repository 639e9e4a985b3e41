#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kinred/kinetic.hpp"
#include "kinred/quadrature.hpp"

namespace kinred {

enum class ManifoldKind { ConservativeMoment, HermitePerturbation, EntropyClosure };

/**
 * Ansatz family and its size parameter.
 *
 * ConservativeMoment(N): exp(-(xi-u)^2 / 2 theta) * sum_{k<=N} alpha_k xi^k,
 *   parameters ordered (alpha_0..alpha_N, u, theta), dimension N+3.
 * HermitePerturbation(N): rho/sqrt(theta) * phi(w) * (1 + sum_{3<=k<=N}
 *   alpha_k He_k(w)), w = (xi-u)/sqrt(theta), parameters (rho, u, theta,
 *   alpha_3..alpha_N). The constrained coefficients alpha_0 = 1,
 *   alpha_1 = alpha_2 = 0 are substituted out.
 * EntropyClosure(n): exp(sum_{p=1}^{n} alpha_p xi^(p-1)), parameters
 *   (alpha_1..alpha_n), 1 <= n <= 7.
 */
struct Manifold {
  ManifoldKind kind = ManifoldKind::ConservativeMoment;
  int order = 0;

  static Manifold conservative_moment(int n) { return {ManifoldKind::ConservativeMoment, n}; }
  static Manifold hermite_perturbation(int n) { return {ManifoldKind::HermitePerturbation, n}; }
  static Manifold entropy_closure(int n) { return {ManifoldKind::EntropyClosure, n}; }

  int dimension() const;
  std::string name() const;
  void validate() const;
  bool operator==(const Manifold&) const = default;
};

std::optional<ManifoldKind> manifold_kind_from_string(const std::string& name);
const char* to_string(ManifoldKind kind);

struct AnsatzPoint {
  Manifold manifold;
  Eigen::VectorXd omega;

  static AnsatzPoint conservative(double u, double theta, const Eigen::VectorXd& alpha);
  static AnsatzPoint hermite(double rho, double u, double theta, const Eigen::VectorXd& free_alpha);
  static AnsatzPoint entropy_closure(const Eigen::VectorXd& alpha);

  /// Local Gaussian centre and width where the family has one.
  double u() const;
  double theta() const;
  /// Index of u and theta inside omega (-1 for EntropyClosure).
  int u_index() const;
  int theta_index() const;

  /// Structural checks (dimension, theta > 0, rho > 0); realizability on a
  /// grid is checked by `evaluate`.
  void validate() const;
};

/// f_hat(xi; omega) on the grid. Throws RealizabilityError on negative
/// values for the polynomial families, or on overflow.
Profile evaluate(const AnsatzPoint& p, const QuadratureRule& grid);

/// Columns d f_hat / d omega_k, analytic.
Eigen::MatrixXd tangent_basis(const AnsatzPoint& p, const QuadratureRule& grid);

/// Metric g(h1, h2) = int h1 h2 weight dxi at the point.
struct MetricWeight {
  Profile weight;
};

/// Throws RealizabilityError when the weight would exceed 1e300 on any node.
MetricWeight metric_weight(const AnsatzPoint& p, const QuadratureRule& grid);

/// Columns spanning the tangent space that stay well conditioned where the
/// chart degenerates. For ConservativeMoment(N) these are
/// exp(-(xi-u)^2/2theta) He_k((xi-u)/sqrt(theta)), k = 0..N+2; for the other
/// families they coincide with `tangent_basis`.
Eigen::MatrixXd natural_frame(const AnsatzPoint& p, const QuadratureRule& grid);

/// Raw moments int xi^k f_hat dxi, k = 0..count-1.
Eigen::VectorXd moments_of(const AnsatzPoint& p, const QuadratureRule& grid, int count);
/// Raw moments of an arbitrary profile.
Eigen::VectorXd raw_moments(const Profile& f, const QuadratureRule& grid, int count);

/// Inverts the moment map of ConservativeMoment(N): returns omega with
/// int xi^k f_hat = c_k for k = 0..N+2. An optional starting point (usually
/// the previous state of the same cell) seeds the search.
AnsatzPoint params_from_moments(int order, const Eigen::VectorXd& c, const QuadratureRule& grid,
                                const std::optional<AnsatzPoint>& guess = std::nullopt);

/// Projects a profile onto the manifold: moment matching for
/// ConservativeMoment, metric-orthogonality Newton otherwise.
AnsatzPoint project_profile(const Manifold& manifold, const Profile& f0, const QuadratureRule& grid,
                            const std::optional<AnsatzPoint>& guess = std::nullopt);

std::vector<AnsatzPoint> project_initial(const Manifold& manifold, const DistributionField& f0);

/// Ranges for `sample_valid_point`.
struct SamplingBox {
  double u_max = 0.5;
  double theta_min = 0.5;
  double theta_max = 1.0;
  double rho_min = 0.5;
  double rho_max = 2.0;
};

/// Random point that is realizable on `grid` and whose chart is regular
/// (leading ConservativeMoment coefficient bounded away from zero).
AnsatzPoint sample_valid_point(const Manifold& manifold, std::mt19937_64& rng,
                               const QuadratureRule& grid, const SamplingBox& box = {});

}  // namespace kinred
