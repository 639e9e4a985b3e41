#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "kinred/ansatz.hpp"
#include "kinred/kinetic.hpp"

namespace kinred {

/// Coefficients of A0 dω/dt + A1 dω/dx = Q at one parameter point.
struct ReducedCoefficients {
  Eigen::MatrixXd a0;
  Eigen::MatrixXd a1;
  Eigen::VectorXd q;
};

/// A quadrature-assembled matrix together with its max-norm asymmetry
/// before the (M + M^T)/2 symmetrization.
struct AssembledMatrix {
  Eigen::MatrixXd matrix;
  double asymmetry = 0.0;
};

/// Cholesky factor of an SPD matrix; throws DegenerateChartError when the
/// factorization fails or a pivot of the unit-diagonal scaled matrix falls
/// below 1e-13.
Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& a, const char* what);

/// int b_k b_l w dxi over the columns of `basis`.
AssembledMatrix assemble_gram(const Eigen::MatrixXd& basis, const Profile& weight,
                              const QuadratureRule& grid);
/// int xi b_k b_l w dxi.
AssembledMatrix assemble_flux(const Eigen::MatrixXd& basis, const Profile& weight,
                              const QuadratureRule& grid);

/// A0 in the chart basis; throws DegenerateChartError if not SPD.
Eigen::MatrixXd gram_matrix(const AnsatzPoint& p, const QuadratureRule& grid);
Eigen::MatrixXd flux_matrix(const AnsatzPoint& p, const QuadratureRule& grid);
Eigen::VectorXd reduced_source(const AnsatzPoint& p, const CollisionModel& model,
                               const QuadratureRule& grid);
ReducedCoefficients reduced_coefficients(const AnsatzPoint& p, const CollisionModel& model,
                                         const QuadratureRule& grid);

struct ProjectionOptions {
  /// Diagnostic mode: adds 1e-12 * tr(A0)/n to the diagonal before solving
  /// and flags the result.
  bool regularize = false;
};

struct TangentProjection {
  Eigen::VectorXd coefficients;
  Profile projected;
  bool regularized = false;
};

/// Metric-orthogonal projection of h onto span{b_k}; coefficients refer to
/// the chart basis.
TangentProjection tangent_projection(const AnsatzPoint& p, const Profile& h,
                                     const QuadratureRule& grid, ProjectionOptions opts = {});

/// Same projection expressed in `natural_frame(p)`, which stays regular
/// where the ConservativeMoment chart degenerates (alpha_N = 0).
TangentProjection natural_projection(const AnsatzPoint& p, const Profile& h,
                                     const QuadratureRule& grid);

/// (I - P)(xi * sum_k b_k dω_k/dx - Q[f_hat]) in the chart basis.
Profile residual(const AnsatzPoint& p, const Eigen::VectorXd& domega_dx,
                 const CollisionModel& model, const QuadratureRule& grid);

/// (I - P)(xi * df_hat/dx - Q[f_hat]) with the spatial derivative of f_hat
/// supplied directly and P taken in the natural frame.
Profile residual_from_gradient(const AnsatzPoint& p, const Profile& df_dx,
                               const CollisionModel& model, const QuadratureRule& grid);

}  // namespace kinred
