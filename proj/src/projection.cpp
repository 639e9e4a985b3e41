#include "kinred/projection.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "kinred/errors.hpp"

namespace kinred {

namespace {

AssembledMatrix symmetrized(Eigen::MatrixXd m) {
  AssembledMatrix out;
  out.asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
  out.matrix = 0.5 * (m + m.transpose());
  return out;
}

}  // namespace

Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& a, const char* what) {
  const Eigen::VectorXd d = a.diagonal();
  if ((d.array() <= 0.0).any() || !a.allFinite()) {
    throw DegenerateChartError(std::string(what) + ": Gram matrix has a nonpositive diagonal");
  }
  const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = s.asDiagonal() * a * s.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> scaled_llt(scaled);
  if (scaled_llt.info() != Eigen::Success) {
    throw DegenerateChartError(std::string(what) + ": Cholesky factorization failed");
  }
  const Eigen::VectorXd pivots = Eigen::MatrixXd(scaled_llt.matrixL()).diagonal();
  if (pivots.cwiseAbs2().minCoeff() < 1e-13) {
    throw DegenerateChartError(std::string(what) + ": tangent basis is numerically rank deficient");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw DegenerateChartError(std::string(what) + ": Cholesky factorization failed");
  }
  return llt;
}

AssembledMatrix assemble_gram(const Eigen::MatrixXd& basis, const Profile& weight,
                              const QuadratureRule& grid) {
  const Profile mw = grid.weights().cwiseProduct(weight);
  return symmetrized(basis.transpose() * (mw.asDiagonal() * basis));
}

AssembledMatrix assemble_flux(const Eigen::MatrixXd& basis, const Profile& weight,
                              const QuadratureRule& grid) {
  const Profile mw = grid.weights().cwiseProduct(weight).cwiseProduct(grid.nodes());
  return symmetrized(basis.transpose() * (mw.asDiagonal() * basis));
}

Eigen::MatrixXd gram_matrix(const AnsatzPoint& p, const QuadratureRule& grid) {
  Eigen::MatrixXd a0 =
      assemble_gram(tangent_basis(p, grid), metric_weight(p, grid).weight, grid).matrix;
  checked_cholesky(a0, "gram_matrix");
  return a0;
}

Eigen::MatrixXd flux_matrix(const AnsatzPoint& p, const QuadratureRule& grid) {
  return assemble_flux(tangent_basis(p, grid), metric_weight(p, grid).weight, grid).matrix;
}

Eigen::VectorXd reduced_source(const AnsatzPoint& p, const CollisionModel& model,
                               const QuadratureRule& grid) {
  const Profile f = evaluate(p, grid);
  const Profile q = collision_apply(model, f, grid);
  const Profile w = metric_weight(p, grid).weight;
  return tangent_basis(p, grid).transpose() * grid.weights().cwiseProduct(w).cwiseProduct(q);
}

ReducedCoefficients reduced_coefficients(const AnsatzPoint& p, const CollisionModel& model,
                                         const QuadratureRule& grid) {
  const Eigen::MatrixXd basis = tangent_basis(p, grid);
  const Profile w = metric_weight(p, grid).weight;
  ReducedCoefficients rc;
  rc.a0 = assemble_gram(basis, w, grid).matrix;
  checked_cholesky(rc.a0, "reduced_coefficients");
  rc.a1 = assemble_flux(basis, w, grid).matrix;
  const Profile q = collision_apply(model, evaluate(p, grid), grid);
  rc.q = basis.transpose() * grid.weights().cwiseProduct(w).cwiseProduct(q);
  return rc;
}

namespace {

TangentProjection project_with(const Eigen::MatrixXd& basis, const Profile& weight,
                               const Profile& h, const QuadratureRule& grid,
                               ProjectionOptions opts, const char* what) {
  if (h.size() != basis.rows()) {
    throw ParameterError(std::string(what) + ": profile length does not match the grid");
  }
  Eigen::MatrixXd a0 = assemble_gram(basis, weight, grid).matrix;
  TangentProjection out;
  if (opts.regularize) {
    const double shift = 1e-12 * a0.trace() / static_cast<double>(a0.rows());
    a0.diagonal().array() += shift;
    out.regularized = true;
  }
  const auto llt = checked_cholesky(a0, what);
  if (opts.regularize) {
    const Eigen::VectorXd rhs =
        basis.transpose() * grid.weights().cwiseProduct(weight).cwiseProduct(h);
    out.coefficients = llt.solve(rhs);
  } else {
    // Same normal equations, solved as weighted least squares: QR keeps the
    // error at cond(B) instead of cond(B)^2.
    const Eigen::VectorXd root = grid.weights().cwiseProduct(weight).cwiseSqrt();
    const Eigen::MatrixXd scaled = root.asDiagonal() * basis;
    out.coefficients = scaled.colPivHouseholderQr().solve(root.cwiseProduct(h));
  }
  out.projected = basis * out.coefficients;
  return out;
}

}  // namespace

TangentProjection tangent_projection(const AnsatzPoint& p, const Profile& h,
                                     const QuadratureRule& grid, ProjectionOptions opts) {
  return project_with(tangent_basis(p, grid), metric_weight(p, grid).weight, h, grid, opts,
                      "tangent_projection");
}

TangentProjection natural_projection(const AnsatzPoint& p, const Profile& h,
                                     const QuadratureRule& grid) {
  return project_with(natural_frame(p, grid), metric_weight(p, grid).weight, h, grid, {},
                      "natural_projection");
}

Profile residual(const AnsatzPoint& p, const Eigen::VectorXd& domega_dx,
                 const CollisionModel& model, const QuadratureRule& grid) {
  if (domega_dx.size() != p.omega.size()) {
    throw ParameterError("residual: gradient has the wrong dimension");
  }
  const Eigen::MatrixXd basis = tangent_basis(p, grid);
  const Profile f = evaluate(p, grid);
  const Profile transport = grid.nodes().cwiseProduct(basis * domega_dx);
  const Profile target = transport - collision_apply(model, f, grid);
  return target - tangent_projection(p, target, grid).projected;
}

Profile residual_from_gradient(const AnsatzPoint& p, const Profile& df_dx,
                               const CollisionModel& model, const QuadratureRule& grid) {
  const Profile f = evaluate(p, grid);
  const Profile target = grid.nodes().cwiseProduct(df_dx) - collision_apply(model, f, grid);
  return target - natural_projection(p, target, grid).projected;
}

}  // namespace kinred
