#include "kinred/stability.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "kinred/errors.hpp"
#include "kinred/hermite.hpp"
#include "kinred/projection.hpp"
#include "kinred/quadrature.hpp"
#include "kinred/reduced_solver.hpp"

namespace kinred {

namespace {

constexpr double kOrthonormalityTol = 1e-8;

void multi_indices(int d, int k_max, std::vector<std::array<int, 3>>& out) {
  // Graded order: total degree first, then lexicographic.
  for (int total = 0; total <= k_max; ++total) {
    for (int a = total; a >= 0; --a) {
      if (d == 1) {
        if (a == total) out.push_back({a, 0, 0});
        continue;
      }
      for (int b = total - a; b >= 0; --b) {
        const int c = total - a - b;
        if (d == 2 && c != 0) continue;
        out.push_back({a, b, c});
      }
    }
  }
}

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

Eigen::VectorXd HermiteSpace::coordinates(const std::function<double(const double*)>& poly) const {
  const double sq = std::sqrt(theta);
  Eigen::VectorXd values(nodes.rows());
  double z[3] = {0.0, 0.0, 0.0};
  for (Eigen::Index q = 0; q < nodes.rows(); ++q) {
    for (int j = 0; j < dimension; ++j) z[j] = sq * nodes(q, j);
    values[q] = poly(z);
  }
  return metric_scale * rho * basis.transpose() * weights.cwiseProduct(values);
}

HermiteSpace make_hermite_space(int dimension, int max_degree, const MomentState& m,
                                int quadrature_order, double metric_scale) {
  if (dimension < 1 || dimension > 3) {
    throw ParameterError("hermite space: dimension must be 1, 2 or 3");
  }
  if (max_degree < 0 || max_degree > 12) {
    throw ParameterError("hermite space: degree must lie in [0, 12]");
  }
  if (!(metric_scale > 0.0)) throw ParameterError("hermite space: metric scale must be positive");
  m.validate();
  HermiteSpace s;
  s.dimension = dimension;
  s.max_degree = max_degree;
  s.rho = m.rho;
  s.u = m.u;
  s.theta = m.theta;
  s.metric_scale = metric_scale;
  multi_indices(dimension, max_degree, s.indices);

  const int order = quadrature_order > 0 ? quadrature_order : max_degree + 2;
  const QuadratureRule gh = gauss_hermite_rule(order);
  int nq = 1;
  for (int j = 0; j < dimension; ++j) nq *= order;
  s.nodes.resize(nq, dimension);
  s.weights.resize(nq);
  for (int q = 0; q < nq; ++q) {
    int rest = q;
    double w = 1.0;
    for (int j = 0; j < dimension; ++j) {
      const int i = rest % order;
      rest /= order;
      s.nodes(q, j) = std::sqrt(2.0) * gh.nodes()[i];
      w *= gh.weights()[i] / std::sqrt(std::numbers::pi);
    }
    s.weights[q] = w;
  }

  const double norm = 1.0 / std::sqrt(metric_scale * m.rho);
  s.basis.resize(nq, s.size());
  for (int q = 0; q < nq; ++q) {
    std::array<std::vector<double>, 3> he;
    for (int j = 0; j < dimension; ++j) he[j] = hermite_he(s.nodes(q, j), max_degree);
    for (int b = 0; b < s.size(); ++b) {
      double v = norm;
      for (int j = 0; j < dimension; ++j) {
        const int k = s.indices[b][j];
        v *= he[j][k] / std::sqrt(factorial(k));
      }
      s.basis(q, b) = v;
    }
  }
  const Eigen::MatrixXd gram =
      metric_scale * m.rho * s.basis.transpose() * s.weights.asDiagonal() * s.basis;
  s.orthonormality_defect =
      (gram - Eigen::MatrixXd::Identity(s.size(), s.size())).cwiseAbs().maxCoeff();
  if (!(s.orthonormality_defect <= kOrthonormalityTol)) {
    throw ConfigurationError("hermite space: quadrature of order " + std::to_string(order) +
                             " leaves orthonormality defect " +
                             std::to_string(s.orthonormality_defect));
  }
  return s;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& vectors, double tol) {
  Eigen::MatrixXd q(vectors.rows(), 0);
  const double largest = vectors.cols() > 0 ? vectors.colwise().norm().maxCoeff() : 0.0;
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::VectorXd v = vectors.col(c);
    const double original = v.norm();
    if (original <= tol * largest || original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < q.cols(); ++j) v -= q.col(j).dot(v) * q.col(j);
    }
    const double n = v.norm();
    if (n <= tol * original) continue;
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = v / n;
  }
  return q;
}

EquilibriumSubspaces equilibrium_subspaces(const HermiteSpace& space) {
  const int d = space.dimension;
  const double theta = space.theta;
  const int n = space.size();
  auto sq_norm = [d](const double* z) {
    double r = 0.0;
    for (int j = 0; j < d; ++j) r += z[j] * z[j];
    return r;
  };
  // Velocity xi = u e_1 + z.
  auto xi = [&space](const double* z, int j) { return z[j] + (j == 0 ? space.u : 0.0); };

  Eigen::MatrixXd raw0(n, d + 2);
  raw0.col(0) = space.coordinates([](const double*) { return 1.0; });
  for (int j = 0; j < d; ++j) {
    raw0.col(1 + j) = space.coordinates([&, j](const double* z) { return xi(z, j); });
  }
  raw0.col(d + 1) = space.coordinates([&](const double* z) {
    double r = 0.0;
    for (int j = 0; j < d; ++j) r += xi(z, j) * xi(z, j);
    return r;
  });

  Eigen::MatrixXd raw1(n, d);
  for (int j = 0; j < d; ++j) {
    raw1.col(j) = space.coordinates(
        [&, j](const double* z) { return z[j] * (sq_norm(z) - (d + 2) * theta); });
  }

  const int cross = d * (d - 1) / 2;
  Eigen::MatrixXd raw2(n, d + cross);
  for (int j = 0; j < d; ++j) {
    raw2.col(j) =
        space.coordinates([&, j](const double* z) { return d * z[j] * z[j] - sq_norm(z); });
  }
  int col = d;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      raw2.col(col++) = space.coordinates([a, b](const double* z) { return z[a] * z[b]; });
    }
  }

  EquilibriumSubspaces s;
  s.w0 = orthonormalize(raw0);
  s.w1 = orthonormalize(raw1);
  s.w2 = orthonormalize(raw2);
  if (s.w1.cols() > 0) s.w1_w0_overlap = (s.w0.transpose() * s.w1).cwiseAbs().maxCoeff();
  if (s.w2.cols() > 0) s.w2_w0_overlap = (s.w0.transpose() * s.w2).cwiseAbs().maxCoeff();
  return s;
}

Eigen::MatrixXd linearized_collision_matrix(const CollisionModel& model, const HermiteSpace& space,
                                            const EquilibriumSubspaces& sub) {
  const int n = space.size();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd p0 = EquilibriumSubspaces::projector(sub.w0);
  switch (model.kind) {
    case CollisionKind::None:
      return Eigen::MatrixXd::Zero(n, n);
    case CollisionKind::BGK:
      model.validate(space.dimension);
      return (p0 - id) / model.tau;
    case CollisionKind::Shakhov:
      model.validate(space.dimension);
      return (p0 + (1.0 - model.prandtl) * EquilibriumSubspaces::projector(sub.w1) - id) / model.tau;
    case CollisionKind::ESBGK: {
      model.validate(space.dimension);
      const Eigen::MatrixXd p2 = sub.w2.cols() > 0 ? EquilibriumSubspaces::projector(sub.w2)
                                                   : Eigen::MatrixXd::Zero(n, n);
      return (model.prandtl / model.tau) * (p0 + (1.0 - 1.0 / model.prandtl) * p2 - id);
    }
  }
  throw ParameterError("linearized_collision_matrix: unknown model");
}

Eigen::MatrixXd linearized_collision_matrix(const CollisionModel& model, const HermiteSpace& space) {
  return linearized_collision_matrix(model, space, equilibrium_subspaces(space));
}

GuscReport gusc_check(const Eigen::MatrixXd& d, const Eigen::MatrixXd& p0, double lambda_claim) {
  if (d.rows() != d.cols() || p0.rows() != d.rows() || p0.cols() != d.cols()) {
    throw ParameterError("gusc_check: dimension mismatch");
  }
  GuscReport r;
  r.lambda_claim = lambda_claim;
  r.kernel_defect = std::max((d * p0).cwiseAbs().maxCoeff(), (p0 * d).cwiseAbs().maxCoeff());

  const Eigen::Index n = d.rows();
  const Eigen::MatrixXd complement_proj = Eigen::MatrixXd::Identity(n, n) - p0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> split(0.5 * (complement_proj + complement_proj.transpose()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (split.eigenvalues()[i] > 0.5) keep.push_back(i);
  }
  if (keep.empty()) {
    r.worst_quotient = -std::numeric_limits<double>::infinity();
  } else {
    Eigen::MatrixXd c(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) c.col(k) = split.eigenvectors().col(keep[k]);
    const Eigen::MatrixXd sym = 0.5 * (d + d.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.transpose() * sym * c);
    r.worst_quotient = eig.eigenvalues().maxCoeff();
  }
  r.pass = r.worst_quotient <= -lambda_claim + 1e-8;
  r.gwsc_pass = r.worst_quotient <= 1e-10;
  return r;
}

double default_lambda_claim(const CollisionModel& model) {
  if (model.kind == CollisionKind::None) return 0.0;
  const double pr = model.kind == CollisionKind::BGK ? 1.0 : model.prandtl;
  return std::min(pr, 1.0) / model.tau;
}

YongReport yong_conditions_check(const Eigen::MatrixXd& a0, const Eigen::MatrixXd& jacobian,
                                 const Eigen::MatrixXd& qu, const Eigen::MatrixXd& e) {
  const Eigen::Index n = a0.rows();
  if (a0.cols() != n || jacobian.rows() != n || jacobian.cols() != n || qu.rows() != n ||
      qu.cols() != n || e.rows() != n || e.cols() > n) {
    throw ParameterError("yong_conditions_check: dimension mismatch");
  }
  checked_cholesky(a0, "yong_conditions_check");
  YongReport r;
  const Eigen::Index m = e.cols();

  // A0-orthogonal complement of span(E): null space of E^T A0.
  Eigen::MatrixXd c;
  if (m == 0) {
    c = Eigen::MatrixXd::Identity(n, n);
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(e.transpose() * a0);
    c = lu.kernel();
    if (lu.rank() != m) throw ParameterError("yong_conditions_check: equilibrium basis is rank deficient");
  }
  Eigen::MatrixXd p(n, n);
  p << e, c;
  const Eigen::MatrixXd t = p.fullPivLu().solve(qu * p);
  const double scale = std::max(1.0, qu.cwiseAbs().maxCoeff());
  double block = 0.0;
  if (m > 0) {
    block = t.topRows(m).cwiseAbs().maxCoeff();
    if (n > m) block = std::max(block, t.bottomLeftCorner(n - m, m).cwiseAbs().maxCoeff());
  }
  r.block_defect = block;
  r.block_pass = block <= 1e-8 * scale;

  const Eigen::MatrixXd sym_product = a0 * jacobian;
  r.symmetrizer_defect = (sym_product - sym_product.transpose()).cwiseAbs().maxCoeff();
  const double product_norm = sym_product.cwiseAbs().maxCoeff();
  r.symmetrizer_relative = product_norm > 0.0 ? r.symmetrizer_defect / product_norm : 0.0;
  r.symmetric_pass = r.symmetrizer_defect <= 1e-10 * product_norm;

  const Eigen::MatrixXd s = 0.5 * (a0 * qu + qu.transpose() * a0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> weak(s);
  r.weak_max = weak.eigenvalues().maxCoeff();
  r.weak_pass = r.weak_max <= 1e-10 * scale;
  if (c.cols() == 0) {
    r.dissipation = std::numeric_limits<double>::infinity();
  } else {
    const Eigen::MatrixXd lhs = -(c.transpose() * s * c);
    const Eigen::MatrixXd rhs = c.transpose() * a0 * c;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gen(0.5 * (lhs + lhs.transpose()),
                                                                  0.5 * (rhs + rhs.transpose()));
    r.dissipation = gen.eigenvalues().minCoeff();
  }
  r.dissipative_pass = r.dissipation > 1e-8;
  return r;
}

AnsatzPoint equilibrium_point(const Manifold& manifold, const MomentState& m) {
  manifold.validate();
  m.validate();
  const double norm = m.rho / std::sqrt(2.0 * std::numbers::pi * m.theta);
  switch (manifold.kind) {
    case ManifoldKind::ConservativeMoment: {
      // Raw coefficients of the polynomial in xi; only the constant survives.
      Eigen::VectorXd alpha = Eigen::VectorXd::Zero(manifold.order + 1);
      alpha[0] = norm;
      return AnsatzPoint::conservative(m.u, m.theta, alpha);
    }
    case ManifoldKind::HermitePerturbation:
      return AnsatzPoint::hermite(m.rho, m.u, m.theta,
                                  Eigen::VectorXd::Zero(manifold.dimension() - 3));
    case ManifoldKind::EntropyClosure: {
      if (manifold.order < 3) {
        throw ParameterError("equilibrium_point: EntropyClosure needs n >= 3 to contain Maxwellians");
      }
      Eigen::VectorXd a = Eigen::VectorXd::Zero(manifold.order);
      a[0] = std::log(norm) - m.u * m.u / (2.0 * m.theta);
      a[1] = m.u / m.theta;
      a[2] = -1.0 / (2.0 * m.theta);
      return AnsatzPoint::entropy_closure(a);
    }
  }
  throw ParameterError("equilibrium_point: unknown manifold");
}

EquilibriumSystem equilibrium_system(const Manifold& manifold, const MomentState& m,
                                     const CollisionModel& model, const QuadratureRule& grid) {
  const AnsatzPoint p = equilibrium_point(manifold, m);
  const Profile f = evaluate(p, grid);
  const Eigen::MatrixXd b = natural_frame(p, grid);
  const Profile w = metric_weight(p, grid).weight;
  EquilibriumSystem sys;
  sys.a0 = assemble_gram(b, w, grid).matrix;
  sys.a1 = assemble_flux(b, w, grid).matrix;
  const auto llt = checked_cholesky(sys.a0, "equilibrium_system");
  sys.jacobian = llt.solve(sys.a1);

  // bw(:, k) = w b_k times quadrature weights, so bw^T h = g(b_k, h).
  Eigen::MatrixXd bw = b;
  for (Eigen::Index k = 0; k < b.cols(); ++k) {
    bw.col(k) = b.col(k).cwiseProduct(w).cwiseProduct(grid.weights());
  }
  const Eigen::Index n = b.cols();
  Eigen::MatrixXd dq(n, n);
  // Fourth-order central stencil.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double eps = 1e-3 * f.cwiseAbs().maxCoeff() / b.col(j).cwiseAbs().maxCoeff();
    auto q_at = [&](double s) { return collision_apply(model, Profile(f + s * eps * b.col(j)), grid); };
    const Profile diff = 8.0 * (q_at(1.0) - q_at(-1.0)) - (q_at(2.0) - q_at(-2.0));
    dq.col(j) = bw.transpose() * diff / (12.0 * eps);
  }
  sys.qu = llt.solve(dq);

  // Collision invariants times f~, expressed in the frame.
  Eigen::MatrixXd w0(grid.size(), 3);
  w0.col(0) = f;
  w0.col(1) = grid.nodes().cwiseProduct(f);
  w0.col(2) = grid.nodes().cwiseAbs2().cwiseProduct(f);
  sys.equilibrium_basis = llt.solve(bw.transpose() * w0);
  return sys;
}

SpeedAudit propagation_speed_audit(const Manifold& manifold, int samples, double bound,
                                   const QuadratureRule& grid, std::uint64_t seed,
                                   const SamplingBox& box) {
  if (samples < 1) throw ParameterError("propagation_speed_audit: samples must be >= 1");
  std::mt19937_64 rng(seed);
  SpeedAudit r;
  r.samples = samples;
  r.bound = bound;
  for (int s = 0; s < samples; ++s) {
    const AnsatzPoint p = sample_valid_point(manifold, rng, grid, box);
    r.max_radius = std::max(r.max_radius, spectral_radius(p, grid));
  }
  r.margin = bound - r.max_radius;
  r.pass = r.max_radius <= bound + 1e-9;
  return r;
}

HyperbolicityAudit hyperbolicity_audit(const Manifold& manifold, int samples,
                                       const QuadratureRule& grid, std::uint64_t seed,
                                       const SamplingBox& box) {
  if (samples < 1) throw ParameterError("hyperbolicity_audit: samples must be >= 1");
  std::mt19937_64 rng(seed);
  HyperbolicityAudit r;
  r.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const AnsatzPoint p = sample_valid_point(manifold, rng, grid, box);
    const Eigen::MatrixXd b = tangent_basis(p, grid);
    const Profile w = metric_weight(p, grid).weight;
    const AssembledMatrix a0 = assemble_gram(b, w, grid);
    try {
      checked_cholesky(a0.matrix, "hyperbolicity_audit");
    } catch (const DegenerateChartError&) {
      ++r.cholesky_failures;
    }
    // Raw quadrature sum, before any symmetrization.
    Eigen::MatrixXd bx = b;
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      bx.col(k) = b.col(k).cwiseProduct(w).cwiseProduct(grid.nodes()).cwiseProduct(grid.weights());
    }
    const Eigen::MatrixXd a1 = bx.transpose() * b;
    const double norm = inf_norm(a1);
    if (norm > 0.0) r.max_asymmetry = std::max(r.max_asymmetry, inf_norm(a1 - a1.transpose()) / norm);
  }
  r.pass = r.cholesky_failures == 0 && r.max_asymmetry <= 1e-10;
  return r;
}

}  // namespace kinred
