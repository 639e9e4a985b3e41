#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "kinred/errors.hpp"
#include "kinred/projection.hpp"

using namespace kinred;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double inner(const Profile& a, const Profile& b, const Profile& w, const QuadratureRule& grid) {
  return grid.integrate(Profile(a.cwiseProduct(b).cwiseProduct(w)));
}

}  // namespace

TEST_CASE("Gram matrix of the Gaussian family") {
  const auto grid = truncated_rule(8.0, 64);
  const auto p = AnsatzPoint::conservative(0.0, 1.0, vec({1.0}));
  Eigen::Matrix3d expected;
  expected << 1.0, 0.0, 0.5, 0.0, 1.0, 0.0, 0.5, 0.0, 0.75;
  expected *= std::sqrt(2.0 * std::numbers::pi);
  const Eigen::MatrixXd a0 = gram_matrix(p, grid);
  CHECK((a0 - expected).cwiseAbs().maxCoeff() <= 1e-10);
  // Flux matrix oracle: odd moments of the Gaussian vanish, so only the
  // (alpha, u), (u, theta) couplings survive.
  Eigen::Matrix3d flux;
  flux << 0.0, 1.0, 0.0, 1.0, 0.0, 1.5, 0.0, 1.5, 0.0;
  flux *= std::sqrt(2.0 * std::numbers::pi);
  CHECK((flux_matrix(p, grid) - flux).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("Gram matrix is symmetric positive definite") {
  const auto grid = truncated_rule(8.0, 64);
  std::mt19937_64 rng(3);
  for (const auto& m : {Manifold::conservative_moment(2), Manifold::hermite_perturbation(4),
                        Manifold::entropy_closure(4)}) {
    for (int t = 0; t < 10; ++t) {
      const auto p = sample_valid_point(m, rng, grid);
      const Eigen::MatrixXd a0 = gram_matrix(p, grid);
      CHECK((a0 - a0.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a0);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      const Eigen::MatrixXd a1 = flux_matrix(p, grid);
      CHECK((a1 - a1.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("degenerate chart is reported") {
  const auto grid = truncated_rule(8.0, 64);
  const auto eq = AnsatzPoint::conservative(0.0, 1.0, vec({1.0, 0.0, 0.0}));
  CHECK_THROWS_AS(gram_matrix(eq, grid), DegenerateChartError);
  Eigen::Matrix2d singular;
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(checked_cholesky(singular, "test"), DegenerateChartError);
}

TEST_CASE("tangent projection is an orthogonal projector") {
  const auto grid = truncated_rule(8.0, 64);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const auto& m : {Manifold::conservative_moment(1), Manifold::hermite_perturbation(3),
                        Manifold::entropy_closure(3)}) {
    const auto p = sample_valid_point(m, rng, grid);
    const Profile w = metric_weight(p, grid).weight;
    const Profile fhat = evaluate(p, grid);
    // Random direction of comparable size to the tangent vectors.
    Profile h(grid.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = g(rng);
    h = h.cwiseProduct(fhat);
    const auto ph = tangent_projection(p, h, grid);
    CHECK_FALSE(ph.regularized);
    // Idempotence.
    const auto pph = tangent_projection(p, ph.projected, grid);
    const double scale = ph.projected.cwiseAbs().maxCoeff();
    CHECK((pph.projected - ph.projected).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    // Orthogonality of the remainder to every tangent direction.
    const Eigen::MatrixXd b = tangent_basis(p, grid);
    const Profile rem = h - ph.projected;
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      const double ip = inner(rem, b.col(k), w, grid);
      const double norm = std::sqrt(inner(rem, rem, w, grid) * inner(b.col(k), b.col(k), w, grid));
      CHECK(std::abs(ip) <= 1e-9 * norm);
    }
    // Chart and natural frame give the same projection.
    const auto nat = natural_projection(p, h, grid);
    CHECK((nat.projected - ph.projected).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  }
}

TEST_CASE("regularized projection is flagged") {
  const auto grid = truncated_rule(8.0, 64);
  const auto p = AnsatzPoint::conservative(0.0, 1.0, vec({1.0}));
  const auto r = tangent_projection(p, evaluate(p, grid), grid, {.regularize = true});
  CHECK(r.regularized);
  CHECK((r.projected - evaluate(p, grid)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("residual vanishes for exact solutions") {
  const auto grid = truncated_rule(8.0, 64);
  // A spatially uniform equilibrium has zero residual.
  const auto eq = AnsatzPoint::hermite(1.0, 0.2, 0.9, Eigen::VectorXd());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  const Profile r = residual(eq, zero, CollisionModel::bgk(1.0), grid);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-12);
  // xi * M and xi * dM/du stay tangent; xi * dM/dtheta brings in a cubic
  // Hermite mode that HermitePerturbation(2) cannot represent.
  Eigen::VectorXd drho = Eigen::VectorXd::Zero(3);
  drho[0] = 1.0;
  CHECK(residual(eq, drho, CollisionModel::none(), grid).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::VectorXd dtheta = Eigen::VectorXd::Zero(3);
  dtheta[2] = 1.0;
  const Profile r2 = residual(eq, dtheta, CollisionModel::none(), grid);
  CHECK(r2.cwiseAbs().maxCoeff() > 1e-3);
  // Natural-frame residual agrees with the chart residual where both exist.
  const Profile df = tangent_basis(eq, grid) * dtheta;
  const Profile r3 = residual_from_gradient(eq, df, CollisionModel::none(), grid);
  CHECK((r3 - r2).cwiseAbs().maxCoeff() <= 1e-9 * r2.cwiseAbs().maxCoeff());
}

TEST_CASE("reduced source conserves collision invariants") {
  const auto grid = truncated_rule(8.0, 64);
  std::mt19937_64 rng(9);
  const auto p = sample_valid_point(Manifold::hermite_perturbation(4), rng, grid);
  // Right-hand side is <b_k, Q>; the rate itself needs A0^{-1}.
  const Eigen::VectorXd q =
      gram_matrix(p, grid).ldlt().solve(reduced_source(p, CollisionModel::bgk(1.0), grid));
  // The projected source changes only the alpha block.
  CHECK(q.head(3).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(q.tail(2).cwiseAbs().maxCoeff() > 0.0);
  // And it is exact relaxation: dalpha/dt = -alpha / tau.
  CHECK((q.tail(2) + p.omega.tail(2)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("Gram and flux entries scale with the amplitude") {
  const auto grid = truncated_rule(8.0, 64);
  const Eigen::MatrixXd a = gram_matrix(AnsatzPoint::conservative(0.0, 1.0, vec({1.0})), grid);
  const Eigen::MatrixXd b = gram_matrix(AnsatzPoint::conservative(0.0, 1.0, vec({2.0})), grid);
  CHECK(b(1, 1) == doctest::Approx(4.0 * a(1, 1)).epsilon(1e-13));
  CHECK(b(0, 0) == doctest::Approx(a(0, 0)).epsilon(1e-13));
  const Eigen::MatrixXd f = flux_matrix(AnsatzPoint::conservative(0.0, 1.0, vec({1.0})), grid);
  CHECK(f(0, 1) == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-10));
  CHECK(std::abs(f(0, 0)) <= 1e-14);
  const auto raw = assemble_flux(tangent_basis(AnsatzPoint::conservative(0.1, 0.8, vec({1.0, 0.1, 0.2})), grid),
                                 metric_weight(AnsatzPoint::conservative(0.1, 0.8, vec({1.0, 0.1, 0.2})), grid).weight,
                                 grid);
  CHECK(raw.asymmetry <= 1e-13 * raw.matrix.cwiseAbs().maxCoeff());
}

TEST_CASE("weight cancellation for the polynomial directions") {
  const auto grid = truncated_rule(8.0, 64);
  std::mt19937_64 rng(13);
  const auto p = sample_valid_point(Manifold::conservative_moment(3), rng, grid);
  const Eigen::MatrixXd b = tangent_basis(p, grid);
  const Profile w = metric_weight(p, grid).weight;
  Profile xk = Profile::Ones(grid.size());
  for (int k = 0; k <= 3; ++k) {
    const Profile prod = b.col(k).cwiseProduct(w);
    CHECK((prod - xk).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, xk.cwiseAbs().maxCoeff()));
    xk = xk.cwiseProduct(grid.nodes());
  }
  // Hence the alpha components of Q are raw moments of Q[f_hat].
  const auto model = CollisionModel::bgk(0.5);
  const Eigen::VectorXd q = reduced_source(p, model, grid);
  const Profile f = evaluate(p, grid);
  const Profile direct = (maxwellian(compute_moments(f, grid), grid) - f) / 0.5;
  const Eigen::VectorXd moments = raw_moments(direct, grid, 4);
  CHECK((q.head(4) - moments).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, moments.cwiseAbs().maxCoeff()));
  const Eigen::VectorXd q2 = reduced_source(p, CollisionModel::bgk(1.0), grid);
  CHECK((q - 2.0 * q2).cwiseAbs().maxCoeff() <= 1e-14 * q.cwiseAbs().maxCoeff());
}

TEST_CASE("projection fixes tangent vectors and conserved fluxes") {
  const auto grid = truncated_rule(8.0, 64);
  std::mt19937_64 rng(15);
  const auto p = sample_valid_point(Manifold::conservative_moment(2), rng, grid);
  const Eigen::MatrixXd b = tangent_basis(p, grid);
  const auto pc = tangent_projection(p, b.col(2), grid);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(b.cols());
  unit[2] = 1.0;
  CHECK((pc.coefficients - unit).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::ArrayXd g = (-(grid.nodes().array() - p.u()).square() / (2.0 * p.theta())).exp();
  Eigen::ArrayXd xk = Eigen::ArrayXd::Ones(grid.size());
  for (int k = 0; k <= 4; ++k) {
    const Profile v = (xk * g).matrix();
    const auto pv = tangent_projection(p, v, grid);
    CHECK((pv.projected - v).cwiseAbs().maxCoeff() <= 1e-10 * v.cwiseAbs().maxCoeff());
    xk *= grid.nodes().array();
  }
}

TEST_CASE("tangent gradient of the amplitude is transported inside the span") {
  const auto grid = truncated_rule(8.0, 64);
  const auto p = AnsatzPoint::conservative(0.0, 1.0, vec({1.0}));
  Eigen::VectorXd d = Eigen::VectorXd::Zero(3);
  d[0] = 1e-3;  // alpha_0 gradient
  CHECK(residual(p, d, CollisionModel::none(), grid).cwiseAbs().maxCoeff() <= 1e-12);
  const auto eq = AnsatzPoint::hermite(1.0, 0.0, 1.0, Eigen::VectorXd());
  const Profile r = residual(eq, Eigen::Vector3d(0.2, 0.1, 0.3), CollisionModel::bgk(1.0), grid);
  const Profile w = metric_weight(eq, grid).weight;
  const Eigen::MatrixXd b = tangent_basis(eq, grid);
  const double norm = std::sqrt(grid.integrate(Profile(r.cwiseAbs2().cwiseProduct(w))));
  for (Eigen::Index k = 0; k < b.cols(); ++k) {
    CHECK(std::abs(grid.integrate(Profile(r.cwiseProduct(b.col(k)).cwiseProduct(w)))) <= 1e-10 * norm);
  }
}
