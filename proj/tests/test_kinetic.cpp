#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kinred/errors.hpp"
#include "kinred/kinetic.hpp"
#include "test_support.hpp"

using namespace kinred;
using kinred::testing::random_mixture;

TEST_CASE("compute_moments on Gaussians") {
  const auto grid = truncated_rule(8.0, 64);
  SUBCASE("standard Maxwellian") {
    const auto m = compute_moments(maxwellian(1.0, 0.0, 1.0, grid), grid);
    CHECK(std::abs(m.rho - 1.0) <= 1e-10);
    CHECK(std::abs(m.u) <= 1e-10);
    CHECK(std::abs(m.theta - 1.0) <= 1e-10);
    CHECK(std::abs(m.pressure - m.theta) <= 1e-14);
  }
  SUBCASE("exp(-xi^2)") {
    const Profile f = (-grid.nodes().array().square()).exp().matrix();
    const auto m = compute_moments(f, grid);
    CHECK(std::abs(m.rho - std::sqrt(std::numbers::pi)) <= 1e-10);
    CHECK(std::abs(m.u) <= 1e-10);
    CHECK(std::abs(m.theta - 0.5) <= 1e-10);
  }
  SUBCASE("shifted Maxwellian") {
    const auto m = compute_moments(maxwellian(2.0, 0.5, 0.8, grid), grid);
    CHECK(std::abs(m.rho - 2.0) <= 1e-10);
    CHECK(std::abs(m.u - 0.5) <= 1e-10);
    CHECK(std::abs(m.theta - 0.8) <= 1e-10);
    CHECK(std::abs(m.heat_flux) <= 1e-10);
  }
  SUBCASE("realizability gate") {
    CHECK_THROWS_AS(compute_moments(Profile::Zero(grid.size()), grid), RealizabilityError);
    CHECK_THROWS_AS(compute_moments(Profile(-maxwellian(1, 0, 1, grid)), grid), RealizabilityError);
  }
}

TEST_CASE("maxwellian") {
  const auto grid = truncated_rule(8.0, 64);
  const auto g1 = gauss_hermite_rule(1);  // single node at 0
  CHECK(maxwellian(1.0, 0.0, 1.0, g1)[0] == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  const Profile a = maxwellian(1.3, 0.2, 0.7, grid);
  const Profile b = maxwellian(2.6, 0.2, 0.7, grid);
  CHECK((b - 2.0 * a).cwiseAbs().maxCoeff() <= 1e-15 * b.maxCoeff());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.3, 3.0), v(-0.5, 0.5), t(0.25, 1.0);
  for (int k = 0; k < 50; ++k) {
    const auto m = MomentState::equilibrium(r(rng), v(rng), t(rng));
    const auto back = compute_moments(maxwellian(m, grid), grid);
    CHECK(std::abs(back.rho - m.rho) <= 1e-10 * m.rho);
    CHECK(std::abs(back.u - m.u) <= 1e-10);
    CHECK(std::abs(back.theta - m.theta) <= 1e-10);
  }
}

TEST_CASE("collision targets") {
  const auto grid = truncated_rule(8.0, 64);
  const auto eq = MomentState::equilibrium(1.2, 0.3, 0.9);
  const Profile feq = maxwellian(eq, grid);
  SUBCASE("Shakhov with zero heat flux is the Maxwellian") {
    const Profile fs = collision_target(CollisionModel::shakhov(1.0, 2.0 / 3.0), eq, grid);
    CHECK((fs - feq).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("ES-BGK at a Maxwellian") {
    const Profile fg = collision_target(CollisionModel::esbgk(1.0, 0.8), eq, grid);
    CHECK((fg - feq).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("Shakhov heat flux is scaled by 1 - Pr") {
    // Oracle: E[c^4] = 3 theta^2 and E[c^6] = 15 theta^3 give
    // int c^3 f_S = rho (1-Pr) q / (3 theta^2) * (15/2 - 9/2) theta^2.
    MomentState m = eq;
    m.heat_flux = 0.4;
    const double pr = 2.0 / 3.0;
    const auto back = compute_moments(collision_target(CollisionModel::shakhov(1.0, pr), m, grid), grid);
    CHECK(std::abs(back.rho - m.rho) <= 1e-9);
    CHECK(std::abs(back.u - m.u) <= 1e-9);
    CHECK(std::abs(back.theta - m.theta) <= 1e-9);
    CHECK(std::abs(back.heat_flux - (1.0 - pr) * m.heat_flux) <= 1e-9);
  }
  SUBCASE("ES-BGK rejects nonpositive covariance") {
    MomentState m = eq;
    m.pressure = -5.0;
    CHECK_THROWS_AS(collision_target(CollisionModel::esbgk(1.0, 2.0), m, grid), RealizabilityError);
  }
}

TEST_CASE("collision_apply") {
  const auto grid = truncated_rule(8.0, 64);
  const Profile feq = maxwellian(1.0, 0.1, 0.8, grid);
  for (const auto& model : {CollisionModel::bgk(0.5), CollisionModel::shakhov(0.5, 0.7),
                            CollisionModel::esbgk(0.5, 0.9)}) {
    CHECK(collision_apply(model, feq, grid).cwiseAbs().maxCoeff() <= 1e-11);
  }
  std::mt19937_64 rng(5);
  const Profile f = random_mixture(rng, grid);
  const Profile target = maxwellian(compute_moments(f, grid), grid);
  // Differs from the continuum Maxwellian only by the grid's quadrature error.
  CHECK((collision_apply(CollisionModel::bgk(1.0), f, grid) - (target - f)).cwiseAbs().maxCoeff() <= 1e-12);
  const Profile q2 = collision_apply(CollisionModel::bgk(2.0), f, grid);
  CHECK((2.0 * q2 - collision_apply(CollisionModel::bgk(1.0), f, grid)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("collision invariance over random profiles") {
  // Mixtures can be as wide as theta ~ 2.5; size the box accordingly.
  const auto grid = truncated_rule(default_truncation(1.0, 2.5), 112);
  const Eigen::MatrixXd inv = collision_invariants(grid);
  std::mt19937_64 rng(17);
  for (const auto& model : {CollisionModel::bgk(0.3), CollisionModel::shakhov(0.3, 2.0 / 3.0),
                            CollisionModel::esbgk(0.3, 0.8)}) {
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Profile f = random_mixture(rng, grid);
      const Profile q = collision_apply(model, f, grid);
      const double l1 = grid.integrate(Profile(q.cwiseAbs()));
      for (int k = 0; k < 3; ++k) {
        const double moment = grid.integrate(Profile(inv.col(k).cwiseProduct(q)));
        worst = std::max(worst, std::abs(moment) / l1);
      }
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("entropy") {
  const auto grid = truncated_rule(8.0, 64);
  auto shared = std::make_shared<const QuadratureRule>(grid);
  DistributionField zero(shared, PeriodicMesh{1, 1.0});
  CHECK(entropy(zero) == 0.0);

  DistributionField e_field(shared, PeriodicMesh{1, 1.0});
  e_field.values.setConstant(std::exp(1.0));
  CHECK(std::abs(entropy(e_field)) <= 1e-13);

  DistributionField m_field(shared, PeriodicMesh{1, 1.0});
  m_field.set_cell(0, maxwellian(1.0, 0.0, 1.0, grid));
  // int M log M = -(1 + log 2 pi)/2 and int M = 1.
  const double expected = -(1.5 + 0.5 * std::log(2.0 * std::numbers::pi));
  CHECK(entropy(m_field) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(entropy(m_field) == doctest::Approx(-2.418939).epsilon(1e-6));
  CHECK(EntropyFunctional::eta_second(0.5) == 2.0);
}

TEST_CASE("entropy production") {
  const auto grid = truncated_rule(8.0, 64);
  const Profile feq = maxwellian(1.0, 0.0, 1.0, grid);
  CHECK(std::abs(entropy_production(feq, CollisionModel::bgk(1.0), grid)) <= 1e-11);

  const Eigen::ArrayXd xi = grid.nodes().array();
  Profile pert = (feq.array() * (1.0 + 0.1 * (xi.cube() - 3.0 * xi) * (-xi.square() / 4.0).exp())).matrix();
  pert *= 1.0 / grid.integrate(pert);
  const double s1 = entropy_production(pert, CollisionModel::bgk(1.0), grid);
  CHECK(s1 < 0.0);
  const double s2 = entropy_production(pert, CollisionModel::bgk(2.0), grid);
  CHECK(s2 == doctest::Approx(0.5 * s1).epsilon(1e-14));

  std::mt19937_64 rng(23);
  for (const auto& model : {CollisionModel::bgk(0.7), CollisionModel::shakhov(0.7, 2.0 / 3.0),
                            CollisionModel::esbgk(0.7, 0.8)}) {
    for (int t = 0; t < 100; ++t) {
      CHECK(entropy_production(random_mixture(rng, grid), model, grid) <= 1e-11);
    }
  }
}

TEST_CASE("flux_existence_check") {
  const auto grid = truncated_rule(8.0, 32);
  const Profile f = maxwellian(1.0, 0.0, 1.0, grid);
  const ProfileFunctional square = [&](const Profile& g) {
    return grid.integrate(Profile(g.cwiseAbs2()));
  };
  const ProfileFunctional mass_squared = [&](const Profile& g) {
    const double m = grid.integrate(g);
    return m * m;
  };
  const ProfileFunctional linear = [&](const Profile& g) {
    return grid.integrate(Profile(grid.nodes().cwiseAbs2().cwiseProduct(g)));
  };
  CHECK(flux_existence_check(square, f, grid, 50).passes);
  CHECK(flux_existence_check(linear, f, grid, 50).passes);

  const auto verdict = flux_existence_check(mass_squared, f, grid, 5);
  REQUIRE_FALSE(verdict.passes);
  REQUIRE(verdict.witness_h1.has_value());
  const Profile& h1 = *verdict.witness_h1;
  const Profile& h2 = *verdict.witness_h2;
  CHECK(h1.cwiseProduct(h2).cwiseAbs().maxCoeff() == 0.0);
  const double expected = 2.0 * grid.integrate(h1) * grid.integrate(h2);
  CHECK(verdict.witness_cross == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("discrete collision keeps mass, momentum and energy on a coarse grid") {
  // Spacing ~1 makes the midpoint moments of a Gaussian visibly inexact.
  const auto grid = truncated_rule(8.2, 16);
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd inv = collision_invariants(grid);
  const Profile f = random_mixture(rng, grid);
  const Profile plain = maxwellian(compute_moments(f, grid), grid) - f;
  double plain_defect = 0.0;
  for (int k = 0; k < 3; ++k) plain_defect = std::max(plain_defect, std::abs(grid.integrate(Profile(inv.col(k).cwiseProduct(plain)))));
  CHECK(plain_defect > 1e-13);
  for (const auto& model : {CollisionModel::bgk(0.5), CollisionModel::shakhov(0.5, 0.7),
                            CollisionModel::esbgk(0.5, 0.9)}) {
    const Profile q = collision_apply(model, f, grid);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(grid.integrate(Profile(inv.col(k).cwiseProduct(q)))) <= 1e-14);
    }
  }
}
