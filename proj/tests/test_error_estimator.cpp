#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kinred/error_estimator.hpp"
#include "kinred/errors.hpp"
#include "test_support.hpp"

using namespace kinred;
using kinred::testing::random_mixture;
using kinred::testing::shared_grid;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ScenarioConfig wave(double final_time) {
  ScenarioConfig c;
  c.manifold = Manifold::conservative_moment(2);
  c.collision = CollisionModel::bgk(0.1);
  c.mesh = PeriodicMesh{24, 1.0};
  c.velocity_cells = 24;
  c.initial.preset = InitialPreset::SineDensity;
  c.initial.amplitude = 0.05;
  c.initial.shape = 1.0;
  c.final_time = final_time;
  c.outputs = 4;
  return c;
}

}  // namespace

TEST_CASE("field norm of a crafted bump") {
  // Height h on |xi| <= a/2 and one cell: ||R||_2 = h sqrt(a dx).
  const auto grid = truncated_rule(4.0, 400);
  const double dx = 0.1, h = 3.0, a = 1.0;
  FieldMatrix r = FieldMatrix::Zero(10, static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    if (std::abs(grid.nodes()[j]) <= a / 2) r(4, j) = h;
  }
  CHECK(field_norm(r, grid, dx, 2.0) == doctest::Approx(h * std::sqrt(a * dx)).epsilon(1e-12));
  CHECK(field_norm(FieldMatrix(2.0 * r), grid, dx, 2.0) ==
        doctest::Approx(2.0 * field_norm(r, grid, dx, 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(field_norm(r, grid, dx, 1.0), ParameterError);
}

TEST_CASE("field norm agrees with direct summation") {
  const auto grid = truncated_rule(6.0, 16);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  FieldMatrix v(7, static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = n(rng);
  for (double p : {1.5, 2.0, 3.0}) {
    long double sum = 0.0L;
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        sum += 0.2L * grid.weights()[j] * std::pow(std::abs(v(i, j)), p);
    const double direct = static_cast<double>(std::pow(sum, 1.0L / p));
    CHECK(field_norm(v, grid, 0.2, p) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("residual of a homogeneous equilibrium vanishes") {
  const auto grid = truncated_rule(8.0, 32);
  const auto p = AnsatzPoint::conservative(0.1, 1.0, vec({0.4, 0.0, 0.0}));
  const std::vector<AnsatzPoint> omega(6, p);
  CHECK(residual_norm(omega, PeriodicMesh{6, 1.0}, grid, CollisionModel::bgk(0.1), 2.0) <= 1e-12);
}

TEST_CASE("Lipschitz quotient for matched-moment BGK pairs is 1/tau") {
  const auto grid = truncated_rule(8.0, 64);
  std::mt19937_64 rng(21);
  const Profile f1 = random_mixture(rng, grid);
  // f2 with the same moments: add a moment-free perturbation.
  const Eigen::ArrayXd xi = grid.nodes().array();
  const MomentState m = compute_moments(f1, grid);
  const Eigen::ArrayXd w = (xi - m.u) / std::sqrt(m.theta);
  const Profile g = (maxwellian(m, grid).array() * (w.pow(4) - 6 * w.square() + 3) * 0.05).matrix();
  const Profile f2 = f1 + g;
  for (double tau : {0.1, 0.2}) {
    CHECK(lipschitz_quotient(CollisionModel::bgk(tau), f2, f1, grid, 2.0) ==
          doctest::Approx(1.0 / tau).epsilon(1e-8));
  }
}

TEST_CASE("Lipschitz estimate scales with 1/tau and is stable under resampling") {
  const auto grid = truncated_rule(8.0, 48);
  std::vector<Profile> few, many;
  for (int k = 0; k < 40; ++k) {
    const double s = 0.02 * std::sin(k);
    const Profile f = maxwellian(1.0 + s, 0.1 * s, 1.0 - s, grid);
    if (k < 20) few.push_back(f);
    many.push_back(f);
  }
  const double l1 = lipschitz_estimate(CollisionModel::bgk(0.1), few, grid, 0.1, 2.0, 3);
  const double l2 = lipschitz_estimate(CollisionModel::bgk(0.2), few, grid, 0.1, 2.0, 3);
  const double l3 = lipschitz_estimate(CollisionModel::bgk(0.1), many, grid, 0.1, 2.0, 3);
  CHECK(std::isfinite(l1));
  CHECK(l2 == doctest::Approx(0.5 * l1).epsilon(1e-12));
  CHECK(l3 == doctest::Approx(l1).epsilon(0.1));
  CHECK(l1 > 0.0);
}

TEST_CASE("Gronwall bound closed forms") {
  std::vector<double> t, zero, r;
  for (int k = 0; k <= 200; ++k) {
    t.push_back(k * 0.005);
    zero.push_back(0.0);
    r.push_back(0.3);
  }
  for (double b : gronwall_bound(0.0, t, zero, 2.0)) CHECK(b == 0.0);
  const auto flat = gronwall_bound(0.0, t, r, 0.0);
  CHECK(flat.back() == doctest::Approx(0.3 * 1.0).epsilon(1e-14));
  const auto grow = gronwall_bound(0.0, t, r, 2.0);
  CHECK(grow.back() == doctest::Approx(0.3 * (std::exp(2.0) - 1.0) / 2.0).epsilon(1e-4));
  const auto more = gronwall_bound(0.0, t, r, 2.5);
  for (std::size_t k = 1; k < t.size(); ++k) {
    CHECK(grow[k] >= grow[k - 1]);
    CHECK(more[k] > grow[k]);
  }
  CHECK(gronwall_bound(0.1, t, zero, 1.0).back() == 0.1);
  CHECK_THROWS_AS(gronwall_bound(0.0, t, r, -1.0), ParameterError);
}

TEST_CASE("self-comparison gives zero error") {
  const ScenarioConfig c = wave(0.01);
  const ReducedTrajectory red = run_reduced(c);
  KineticTrajectory ref;
  ref.mesh = red.mesh;
  ref.grid = red.grid;
  ref.times = red.times;
  for (const auto& omega : red.omega) {
    FieldMatrix f(red.mesh.cells, static_cast<Eigen::Index>(red.grid->size()));
    for (int i = 0; i < red.mesh.cells; ++i) f.row(i) = evaluate(omega[i], *red.grid).transpose();
    ref.snapshots.push_back(f);
  }
  for (double e : actual_error(red, ref, 2.0)) CHECK(e == 0.0);
  ref.times.back() += 1e-3;
  CHECK_THROWS_AS(actual_error(red, ref, 2.0), ParameterError);
}

TEST_CASE("bound dominates the measured error on a short wave") {
  const ScenarioConfig c = wave(0.04);
  const ReducedTrajectory red = run_reduced(c);
  const KineticTrajectory ref = run_reference(c);
  const ErrorReport rep = estimate_error(red, ref, c.collision, 2.0, 5);
  CHECK(rep.actual.front() <= 1e-10);
  CHECK_FALSE(rep.violated());
  for (double r : rep.ratio()) CHECK(r >= 1.0);
  CHECK(rep.lipschitz > 0.0);
}
