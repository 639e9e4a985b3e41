#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kinred/errors.hpp"
#include "kinred/reference_solver.hpp"
#include "test_support.hpp"

using namespace kinred;
using kinred::testing::random_mixture;
using kinred::testing::shared_grid;

namespace {

KineticState uniform_state(const Profile& f, std::shared_ptr<const QuadratureRule> grid, int cells) {
  KineticState s{DistributionField(grid, PeriodicMesh{cells, 1.0})};
  for (int i = 0; i < cells; ++i) s.f.set_cell(i, f);
  return s;
}

/// Free transport of rho(x) = 1 + 0.5 sin(2 pi x) times a Maxwellian: the
/// exact solution at time t is rho(x - xi t) M(xi). Returns the L2 error of
/// upwind against cell-averaged exact data.
double transport_error(int cells, double final_time) {
  const auto grid = shared_grid(4.0, 4);
  const Profile m = maxwellian(1.0, 0.0, 0.5, *grid);
  KineticState s{DistributionField(grid, PeriodicMesh{cells, 1.0})};
  const double dx = 1.0 / cells;
  const double k = 2.0 * std::numbers::pi;
  auto cell_avg = [&](int i, double shift) {
    const double a = i * dx - shift, b = (i + 1) * dx - shift;
    return 1.0 + 0.5 * (std::cos(k * a) - std::cos(k * b)) / (k * dx);
  };
  for (int i = 0; i < cells; ++i) {
    Profile f = m;
    for (Eigen::Index j = 0; j < f.size(); ++j) f[j] *= cell_avg(i, 0.0);
    s.f.set_cell(i, f);
  }
  const KineticTrajectory tr = run_reference(s, CollisionModel::none(), 0.5, {0.0, final_time});
  const FieldMatrix& out = tr.snapshots.back();
  double err = 0.0;
  for (int i = 0; i < cells; ++i) {
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      const double exact = m[j] * cell_avg(i, grid->nodes()[j] * final_time);
      err += dx * grid->weights()[j] * std::pow(out(i, j) - exact, 2);
    }
  }
  return std::sqrt(err);
}

}  // namespace

TEST_CASE("x-independent data is unchanged by transport") {
  const auto grid = shared_grid(8.0, 16);
  std::mt19937_64 rng(2);
  const Profile f = random_mixture(rng, *grid);
  const KineticState s = uniform_state(f, grid, 12);
  const KineticState t = transport_step(s, 0.9 * max_transport_dt(s.f));
  CHECK((t.f.values - s.f.values).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("transport step beyond the CFL limit is rejected") {
  const auto grid = shared_grid(8.0, 8);
  const KineticState s = uniform_state(maxwellian(1.0, 0.0, 1.0, *grid), grid, 10);
  CHECK_THROWS_AS(transport_step(s, 1.01 * max_transport_dt(s.f)), ParameterError);
}

TEST_CASE("upwind transport converges at first order") {
  const double e1 = transport_error(50, 0.2);
  const double e2 = transport_error(100, 0.2);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("BGK relaxation is the exact exponential") {
  const auto grid = shared_grid(8.0, 32);
  std::mt19937_64 rng(9);
  const Profile f = random_mixture(rng, *grid);
  const KineticState s = uniform_state(f, grid, 3);
  const CollisionModel bgk = CollisionModel::bgk(0.3);
  const Profile feq = maxwellian(compute_moments(f, *grid), *grid);
  const KineticState r = relaxation_step(s, bgk, 0.2);
  const Profile expected = feq + (f - feq) * std::exp(-0.2 / 0.3);
  CHECK((r.f.cell(1) - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("Shakhov relaxation damps the heat flux at rate Pr/tau") {
  const auto grid = shared_grid(10.0, 64);
  const Profile f = 0.6 * maxwellian(1.0, -0.4, 0.6, *grid) + 0.4 * maxwellian(1.0, 0.6, 1.0, *grid);
  const KineticState s = uniform_state(f, grid, 1);
  const double tau = 0.5, pr = 2.0 / 3.0, t = 0.05;
  const KineticState r = relaxation_step(s, CollisionModel::shakhov(tau, pr), t);
  const double q0 = compute_moments(f, *grid).heat_flux;
  const double q1 = compute_moments(r.f, 0).heat_flux;
  const double rate = -std::log(q1 / q0) / t;
  CHECK(rate == doctest::Approx(pr / tau).epsilon(0.02));
}

TEST_CASE("reference run conserves mass, stays positive and dissipates entropy") {
  ScenarioConfig c;
  c.collision = CollisionModel::bgk(0.05);
  c.mesh = PeriodicMesh{40, 1.0};
  c.velocity_cells = 24;
  c.initial.preset = InitialPreset::TwoMaxwellianMix;
  c.initial.amplitude = 0.8;
  c.initial.u2 = 0.5;
  c.initial.theta2 = 0.6;
  c.final_time = 0.1;
  c.outputs = 2;
  const KineticTrajectory tr = run_reference(c, RunOptions{true});
  const double m0 = tr.totals.front()[0];
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    CHECK(std::abs(tr.totals[k][0] - m0) <= 1e-11 * m0);
    CHECK(std::abs(tr.totals[k][2] - tr.totals.front()[2]) <= 1e-9 * tr.totals.front()[2]);
    if (k > 0) CHECK(tr.entropy[k] <= tr.entropy[k - 1] + 1e-10);
  }
  CHECK(tr.snapshots.back().minCoeff() >= 0.0);
}

TEST_CASE("homogeneous BGK entropy is non-increasing each step") {
  const auto grid = shared_grid(8.0, 32);
  std::mt19937_64 rng(4);
  const KineticState s = uniform_state(random_mixture(rng, *grid), grid, 2);
  const KineticTrajectory tr = run_reference(s, CollisionModel::bgk(0.1), 0.45, {0.0, 0.2}, RunOptions{true});
  for (std::size_t k = 1; k < tr.entropy.size(); ++k) CHECK(tr.entropy[k] <= tr.entropy[k - 1] + 1e-10);
}
