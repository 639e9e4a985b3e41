#include "kinred/reference_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinred/errors.hpp"
#include "kinred/parallel.hpp"

namespace kinred {

double max_transport_dt(const DistributionField& f) {
  const double speed = std::max(f.grid->half_width(), f.grid->nodes().cwiseAbs().maxCoeff());
  if (!std::isfinite(speed)) return f.mesh.dx() / f.grid->nodes().cwiseAbs().maxCoeff();
  return f.mesh.dx() / speed;
}

KineticState transport_step(const KineticState& state, double dt) {
  const DistributionField& f = state.f;
  if (!(dt >= 0.0) || dt > max_transport_dt(f) * (1.0 + 1e-12)) {
    throw ParameterError("transport_step: dt = " + std::to_string(dt) +
                         " violates the CFL bound dx / L = " + std::to_string(max_transport_dt(f)));
  }
  KineticState next = state;
  next.time = state.time + dt;
  const int cells = f.mesh.cells;
  const auto& xi = f.grid->nodes();
  const double ratio = dt / f.mesh.dx();
  parallel_for(static_cast<int>(xi.size()), [&](int j) {
    const double nu = xi[j] * ratio;
    for (int i = 0; i < cells; ++i) {
      const double here = f.values(i, j);
      const double diff = nu > 0.0 ? here - f.values(f.mesh.wrap(i - 1), j)
                                   : f.values(f.mesh.wrap(i + 1), j) - here;
      next.f.values(i, j) = here - nu * diff;
    }
  });
  return next;
}

KineticState relaxation_step(const KineticState& state, const CollisionModel& model, double dt) {
  if (model.kind == CollisionKind::None || dt == 0.0) {
    KineticState next = state;
    next.time = state.time + dt;
    return next;
  }
  model.validate(1);
  KineticState next = state;
  next.time = state.time + dt;
  const QuadratureRule& grid = *state.f.grid;
  const double rate = model.rate();
  parallel_for(state.f.mesh.cells, [&](int i) {
    Profile f = state.f.cell(i);
    try {
      if (model.kind == CollisionKind::BGK) {
        // (rho, u, theta) are invariant, so the target is frozen.
        const Profile feq = maxwellian(compute_moments(f, grid), grid);
        f = feq + (f - feq) * std::exp(-dt * rate);
      } else {
        const int substeps = std::max(1, static_cast<int>(std::ceil(dt * rate / 0.1)));
        const double h = dt / substeps;
        for (int k = 0; k < substeps; ++k) {
          const Profile k1 = collision_apply(model, f, grid);
          const Profile mid = f + h * k1;
          f = 0.5 * (f + mid + h * collision_apply(model, mid, grid));
        }
        compute_moments(f, grid);
      }
    } catch (const RealizabilityError& e) {
      throw RealizabilityError("relaxation_step: cell " + std::to_string(i) + ": " + e.what());
    }
    next.f.set_cell(i, f);
  });
  return next;
}

KineticState strang_step(const KineticState& state, const CollisionModel& model, double dt) {
  KineticState s = relaxation_step(state, model, 0.5 * dt);
  s = transport_step(s, dt);
  s = relaxation_step(s, model, 0.5 * dt);
  s.time = state.time + dt;
  return s;
}

Eigen::VectorXd kinetic_totals(const DistributionField& f) {
  const Eigen::MatrixXd inv = collision_invariants(*f.grid);
  const Eigen::MatrixXd weighted = f.grid->weights().asDiagonal() * inv;
  // Column sums over cells first, in a fixed order.
  Eigen::VectorXd per_node = Eigen::VectorXd::Zero(f.values.cols());
  for (int i = 0; i < f.mesh.cells; ++i) per_node += f.values.row(i).transpose();
  return weighted.transpose() * per_node * f.mesh.dx();
}

KineticTrajectory run_reference(KineticState state, const CollisionModel& model, double cfl,
                                const std::vector<double>& times, const RunOptions& opts) {
  if (times.empty()) throw ParameterError("run_reference: no output times");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ParameterError("run_reference: cfl must lie in (0, 1]");
  KineticTrajectory traj;
  traj.mesh = state.f.mesh;
  traj.grid = state.f.grid;
  auto record = [&](const KineticState& s) {
    traj.times.push_back(s.time);
    traj.snapshots.push_back(s.f.values);
    traj.totals.push_back(kinetic_totals(s.f));
    traj.entropy.push_back(entropy(s.f));
  };
  state.time = times.front();
  record(state);
  const double dt_max = cfl * max_transport_dt(state.f);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double target = times[k];
    while (state.time < target) {
      double dt = dt_max;
      const bool last = state.time + dt >= target * (1.0 - 1e-14);
      if (last) dt = target - state.time;
      if (!(dt > 0.0)) break;
      state = strang_step(state, model, dt);
      if (last) state.time = target;
      if (!state.f.all_finite()) {
        throw BlowUpError("reference solver: non-finite values at t = " + std::to_string(state.time));
      }
      ++traj.steps;
      if (opts.every_step && !last) record(state);
    }
    record(state);
  }
  return traj;
}

KineticTrajectory run_reference(const ScenarioConfig& scenario, const RunOptions& opts) {
  scenario.validate();
  return run_reference(KineticState{scenario.initial_field(), 0.0}, scenario.collision, scenario.cfl,
                       scenario.output_times(), opts);
}

}  // namespace kinred
