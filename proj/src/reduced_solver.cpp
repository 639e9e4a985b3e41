#include "kinred/reduced_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "kinred/errors.hpp"
#include "kinred/parallel.hpp"
#include "kinred/projection.hpp"

namespace kinred {

namespace {

constexpr double kBlowUpRadius = 1e6;

}  // namespace

Eigen::VectorXd pencil_eigenvalues(const AnsatzPoint& p, const QuadratureRule& grid) {
  const Eigen::MatrixXd frame = natural_frame(p, grid);
  const Profile w = metric_weight(p, grid).weight;
  const Eigen::MatrixXd a0 = assemble_gram(frame, w, grid).matrix;
  const Eigen::MatrixXd a1 = assemble_flux(frame, w, grid).matrix;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a1, a0, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw DegenerateChartError("pencil_eigenvalues: A0 is not positive definite at " +
                               p.manifold.name());
  }
  return es.eigenvalues();
}

double spectral_radius(const AnsatzPoint& p, const QuadratureRule& grid) {
  return pencil_eigenvalues(p, grid).cwiseAbs().maxCoeff();
}

DistributionField ReducedState::evaluate_field() const {
  DistributionField f(grid, mesh);
  for (int i = 0; i < mesh.cells; ++i) f.set_cell(i, evaluate(omega[static_cast<std::size_t>(i)], *grid));
  return f;
}

Eigen::VectorXd ReducedState::moment_totals(int count) const {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(count);
  for (int i = 0; i < mesh.cells; ++i) {
    if (conservative() && moments.cols() >= count) {
      total += moments.row(i).head(count).transpose();
    } else {
      total += moments_of(omega[static_cast<std::size_t>(i)], *grid, count);
    }
  }
  return total * mesh.dx();
}

double ReducedState::entropy() const { return kinred::entropy(evaluate_field()); }

const std::vector<double>& ReducedState::radii() const {
  if (radius_cache.size() != omega.size()) {
    std::vector<double> r(omega.size());
    parallel_for(mesh.cells, [&](int i) {
      r[static_cast<std::size_t>(i)] = spectral_radius(omega[static_cast<std::size_t>(i)], *grid);
    });
    radius_cache = std::move(r);
  }
  return radius_cache;
}

ReducedState make_reduced_state(const Manifold& manifold, const DistributionField& f0) {
  ReducedState s;
  s.grid = f0.grid;
  s.mesh = f0.mesh;
  s.manifold = manifold;
  s.omega = project_initial(manifold, f0);
  if (s.conservative()) {
    s.moments.resize(f0.mesh.cells, manifold.order + 3);
    for (int i = 0; i < f0.mesh.cells; ++i) {
      s.moments.row(i) = raw_moments(f0.cell(i), *f0.grid, manifold.order + 3).transpose();
    }
  }
  return s;
}

double stable_dt(const ReducedState& state, const CollisionModel& model, double cfl,
                 double* max_radius) {
  double amax = 0.0;
  for (double r : state.radii()) {
    if (!std::isfinite(r) || r > kBlowUpRadius) {
      throw BlowUpError("reduced solver: spectral radius " + std::to_string(r) + " at t = " +
                        std::to_string(state.time));
    }
    amax = std::max(amax, r);
  }
  if (max_radius) *max_radius = amax;
  double dt = amax > 0.0 ? cfl * state.mesh.dx() / amax : std::numeric_limits<double>::infinity();
  // Resolve the relaxation time as well; explicit RK2 on a stiff source is
  // only accurate for dt well below tau.
  const double rate = model.rate();
  if (rate > 0.0) dt = std::min(dt, 0.25 * cfl / rate);
  return dt;
}

namespace {

struct CellData {
  Eigen::VectorXd flux;    // conservative path: int xi^{k+1} f_hat
  Eigen::VectorXd source;  // conservative: int xi^k Q; generic: A0^{-1} q
  Eigen::MatrixXd a0_inv_a1;
  double radius = 0.0;
};

CellData cell_data(const ReducedState& s, const CollisionModel& model, int i) {
  const AnsatzPoint& p = s.omega[static_cast<std::size_t>(i)];
  const QuadratureRule& grid = *s.grid;
  CellData d;
  d.radius = s.radius_cache[static_cast<std::size_t>(i)];
  if (s.conservative()) {
    const int m = s.manifold.order + 3;
    const Profile f = evaluate(p, grid);
    const Eigen::VectorXd raw = raw_moments(f, grid, m + 1);
    d.flux = raw.tail(m);
    d.source = raw_moments(collision_apply(model, f, grid), grid, m);
  } else {
    const ReducedCoefficients rc = reduced_coefficients(p, model, grid);
    const Eigen::LLT<Eigen::MatrixXd> llt(rc.a0);
    d.source = llt.solve(rc.q);
    d.a0_inv_a1 = llt.solve(rc.a1);
  }
  return d;
}

/// Time derivative of the evolved variables (moments or omega) per cell.
Eigen::MatrixXd rhs(const ReducedState& s, const CollisionModel& model) {
  const int n = s.mesh.cells;
  s.radii();
  std::vector<CellData> data(static_cast<std::size_t>(n));
  parallel_for(n, [&](int i) { data[static_cast<std::size_t>(i)] = cell_data(s, model, i); });
  const double dx = s.mesh.dx();
  const int dim = s.conservative() ? s.manifold.order + 3 : s.manifold.dimension();
  Eigen::MatrixXd out(n, dim);
  auto at = [&](int i) -> const CellData& { return data[static_cast<std::size_t>(s.mesh.wrap(i))]; };
  auto var = [&](int i) -> Eigen::VectorXd {
    const int j = s.mesh.wrap(i);
    if (s.conservative()) return s.moments.row(j).transpose();
    return s.omega[static_cast<std::size_t>(j)].omega;
  };
  // Interface (i - 1/2) quantities first so the flux difference telescopes.
  if (s.conservative()) {
    std::vector<Eigen::VectorXd> face(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double a = std::max(at(i - 1).radius, at(i).radius);
      face[static_cast<std::size_t>(i)] =
          0.5 * (at(i - 1).flux + at(i).flux) - 0.5 * a * (var(i) - var(i - 1));
    }
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd div =
          (face[static_cast<std::size_t>(s.mesh.wrap(i + 1))] - face[static_cast<std::size_t>(i)]) / dx;
      out.row(i) = (at(i).source - div).transpose();
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd w = var(i), wl = var(i - 1), wr = var(i + 1);
      const double al = std::max(at(i - 1).radius, at(i).radius);
      const double ar = std::max(at(i).radius, at(i + 1).radius);
      const Eigen::VectorXd central = (wr - wl) / (2.0 * dx);
      const Eigen::VectorXd diss = (ar * (wr - w) - al * (w - wl)) / (2.0 * dx);
      out.row(i) = (at(i).source - at(i).a0_inv_a1 * central + diss).transpose();
    }
  }
  return out;
}

/// New state from updated evolved variables; recovers omega for the
/// conservative path with the cell's previous omega (then a neighbour's) as
/// the starting point.
ReducedState with_variables(const ReducedState& base, const Eigen::MatrixXd& vars, double time) {
  ReducedState next = base;
  next.time = time;
  next.radius_cache.clear();
  const int n = base.mesh.cells;
  if (base.conservative()) {
    next.moments = vars;
    parallel_for(n, [&](int i) {
      const Eigen::VectorXd c = vars.row(i).transpose();
      const auto& own = base.omega[static_cast<std::size_t>(i)];
      try {
        next.omega[static_cast<std::size_t>(i)] =
            params_from_moments(base.manifold.order, c, *base.grid, own);
        return;
      } catch (const Error&) {
      }
      for (int nb : {i - 1, i + 1}) {
        try {
          next.omega[static_cast<std::size_t>(i)] = params_from_moments(
              base.manifold.order, c, *base.grid, base.omega[static_cast<std::size_t>(base.mesh.wrap(nb))]);
          return;
        } catch (const Error&) {
        }
      }
      try {
        params_from_moments(base.manifold.order, c, *base.grid, own);
      } catch (const Error& e) {
        throw StepError("parameter recovery failed in cell " + std::to_string(i) + " at t = " +
                        std::to_string(time) + ": " + e.what());
      }
    });
  } else {
    parallel_for(n, [&](int i) {
      AnsatzPoint p{base.manifold, vars.row(i).transpose()};
      try {
        if (!p.omega.allFinite()) throw RealizabilityError("non-finite parameters");
        p.validate();
        evaluate(p, *base.grid);
      } catch (const Error& e) {
        throw StepError("state left the manifold in cell " + std::to_string(i) + " at t = " +
                        std::to_string(time) + ": " + e.what());
      }
      next.omega[static_cast<std::size_t>(i)] = std::move(p);
    });
  }
  return next;
}

Eigen::MatrixXd variables(const ReducedState& s) {
  if (s.conservative()) return s.moments;
  Eigen::MatrixXd v(s.mesh.cells, s.manifold.dimension());
  for (int i = 0; i < s.mesh.cells; ++i) v.row(i) = s.omega[static_cast<std::size_t>(i)].omega.transpose();
  return v;
}

}  // namespace

ReducedState step(const ReducedState& state, const CollisionModel& model, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("step: dt must be positive");
  const Eigen::MatrixXd u0 = variables(state);
  const Eigen::MatrixXd u1 = u0 + dt * rhs(state, model);
  const ReducedState s1 = with_variables(state, u1, state.time + dt);
  const Eigen::MatrixXd u2 = 0.5 * u0 + 0.5 * (u1 + dt * rhs(s1, model));
  return with_variables(s1, u2, state.time + dt);
}

ReducedState step(const ReducedState& state, const CollisionModel& model, double cfl,
                  StepInfo* info) {
  if (!(cfl > 0.0 && cfl < 1.0)) throw ParameterError("step: cfl must lie in (0, 1)");
  double radius = 0.0;
  const double dt = stable_dt(state, model, cfl, &radius);
  if (info) *info = {dt, radius};
  return step(state, model, dt);
}

ReducedTrajectory run_reduced(ReducedState state, const CollisionModel& model, double cfl,
                              const std::vector<double>& times, const RunOptions& opts) {
  if (times.empty()) throw ParameterError("run_reduced: no output times");
  ReducedTrajectory traj;
  traj.manifold = state.manifold;
  traj.mesh = state.mesh;
  traj.grid = state.grid;
  auto record = [&](const ReducedState& s) {
    traj.times.push_back(s.time);
    traj.omega.push_back(s.omega);
    traj.totals.push_back(s.moment_totals(3));
    traj.entropy.push_back(s.entropy());
  };
  state.time = times.front();
  record(state);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double target = times[k];
    while (state.time < target) {
      double radius = 0.0;
      double dt = stable_dt(state, model, cfl, &radius);
      traj.max_radius = std::max(traj.max_radius, radius);
      const bool last = state.time + dt >= target * (1.0 - 1e-14);
      if (last) dt = target - state.time;
      if (!(dt > 0.0)) break;
      state = step(state, model, dt);
      if (last) state.time = target;
      ++traj.steps;
      if (opts.every_step && !last) record(state);
    }
    record(state);
  }
  return traj;
}

ReducedTrajectory run_reduced(const ScenarioConfig& scenario, const RunOptions& opts) {
  scenario.validate();
  ReducedState state = make_reduced_state(scenario.manifold, scenario.initial_field());
  return run_reduced(std::move(state), scenario.collision, scenario.cfl, scenario.output_times(),
                     opts);
}

}  // namespace kinred
