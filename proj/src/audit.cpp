#include <cmath>
#include <string>

#include <json.hpp>

#include "kinred/errors.hpp"
#include "kinred/io.hpp"
#include "kinred/quadrature.hpp"
#include "kinred/stability.hpp"

namespace kinred {

using nlohmann::json;

namespace {

json gusc_entry(const CollisionModel& model, const ScenarioConfig& cfg, const HermiteSpace& space,
                const EquilibriumSubspaces& sub, bool* pass) {
  try {
    model.validate(space.dimension);
  } catch (const ParameterError& e) {
    return {{"skipped", e.what()}};
  }
  double claim = default_lambda_claim(model);
  if (cfg.audit.lambda_claim && cfg.collision.kind == model.kind) claim = *cfg.audit.lambda_claim;
  const Eigen::MatrixXd d = linearized_collision_matrix(model, space, sub);
  const GuscReport r = gusc_check(d, EquilibriumSubspaces::projector(sub.w0), claim);
  *pass = *pass && r.pass && r.gwsc_pass && r.kernel_defect <= 1e-10;
  return {{"tau", model.tau},
          {"prandtl", model.prandtl},
          {"worst_quotient", r.worst_quotient},
          {"lambda_claim", claim},
          {"pass", r.pass},
          {"gwsc_pass", r.gwsc_pass},
          {"kernel_defect", r.kernel_defect}};
}

}  // namespace

std::string audit_json(const ScenarioConfig& cfg, bool* all_pass) {
  bool pass = true;
  json out;
  const double theta_max = cfg.audit.theta_max;
  const double bound = 8.0 * std::sqrt(theta_max);
  const QuadratureRule grid = truncated_rule(bound, cfg.velocity_cells);
  SamplingBox box;
  box.theta_max = theta_max;
  box.theta_min = 0.5 * theta_max;

  const HyperbolicityAudit h =
      hyperbolicity_audit(cfg.manifold, cfg.audit.samples, grid, cfg.seed, box);
  out["hyperbolicity"] = {{"manifold", cfg.manifold.name()},
                          {"samples", h.samples},
                          {"cholesky_failures", h.cholesky_failures},
                          {"max_asymmetry", h.max_asymmetry},
                          {"pass", h.pass}};
  pass = pass && h.pass;

  const SpeedAudit s =
      propagation_speed_audit(cfg.manifold, cfg.audit.samples, bound, grid, cfg.seed, box);
  out["speed"] = {{"manifold", cfg.manifold.name()},
                  {"samples", s.samples},
                  {"max_radius", s.max_radius},
                  {"L", s.bound},
                  {"margin", s.margin},
                  {"pass", s.pass}};
  pass = pass && s.pass;

  const MomentState m =
      MomentState::equilibrium(cfg.initial.rho, cfg.initial.u, cfg.initial.theta);
  const HermiteSpace space = make_hermite_space(cfg.audit.dimension, cfg.audit.hermite_degree, m);
  const EquilibriumSubspaces sub = equilibrium_subspaces(space);
  const double tau = cfg.collision.tau;
  const double pr = cfg.collision.prandtl;
  out["gusc"] = {
      {"dimension", space.dimension},
      {"hermite_degree", space.max_degree},
      {"bgk", gusc_entry(CollisionModel::bgk(tau), cfg, space, sub, &pass)},
      {"shakhov", gusc_entry(CollisionModel::shakhov(tau, pr), cfg, space, sub, &pass)},
      {"esbgk", gusc_entry(CollisionModel::esbgk(tau, pr), cfg, space, sub, &pass)},
  };

  if (cfg.manifold.kind == ManifoldKind::EntropyClosure && cfg.manifold.order < 3) {
    out["yong"] = {{"skipped", "entropy_closure with n < 3 contains no Maxwellian"}};
  } else {
    const QuadratureRule yg = truncated_rule(cfg.half_width(), cfg.velocity_cells);
    const EquilibriumSystem sys = equilibrium_system(cfg.manifold, m, cfg.collision, yg);
    const YongReport y = yong_conditions_check(sys.a0, sys.jacobian, sys.qu, sys.equilibrium_basis);
    const bool dissipative = cfg.collision.kind == CollisionKind::None ? y.weak_pass
                                                                       : y.dissipative_pass;
    const bool ok = y.block_pass && y.symmetric_pass && dissipative && y.weak_pass;
    out["yong"] = {{"manifold", cfg.manifold.name()},
                   {"collision", to_string(cfg.collision.kind)},
                   {"block_defect", y.block_defect},
                   {"block_pass", y.block_pass},
                   {"symmetrizer_defect", y.symmetrizer_defect},
                   {"symmetrizer_relative", y.symmetrizer_relative},
                   {"symmetric_pass", y.symmetric_pass},
                   {"dissipation_constant",
                    std::isinf(y.dissipation) ? json(nullptr) : json(y.dissipation)},
                   {"dissipative_pass", y.dissipative_pass},
                   {"weak_max", y.weak_max},
                   {"weak_pass", y.weak_pass},
                   {"pass", ok}};
    pass = pass && ok;
  }
  out["pass"] = pass;
  if (all_pass) *all_pass = pass;
  return out.dump(2) + "\n";
}

}  // namespace kinred
