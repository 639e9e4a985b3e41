#include "kinred/error_estimator.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "kinred/errors.hpp"
#include "kinred/hermite.hpp"
#include "kinred/parallel.hpp"
#include "kinred/projection.hpp"

namespace kinred {

namespace {

void check_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw ParameterError("norm exponent p must lie in (1, inf), got " + std::to_string(p));
  }
}

constexpr int kMaxCellsPerTime = 32;

}  // namespace

double field_norm(const FieldMatrix& values, const QuadratureRule& grid, double dx, double p) {
  check_exponent(p);
  if (values.cols() != static_cast<Eigen::Index>(grid.size())) {
    throw ParameterError("field_norm: column count does not match the velocity grid");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const Profile row = values.row(i).transpose().cwiseAbs().array().pow(p).matrix();
    total += dx * grid.integrate(row);
  }
  return std::pow(total, 1.0 / p);
}

FieldMatrix residual_field(const std::vector<AnsatzPoint>& omega, const PeriodicMesh& mesh,
                           const QuadratureRule& grid, const CollisionModel& model) {
  const int cells = mesh.cells;
  if (static_cast<int>(omega.size()) != cells) {
    throw ParameterError("residual_field: omega has " + std::to_string(omega.size()) +
                         " cells, mesh has " + std::to_string(cells));
  }
  FieldMatrix f(cells, static_cast<Eigen::Index>(grid.size()));
  parallel_for(cells, [&](int i) { f.row(i) = evaluate(omega[i], grid).transpose(); });
  FieldMatrix r(cells, f.cols());
  const double inv = 1.0 / (2.0 * mesh.dx());
  parallel_for(cells, [&](int i) {
    const Profile df = (f.row(mesh.wrap(i + 1)) - f.row(mesh.wrap(i - 1))).transpose() * inv;
    r.row(i) = residual_from_gradient(omega[i], df, model, grid).transpose();
  });
  return r;
}

double residual_norm(const std::vector<AnsatzPoint>& omega, const PeriodicMesh& mesh,
                     const QuadratureRule& grid, const CollisionModel& model, double p) {
  check_exponent(p);
  return field_norm(residual_field(omega, mesh, grid, model), grid, mesh.dx(), p);
}

double lipschitz_quotient(const CollisionModel& model, const Profile& f1, const Profile& f2,
                          const QuadratureRule& grid, double p) {
  check_exponent(p);
  const Eigen::ArrayXd diff = (f1 - f2).array().abs();
  const Eigen::ArrayXd dq =
      (collision_apply(model, f1, grid) - collision_apply(model, f2, grid)).array().abs();
  const double den = grid.integrate(Profile(diff.pow(p).matrix()));
  if (den <= 0.0) return 0.0;
  return grid.integrate(Profile((diff.pow(p - 1.0) * dq).matrix())) / den;
}

double lipschitz_estimate(const CollisionModel& model, const std::vector<Profile>& samples,
                          const QuadratureRule& grid, double perturbation_scale, double p,
                          std::uint64_t seed, int pairs_per_sample) {
  check_exponent(p);
  if (!(perturbation_scale > 0.0)) throw ParameterError("lipschitz_estimate: scale must be positive");
  if (model.kind == CollisionKind::None) return 0.0;
  const int n = static_cast<int>(samples.size());
  std::vector<double> best(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, [&](int s) {
    // Per-sample stream keeps the result independent of the thread count.
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s + 1));
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const Profile& f = samples[s];
    const MomentState m = compute_moments(f, grid);
    const Eigen::ArrayXd w = (grid.nodes().array() - m.u) / std::sqrt(m.theta);
    for (int k = 0; k < pairs_per_sample; ++k) {
      double c[5];
      for (double& v : c) v = coef(rng);
      Eigen::ArrayXd poly = Eigen::ArrayXd::Zero(w.size());
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        const auto he = hermite_he(w[i], 4);
        for (int j = 0; j <= 4; ++j) poly[i] += c[j] * he[j] / std::sqrt(factorial(j));
      }
      // Keep f + h nonnegative: |h| <= scale * f pointwise.
      poly /= poly.abs().maxCoeff();
      const Profile f1 = (f.array() * (1.0 + perturbation_scale * poly)).matrix();
      best[s] = std::max(best[s], lipschitz_quotient(model, f1, f, grid, p));
    }
  });
  double worst = 0.0;
  for (double b : best) worst = std::max(worst, b);
  return 1.5 * worst;
}

std::vector<double> gronwall_bound(double delta0, const std::vector<double>& times,
                                   const std::vector<double>& residuals, double lipschitz) {
  if (!(lipschitz >= 0.0)) throw ParameterError("gronwall_bound: L_Q must be nonnegative");
  if (!(delta0 >= 0.0)) throw ParameterError("gronwall_bound: delta0 must be nonnegative");
  if (times.size() != residuals.size()) {
    throw ParameterError("gronwall_bound: times and residuals differ in length");
  }
  std::vector<double> bound(times.size(), delta0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double integral = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double h = times[j + 1] - times[j];
      const double left = std::exp(lipschitz * (times[i] - times[j])) * residuals[j];
      const double right = std::exp(lipschitz * (times[i] - times[j + 1])) * residuals[j + 1];
      integral += 0.5 * h * (left + right);
    }
    bound[i] = delta0 + integral;
  }
  return bound;
}

std::vector<double> actual_error(const ReducedTrajectory& reduced, const KineticTrajectory& reference,
                                 double p) {
  check_exponent(p);
  const QuadratureRule& g = *reduced.grid;
  const QuadratureRule& h = *reference.grid;
  if (reduced.mesh.cells != reference.mesh.cells ||
      std::abs(reduced.mesh.length - reference.mesh.length) > 1e-12 || g.size() != h.size() ||
      std::abs(g.half_width() - h.half_width()) > 1e-12 || (g.nodes() - h.nodes()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ParameterError("actual_error: reduced and reference grids do not match");
  }
  if (reduced.times.size() != reference.times.size()) {
    throw ParameterError("actual_error: output time counts differ");
  }
  std::vector<double> out(reduced.times.size());
  for (std::size_t t = 0; t < reduced.times.size(); ++t) {
    if (std::abs(reduced.times[t] - reference.times[t]) > 1e-12) {
      throw ParameterError("actual_error: output times differ at index " + std::to_string(t));
    }
    const auto& omega = reduced.omega[t];
    FieldMatrix diff = reference.snapshots[t];
    parallel_for(static_cast<int>(omega.size()),
                 [&](int i) { diff.row(i) = evaluate(omega[i], g).transpose() - diff.row(i); });
    out[t] = field_norm(diff, g, reduced.mesh.dx(), p);
  }
  return out;
}

std::vector<double> ErrorReport::ratio() const {
  std::vector<double> r(bound.size());
  for (std::size_t i = 0; i < bound.size(); ++i) {
    r[i] = actual[i] > 0.0 ? bound[i] / actual[i] : std::numeric_limits<double>::infinity();
  }
  return r;
}

bool ErrorReport::violated() const {
  for (std::size_t i = 0; i < bound.size(); ++i) {
    if (actual[i] > bound[i]) return true;
  }
  return false;
}

ErrorReport estimate_error(const ReducedTrajectory& reduced, const KineticTrajectory& reference,
                           const CollisionModel& model, double p, std::uint64_t seed,
                           double perturbation_scale) {
  ErrorReport rep;
  rep.p = p;
  rep.times = reduced.times;
  rep.actual = actual_error(reduced, reference, p);
  const QuadratureRule& grid = *reduced.grid;
  std::vector<Profile> samples;
  const int cells = reduced.mesh.cells;
  const int stride = std::max(1, cells / kMaxCellsPerTime);
  for (std::size_t t = 0; t < reduced.times.size(); ++t) {
    rep.residual_norms.push_back(residual_norm(reduced.omega[t], reduced.mesh, grid, model, p));
    for (int i = 0; i < cells; i += stride) samples.push_back(evaluate(reduced.omega[t][i], grid));
  }
  rep.lipschitz = lipschitz_estimate(model, samples, grid, perturbation_scale, p, seed);
  const double delta0 = rep.actual.empty() ? 0.0 : rep.actual.front();
  rep.bound = gronwall_bound(delta0, rep.times, rep.residual_norms, rep.lipschitz);
  return rep;
}

}  // namespace kinred
