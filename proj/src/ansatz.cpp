#include "kinred/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "kinred/errors.hpp"
#include "kinred/hermite.hpp"

namespace kinred {

namespace {

constexpr double kLogWeightCap = 690.7755278982137;  // log(1e300)
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

/// Coefficients of sum_j beta_j ((xi-u)/sqrt(theta))^j in powers of xi.
Eigen::VectorXd scaled_to_raw(const Eigen::VectorXd& beta, double u, double theta) {
  const int n = static_cast<int>(beta.size());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const double bj = beta[j] * std::pow(theta, -0.5 * j);
    for (int i = 0; i <= j; ++i) {
      alpha[i] += bj * binomial(j, i) * std::pow(-u, j - i);
    }
  }
  return alpha;
}

Eigen::ArrayXd horner(const Eigen::VectorXd& coeffs, const Eigen::ArrayXd& x) {
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(x.size());
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * x + coeffs[k];
  return acc;
}

void check_nonnegative(const Profile& f, const char* family) {
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw RealizabilityError(std::string(family) + ": non-finite value at node " +
                               std::to_string(i));
    }
    if (f[i] < 0.0) {
      throw RealizabilityError(std::string(family) + ": negative value " + std::to_string(f[i]) +
                               " at node " + std::to_string(i));
    }
  }
}

/// He_k(w) sampled per node, columns k = 0..max_degree.
Eigen::MatrixXd hermite_table(const Eigen::ArrayXd& w, int max_degree) {
  Eigen::MatrixXd table(w.size(), max_degree + 1);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const auto he = hermite_he(w[i], max_degree);
    for (int k = 0; k <= max_degree; ++k) table(i, k) = he[static_cast<std::size_t>(k)];
  }
  return table;
}

}  // namespace

int Manifold::dimension() const {
  switch (kind) {
    case ManifoldKind::ConservativeMoment: return order + 3;
    case ManifoldKind::HermitePerturbation: return 3 + std::max(0, order - 2);
    case ManifoldKind::EntropyClosure: return order;
  }
  return 0;
}

const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::ConservativeMoment: return "conservative_moment";
    case ManifoldKind::HermitePerturbation: return "hermite_perturbation";
    case ManifoldKind::EntropyClosure: return "entropy_closure";
  }
  return "?";
}

std::optional<ManifoldKind> manifold_kind_from_string(const std::string& name) {
  if (name == "conservative_moment") return ManifoldKind::ConservativeMoment;
  if (name == "hermite_perturbation") return ManifoldKind::HermitePerturbation;
  if (name == "entropy_closure") return ManifoldKind::EntropyClosure;
  return std::nullopt;
}

std::string Manifold::name() const {
  return std::string(to_string(kind)) + "(" + std::to_string(order) + ")";
}

void Manifold::validate() const {
  switch (kind) {
    case ManifoldKind::ConservativeMoment:
      if (order < 0 || order > 10) throw ParameterError("conservative_moment order must be in [0, 10]");
      break;
    case ManifoldKind::HermitePerturbation:
      if (order < 2 || order > 12) throw ParameterError("hermite_perturbation order must be in [2, 12]");
      break;
    case ManifoldKind::EntropyClosure:
      if (order < 1 || order > 7) throw ParameterError("entropy_closure order must be in [1, 7]");
      break;
  }
}

AnsatzPoint AnsatzPoint::conservative(double u, double theta, const Eigen::VectorXd& alpha) {
  const int n = static_cast<int>(alpha.size()) - 1;
  AnsatzPoint p{Manifold::conservative_moment(n), Eigen::VectorXd(n + 3)};
  p.omega.head(n + 1) = alpha;
  p.omega[n + 1] = u;
  p.omega[n + 2] = theta;
  p.validate();
  return p;
}

AnsatzPoint AnsatzPoint::hermite(double rho, double u, double theta,
                                 const Eigen::VectorXd& free_alpha) {
  const int n = static_cast<int>(free_alpha.size()) + 2;
  AnsatzPoint p{Manifold::hermite_perturbation(n), Eigen::VectorXd(free_alpha.size() + 3)};
  p.omega << rho, u, theta, free_alpha;
  p.validate();
  return p;
}

AnsatzPoint AnsatzPoint::entropy_closure(const Eigen::VectorXd& alpha) {
  AnsatzPoint p{Manifold::entropy_closure(static_cast<int>(alpha.size())), alpha};
  p.validate();
  return p;
}

int AnsatzPoint::u_index() const {
  switch (manifold.kind) {
    case ManifoldKind::ConservativeMoment: return manifold.order + 1;
    case ManifoldKind::HermitePerturbation: return 1;
    case ManifoldKind::EntropyClosure: return -1;
  }
  return -1;
}

int AnsatzPoint::theta_index() const {
  switch (manifold.kind) {
    case ManifoldKind::ConservativeMoment: return manifold.order + 2;
    case ManifoldKind::HermitePerturbation: return 2;
    case ManifoldKind::EntropyClosure: return -1;
  }
  return -1;
}

double AnsatzPoint::u() const {
  if (manifold.kind == ManifoldKind::EntropyClosure) {
    // Gaussian part exp(a1 + a2 xi + a3 xi^2) has centre -a2 / (2 a3).
    if (omega.size() < 3 || !(omega[2] < 0.0)) return 0.0;
    return -omega[1] / (2.0 * omega[2]);
  }
  return omega[u_index()];
}

double AnsatzPoint::theta() const {
  if (manifold.kind == ManifoldKind::EntropyClosure) {
    if (omega.size() < 3 || !(omega[2] < 0.0)) return 1.0;
    return -1.0 / (2.0 * omega[2]);
  }
  return omega[theta_index()];
}

void AnsatzPoint::validate() const {
  manifold.validate();
  if (omega.size() != manifold.dimension()) {
    throw ParameterError(manifold.name() + " expects " + std::to_string(manifold.dimension()) +
                         " parameters, got " + std::to_string(omega.size()));
  }
  if (!omega.allFinite()) throw RealizabilityError("non-finite ansatz parameters");
  if (manifold.kind != ManifoldKind::EntropyClosure && !(theta() > 0.0)) {
    throw RealizabilityError("ansatz temperature must be positive");
  }
  if (manifold.kind == ManifoldKind::HermitePerturbation && !(omega[0] > 0.0)) {
    throw RealizabilityError("ansatz density must be positive");
  }
}

namespace {

/// Polynomial factor 1 + sum alpha_k He_k(w) and its companion
/// sum a_k He_{k+1}(w) (a_0 = 1) used by the u and theta derivatives.
struct HermiteFactors {
  Eigen::ArrayXd w, phi, s, t;
  Eigen::MatrixXd he;
};

HermiteFactors hermite_factors(const AnsatzPoint& p, const QuadratureRule& grid) {
  const int n = p.manifold.order;
  const double u = p.omega[1];
  const double theta = p.omega[2];
  HermiteFactors h;
  h.w = (grid.nodes().array() - u) / std::sqrt(theta);
  h.phi = kInvSqrt2Pi * (-0.5 * h.w.square()).exp();
  h.he = hermite_table(h.w, n + 1);
  h.s = Eigen::ArrayXd::Ones(h.w.size());
  h.t = h.he.col(1).array();
  for (int k = 3; k <= n; ++k) {
    const double a = p.omega[k];
    h.s += a * h.he.col(k).array();
    h.t += a * h.he.col(k + 1).array();
  }
  return h;
}

Eigen::ArrayXd closure_exponent(const AnsatzPoint& p, const QuadratureRule& grid) {
  return horner(p.omega, grid.nodes().array());
}

}  // namespace

Profile evaluate(const AnsatzPoint& p, const QuadratureRule& grid) {
  p.validate();
  switch (p.manifold.kind) {
    case ManifoldKind::ConservativeMoment: {
      const int n = p.manifold.order;
      const Eigen::ArrayXd xi = grid.nodes().array();
      const Eigen::ArrayXd gauss = (-(xi - p.u()).square() / (2.0 * p.theta())).exp();
      Profile f = (gauss * horner(p.omega.head(n + 1), xi)).matrix();
      check_nonnegative(f, "conservative_moment");
      return f;
    }
    case ManifoldKind::HermitePerturbation: {
      const auto h = hermite_factors(p, grid);
      Profile f = (p.omega[0] / std::sqrt(p.theta()) * h.phi * h.s).matrix();
      check_nonnegative(f, "hermite_perturbation");
      return f;
    }
    case ManifoldKind::EntropyClosure: {
      const Eigen::ArrayXd e = closure_exponent(p, grid);
      if ((e > 700.0).any()) throw RealizabilityError("entropy_closure: exponent overflow");
      return e.exp().matrix();
    }
  }
  return {};
}

Eigen::MatrixXd tangent_basis(const AnsatzPoint& p, const QuadratureRule& grid) {
  const Profile f = evaluate(p, grid);
  const Eigen::ArrayXd xi = grid.nodes().array();
  const Eigen::Index nodes = xi.size();
  Eigen::MatrixXd basis(nodes, p.manifold.dimension());
  switch (p.manifold.kind) {
    case ManifoldKind::ConservativeMoment: {
      const int n = p.manifold.order;
      const double u = p.u(), theta = p.theta();
      const Eigen::ArrayXd c = xi - u;
      const Eigen::ArrayXd gauss = (-c.square() / (2.0 * theta)).exp();
      Eigen::ArrayXd power = Eigen::ArrayXd::Ones(nodes);
      for (int k = 0; k <= n; ++k) {
        basis.col(k) = (gauss * power).matrix();
        power *= xi;
      }
      basis.col(n + 1) = (c / theta * f.array()).matrix();
      basis.col(n + 2) = (c.square() / (2.0 * theta * theta) * f.array()).matrix();
      break;
    }
    case ManifoldKind::HermitePerturbation: {
      const int n = p.manifold.order;
      const double rho = p.omega[0], theta = p.theta();
      const auto h = hermite_factors(p, grid);
      const double amp = rho / std::sqrt(theta);
      basis.col(0) = (h.phi * h.s / std::sqrt(theta)).matrix();
      basis.col(1) = (rho / theta * h.phi * h.t).matrix();
      basis.col(2) = (-amp / (2.0 * theta) * h.phi * (h.s - h.w * h.t)).matrix();
      for (int k = 3; k <= n; ++k) {
        basis.col(k) = (amp * h.phi * h.he.col(k).array()).matrix();
      }
      break;
    }
    case ManifoldKind::EntropyClosure: {
      Eigen::ArrayXd power = Eigen::ArrayXd::Ones(nodes);
      for (int k = 0; k < p.manifold.order; ++k) {
        basis.col(k) = (power * f.array()).matrix();
        power *= xi;
      }
      break;
    }
  }
  return basis;
}

MetricWeight metric_weight(const AnsatzPoint& p, const QuadratureRule& grid) {
  p.validate();
  Eigen::ArrayXd log_w;
  switch (p.manifold.kind) {
    case ManifoldKind::ConservativeMoment:
    case ManifoldKind::HermitePerturbation:
      log_w = (grid.nodes().array() - p.u()).square() / (2.0 * p.theta());
      break;
    case ManifoldKind::EntropyClosure:
      log_w = -closure_exponent(p, grid);
      break;
  }
  const Eigen::Index bad = (log_w > kLogWeightCap).count();
  if (bad > 0) {
    throw RealizabilityError("metric weight exceeds 1e300 on " + std::to_string(bad) +
                             " nodes; truncation L is too large for this temperature");
  }
  return {log_w.exp().matrix()};
}

Eigen::MatrixXd natural_frame(const AnsatzPoint& p, const QuadratureRule& grid) {
  if (p.manifold.kind != ManifoldKind::ConservativeMoment) return tangent_basis(p, grid);
  p.validate();
  const int top = p.manifold.order + 2;
  const Eigen::ArrayXd w = (grid.nodes().array() - p.u()) / std::sqrt(p.theta());
  const Eigen::ArrayXd gauss = (-0.5 * w.square()).exp();
  Eigen::MatrixXd frame = hermite_table(w, top);
  for (int k = 0; k <= top; ++k) frame.col(k).array() *= gauss;
  return frame;
}

Eigen::VectorXd raw_moments(const Profile& f, const QuadratureRule& grid, int count) {
  Eigen::VectorXd c(count);
  Profile weighted = f;
  for (int k = 0; k < count; ++k) {
    c[k] = grid.integrate(weighted);
    weighted = weighted.cwiseProduct(grid.nodes());
  }
  return c;
}

Eigen::VectorXd moments_of(const AnsatzPoint& p, const QuadratureRule& grid, int count) {
  return raw_moments(evaluate(p, grid), grid, count);
}

namespace {

struct InnerFit {
  Eigen::VectorXd beta;  // coefficients in powers of w
  Eigen::Vector2d residual;
  bool ok = false;
};

/// For fixed (u, theta), matches moments 0..N exactly with the polynomial
/// factor and reports the scaled mismatch of moments N+1 and N+2.
InnerFit fit_polynomial(int order, const Eigen::VectorXd& c, const Eigen::VectorXd& scale,
                        double u, double theta, const QuadratureRule& grid) {
  InnerFit fit;
  if (!(theta > 0.0) || !std::isfinite(u) || !std::isfinite(theta)) return fit;
  const Eigen::ArrayXd xi = grid.nodes().array();
  const Eigen::ArrayXd w = (xi - u) / std::sqrt(theta);
  const Eigen::ArrayXd gw = grid.weights().array() * (-0.5 * w.square()).exp();
  const int rows = order + 3, cols = order + 1;
  // columns: gw * w^j ; rows: xi^k
  Eigen::MatrixXd basis(xi.size(), cols);
  Eigen::ArrayXd power = gw;
  for (int j = 0; j < cols; ++j) {
    basis.col(j) = power.matrix();
    power *= w;
  }
  Eigen::MatrixXd moments(rows, cols);
  Eigen::ArrayXd xk = Eigen::ArrayXd::Ones(xi.size());
  for (int k = 0; k < rows; ++k) {
    moments.row(k) = (xk.matrix().transpose() * basis) / scale[k];
    xk *= xi;
  }
  const Eigen::VectorXd target = c.cwiseQuotient(scale);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(moments.topRows(cols));
  if (!lu.isInvertible()) return fit;
  fit.beta = lu.solve(target.head(cols));
  const Eigen::VectorXd tail = moments.bottomRows(2) * fit.beta - target.tail(2);
  fit.residual = tail;
  fit.ok = fit.beta.allFinite() && tail.allFinite();
  return fit;
}

struct InversionResult {
  bool converged = false;
  double u = 0.0, theta = 1.0;
  InnerFit fit;
};

InversionResult newton_inversion(int order, const Eigen::VectorXd& c, const Eigen::VectorXd& scale,
                                 double u0, double theta0, const QuadratureRule& grid) {
  constexpr int kMaxIterations = 50;
  constexpr int kMaxHalvings = 12;
  constexpr double kTol = 1e-13;
  constexpr double kAcceptTol = 1e-12;

  InversionResult res;
  double u = u0, s = std::log(theta0);
  InnerFit cur = fit_polynomial(order, c, scale, u, std::exp(s), grid);
  if (!cur.ok) return res;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double rnorm = cur.residual.cwiseAbs().maxCoeff();
    if (rnorm <= kTol) {
      res.converged = true;
      break;
    }
    const double sqrt_theta = std::exp(0.5 * s);
    // Forward differences: the Jacobian only steers the step, acceptance is
    // decided by the residual itself.
    const double hu = 1e-7 * sqrt_theta, hs = 1e-7;
    Eigen::Matrix2d jac;
    const InnerFit up = fit_polynomial(order, c, scale, u + hu, std::exp(s), grid);
    const InnerFit sp = fit_polynomial(order, c, scale, u, std::exp(s + hs), grid);
    if (!(up.ok && sp.ok)) break;
    jac.col(0) = (up.residual - cur.residual) / hu;
    jac.col(1) = (sp.residual - cur.residual) / hs;
    const Eigen::Matrix2d normal = jac.transpose() * jac;
    const double mu = 1e-14 * std::max(normal.trace(), 1e-300);
    Eigen::Vector2d step =
        -(normal + mu * Eigen::Matrix2d::Identity()).ldlt().solve(jac.transpose() * cur.residual);
    if (!step.allFinite()) break;
    step[0] = std::clamp(step[0], -0.5 * sqrt_theta, 0.5 * sqrt_theta);
    step[1] = std::clamp(step[1], -0.5, 0.5);

    bool accepted = false;
    double lambda = 1.0;
    for (int h = 0; h <= kMaxHalvings; ++h, lambda *= 0.5) {
      InnerFit trial =
          fit_polynomial(order, c, scale, u + lambda * step[0], std::exp(s + lambda * step[1]), grid);
      if (trial.ok && trial.residual.cwiseAbs().maxCoeff() < rnorm) {
        u += lambda * step[0];
        s += lambda * step[1];
        cur = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  res.u = u;
  res.theta = std::exp(s);
  res.fit = cur;
  if (!res.converged && cur.ok && cur.residual.cwiseAbs().maxCoeff() <= kAcceptTol) {
    res.converged = true;
  }
  return res;
}

}  // namespace

AnsatzPoint params_from_moments(int order, const Eigen::VectorXd& c, const QuadratureRule& grid,
                                const std::optional<AnsatzPoint>& guess) {
  Manifold::conservative_moment(order).validate();
  if (c.size() != order + 3) {
    throw ParameterError("params_from_moments: expected " + std::to_string(order + 3) +
                         " moments, got " + std::to_string(c.size()));
  }
  if (!c.allFinite()) throw RealizabilityError("params_from_moments: non-finite moments");
  if (!(c[0] > 0.0)) throw RealizabilityError("params_from_moments: nonpositive density");
  const double u_fit = c[1] / c[0];
  const double theta_fit = c[2] / c[0] - u_fit * u_fit;
  if (!(theta_fit > 0.0)) {
    throw RealizabilityError("params_from_moments: nonpositive second central moment");
  }
  const Eigen::VectorXd scale = (1.0 + c.array().abs()).matrix();

  std::vector<std::pair<double, double>> starts;
  if (guess && guess->manifold == Manifold::conservative_moment(order)) {
    starts.emplace_back(guess->u(), guess->theta());
  }
  // Odd orders have several roots; scan shifted centres until one is realizable.
  for (double du : {0.0, -0.15, 0.15, -0.3, 0.3, -0.5, 0.5}) {
    for (double f : {1.0, 0.8, 0.6, 0.4, 0.25, 1.25}) {
      starts.emplace_back(u_fit + du * std::sqrt(theta_fit), f * theta_fit);
    }
  }

  std::string last_failure = "no starting point converged";
  bool any_converged = false;
  for (const auto& [u0, th0] : starts) {
    const InversionResult r = newton_inversion(order, c, scale, u0, th0, grid);
    if (!r.converged) continue;
    any_converged = true;
    AnsatzPoint p = AnsatzPoint::conservative(r.u, r.theta, scaled_to_raw(r.fit.beta, r.u, r.theta));
    try {
      evaluate(p, grid);
      return p;
    } catch (const RealizabilityError& e) {
      last_failure = e.what();
    }
  }
  if (any_converged) {
    throw RealizabilityError("params_from_moments: every moment-matching root is negative: " +
                             last_failure);
  }
  throw InversionError("params_from_moments: Newton did not converge within 50 damped iterations");
}

namespace {

AnsatzPoint gaussian_start(const Manifold& manifold, const MomentState& m) {
  switch (manifold.kind) {
    case ManifoldKind::HermitePerturbation:
      return AnsatzPoint::hermite(m.rho, m.u, m.theta,
                                  Eigen::VectorXd::Zero(manifold.dimension() - 3));
    case ManifoldKind::EntropyClosure: {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(manifold.order);
      const double log_norm = std::log(m.rho / std::sqrt(2.0 * std::numbers::pi * m.theta));
      a[0] = log_norm - m.u * m.u / (2.0 * m.theta);
      if (manifold.order >= 2) a[1] = m.u / m.theta;
      if (manifold.order >= 3) a[2] = -1.0 / (2.0 * m.theta);
      return AnsatzPoint::entropy_closure(a);
    }
    case ManifoldKind::ConservativeMoment: break;
  }
  throw ParameterError("gaussian_start: unsupported manifold");
}

/// g(f0 - f_hat, b_k) for every tangent direction.
std::optional<Eigen::VectorXd> orthogonality_residual(const AnsatzPoint& p, const Profile& f0,
                                                      const QuadratureRule& grid) {
  try {
    const Profile f = evaluate(p, grid);
    const Eigen::MatrixXd basis = tangent_basis(p, grid);
    const Profile w = metric_weight(p, grid).weight;
    const Eigen::VectorXd r =
        basis.transpose() * (grid.weights().cwiseProduct(w).cwiseProduct(f0 - f));
    if (!r.allFinite()) return std::nullopt;
    return r;
  } catch (const RealizabilityError&) {
    return std::nullopt;
  }
}

std::optional<Eigen::MatrixXd> residual_jacobian(const AnsatzPoint& p, const Profile& f0,
                                                 const QuadratureRule& grid) {
  const Eigen::Index n = p.omega.size();
  Eigen::MatrixXd jac(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double h = 1e-7 * std::max(1.0, std::abs(p.omega[k]));
    AnsatzPoint a = p, b = p;
    a.omega[k] += h;
    b.omega[k] -= h;
    const auto ra = orthogonality_residual(a, f0, grid);
    const auto rb = orthogonality_residual(b, f0, grid);
    if (!ra || !rb) return std::nullopt;
    jac.col(k) = (*ra - *rb) / (2.0 * h);
  }
  return jac;
}

}  // namespace

AnsatzPoint project_profile(const Manifold& manifold, const Profile& f0, const QuadratureRule& grid,
                            const std::optional<AnsatzPoint>& guess) {
  manifold.validate();
  if (manifold.kind == ManifoldKind::ConservativeMoment) {
    return params_from_moments(manifold.order, raw_moments(f0, grid, manifold.order + 3), grid,
                               guess);
  }
  const MomentState m = compute_moments(f0, grid);
  AnsatzPoint p = (guess && guess->manifold == manifold) ? *guess : gaussian_start(manifold, m);
  auto r = orthogonality_residual(p, f0, grid);
  if (!r) throw RealizabilityError("project_profile: starting point not realizable");
  const double tol = 1e-13 * m.rho;
  for (int it = 0; it < 50; ++it) {
    const double rnorm = r->cwiseAbs().maxCoeff();
    if (rnorm <= tol) return p;
    const Eigen::MatrixXd basis = tangent_basis(p, grid);
    const Profile w = metric_weight(p, grid).weight;
    const Eigen::MatrixXd a0 =
        basis.transpose() * grid.weights().cwiseProduct(w).asDiagonal() * basis;
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (a0 + a0.transpose()));
    if (llt.info() != Eigen::Success) {
      throw DegenerateChartError("project_profile: Gram matrix not positive definite");
    }
    // The weight moves with the point, so A0 is the Jacobian only at a zero
    // residual. Try the finite-difference Newton step first.
    std::vector<Eigen::VectorXd> steps;
    if (auto jac = residual_jacobian(p, f0, grid)) {
      Eigen::VectorXd s = jac->colPivHouseholderQr().solve(-*r);
      if (s.allFinite()) steps.push_back(std::move(s));
    }
    steps.push_back(llt.solve(*r));
    bool accepted = false;
    for (const auto& step : steps) {
      double lambda = 1.0;
      for (int h = 0; h <= 12 && !accepted; ++h, lambda *= 0.5) {
        AnsatzPoint trial{manifold, p.omega + lambda * step};
        if (!trial.omega.allFinite()) continue;
        if (manifold.kind == ManifoldKind::HermitePerturbation &&
            (!(trial.omega[0] > 0.0) || !(trial.omega[2] > 0.0))) {
          continue;
        }
        auto rt = orthogonality_residual(trial, f0, grid);
        if (rt && rt->norm() < r->norm()) {
          p = std::move(trial);
          r = std::move(rt);
          accepted = true;
        }
      }
      if (accepted) break;
    }
    if (!accepted) break;
  }
  if (r->cwiseAbs().maxCoeff() <= 1e-9 * m.rho) return p;
  throw InversionError("project_profile: Newton did not converge for " + manifold.name());
}

std::vector<AnsatzPoint> project_initial(const Manifold& manifold, const DistributionField& f0) {
  std::vector<AnsatzPoint> points;
  points.reserve(static_cast<std::size_t>(f0.mesh.cells));
  std::optional<AnsatzPoint> prev;
  for (int i = 0; i < f0.mesh.cells; ++i) {
    try {
      points.push_back(project_profile(manifold, f0.cell(i), *f0.grid, prev));
    } catch (const Error&) {
      if (!prev) throw;
      points.push_back(project_profile(manifold, f0.cell(i), *f0.grid));
    }
    prev = points.back();
  }
  return points;
}

namespace {
constexpr double kSampleMargin = 0.05;
}  // namespace

AnsatzPoint sample_valid_point(const Manifold& manifold, std::mt19937_64& rng,
                               const QuadratureRule& grid, const SamplingBox& box) {
  manifold.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const int n = manifold.order;
  double amplitude = 1.0;
  for (int attempt = 0; attempt < 400; ++attempt) {
    if (attempt > 0 && attempt % 20 == 0) amplitude *= 0.5;
    const double rho = uniform(box.rho_min, box.rho_max);
    const double u = uniform(-box.u_max, box.u_max);
    const double theta = uniform(box.theta_min, box.theta_max);
    const Eigen::ArrayXd w = (grid.nodes().array() - u) / std::sqrt(theta);
    const double w_max = w.abs().maxCoeff();
    try {
      switch (manifold.kind) {
        case ManifoldKind::ConservativeMoment: {
          Eigen::VectorXd beta = Eigen::VectorXd::Zero(n + 1);
          beta[0] = 1.0;
          for (int j = 1; j <= n; ++j) beta[j] = amplitude * uniform(-0.2, 0.2) / factorial(j);
          if (n >= 1) {
            // Odd leading powers must stay small against w_max^n to keep the
            // factor positive on the whole grid.
            beta[n] = (n % 2 == 0) ? amplitude * uniform(0.05, 0.3) / factorial(n)
                                   : uniform(0.05, 0.5) / std::pow(w_max, n);
          }
          // Keep the polynomial factor away from zero so nearby points stay
          // realizable too (inversion roundtrips land within round-off).
          Eigen::ArrayXd poly = Eigen::ArrayXd::Zero(w.size());
          for (int j = n; j >= 0; --j) poly = poly * w + beta[j];
          if (poly.minCoeff() < kSampleMargin) continue;
          const double norm = rho * kInvSqrt2Pi / std::sqrt(theta);
          AnsatzPoint p = AnsatzPoint::conservative(u, theta, norm * scaled_to_raw(beta, u, theta));
          evaluate(p, grid);
          metric_weight(p, grid);
          return p;
        }
        case ManifoldKind::HermitePerturbation: {
          Eigen::VectorXd a = Eigen::VectorXd::Zero(std::max(0, n - 2));
          for (int k = 3; k <= n; ++k) {
            a[k - 3] = amplitude * uniform(-0.3, 0.3) / factorial(k);
          }
          if (n >= 3 && n % 2 == 1) a[n - 3] = uniform(-0.5, 0.5) / std::pow(w_max, n);
          Eigen::ArrayXd poly = Eigen::ArrayXd::Ones(w.size());
          for (Eigen::Index i = 0; i < w.size(); ++i) {
            const auto he = hermite_he(w[i], n);
            for (int k = 3; k <= n; ++k) poly[i] += a[k - 3] * he[k];
          }
          if (poly.minCoeff() < kSampleMargin) continue;
          AnsatzPoint p = AnsatzPoint::hermite(rho, u, theta, a);
          evaluate(p, grid);
          metric_weight(p, grid);
          return p;
        }
        case ManifoldKind::EntropyClosure: {
          AnsatzPoint p = gaussian_start(manifold, MomentState::equilibrium(rho, u, theta));
          const double half_width = grid.half_width();
          for (int k = 3; k < n; ++k) {
            // Perturbation of size <= 0.5 at the grid edge; even tops damp.
            const double bound = 0.5 / std::pow(half_width, k);
            p.omega[k] = amplitude * uniform(-bound, bound);
            if (k == n - 1 && k % 2 == 0) p.omega[k] = -std::abs(p.omega[k]);
          }
          evaluate(p, grid);
          metric_weight(p, grid);
          return p;
        }
      }
    } catch (const RealizabilityError&) {
      continue;
    }
  }
  throw RealizabilityError("sample_valid_point: could not draw a realizable " + manifold.name());
}

}  // namespace kinred
