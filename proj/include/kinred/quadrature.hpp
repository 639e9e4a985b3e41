#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace kinred {

/// Sampled velocity profile: one value per quadrature node.
using Profile = Eigen::VectorXd;

enum class QuadratureDomain { Truncated, Hermite };

/**
 * Fixed 1D quadrature rule with strictly increasing nodes and positive
 * weights.
 *
 * A `Truncated` rule integrates against Lebesgue measure on [-L, L]; a
 * `Hermite` rule integrates against exp(-x^2) on the real line.
 */
class QuadratureRule {
 public:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights, QuadratureDomain domain,
                 double half_width);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Eigen::VectorXd& nodes() const noexcept { return nodes_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  QuadratureDomain domain() const noexcept { return domain_; }
  /// L for truncated rules, +inf for Hermite rules.
  double half_width() const noexcept { return half_width_; }

  /// Sum of weights[i] * values[i], accumulated left to right.
  double integrate(std::span<const double> values) const;
  double integrate(const Profile& values) const;

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  QuadratureDomain domain_;
  double half_width_;
};

/// Gauss-Hermite rule with n nodes (1 <= n <= 64), exact for polynomials of
/// degree <= 2n-1 against exp(-x^2).
QuadratureRule gauss_hermite_rule(int n);

/// Composite 4-point Gauss-Legendre rule on `cells` uniform subintervals of
/// [-L, L].
QuadratureRule truncated_rule(double half_width, int cells);

double integrate(std::span<const double> values, const QuadratureRule& rule);

/// Truncation half-width |u|max + 8 sqrt(theta_max).
double default_truncation(double max_abs_velocity, double max_temperature);

}  // namespace kinred
