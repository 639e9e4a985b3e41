#include "kinred/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "kinred/errors.hpp"

namespace kinred {

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights,
                               QuadratureDomain domain, double half_width)
    : domain_(domain), half_width_(half_width) {
  if (nodes.empty() || nodes.size() != weights.size()) {
    throw ParameterError("quadrature rule needs matching, nonempty node and weight arrays");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw ParameterError("quadrature weight " + std::to_string(i) + " is not positive");
    }
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw ParameterError("quadrature nodes must be strictly increasing");
    }
    if (domain == QuadratureDomain::Truncated && std::abs(nodes[i]) > half_width) {
      throw ParameterError("quadrature node outside [-L, L]");
    }
  }
  nodes_ = Eigen::Map<const Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
  weights_ =
      Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
}

double QuadratureRule::integrate(std::span<const double> values) const {
  if (values.size() != size()) {
    throw ParameterError("integrate: " + std::to_string(values.size()) + " values for " +
                         std::to_string(size()) + " nodes");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += weights_[static_cast<Eigen::Index>(i)] * values[i];
  }
  return sum;
}

double QuadratureRule::integrate(const Profile& values) const {
  return integrate(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

double integrate(std::span<const double> values, const QuadratureRule& rule) {
  return rule.integrate(values);
}

QuadratureRule gauss_hermite_rule(int n) {
  if (n < 1 || n > 64) {
    throw ParameterError("gauss_hermite_rule: n must lie in [1, 64], got " + std::to_string(n));
  }
  // Golub-Welsch on the Jacobi matrix of the physicists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  const Eigen::VectorXd& x = eig.eigenvalues();
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  std::vector<double> raw_w(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    raw_w[i] = sqrt_pi * v0 * v0;
  }
  // Enforce exact mirror symmetry; the eigen-solver leaves ~1e-16 skew.
  std::vector<double> nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    const int j = n - 1 - i;
    nodes[i] = 0.5 * (x[i] - x[j]);
    weights[i] = 0.5 * (raw_w[i] + raw_w[j]);
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
  return QuadratureRule(std::move(nodes), std::move(weights), QuadratureDomain::Hermite,
                        std::numeric_limits<double>::infinity());
}

QuadratureRule truncated_rule(double half_width, int cells) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ParameterError("truncated_rule: L must be positive and finite");
  }
  if (cells < 1) {
    throw ParameterError("truncated_rule: cells must be positive");
  }
  const double s = 2.0 / 7.0 * std::sqrt(6.0 / 5.0);
  const double inner = std::sqrt(3.0 / 7.0 - s);
  const double outer = std::sqrt(3.0 / 7.0 + s);
  const double w_inner = (18.0 + std::sqrt(30.0)) / 36.0;
  const double w_outer = (18.0 - std::sqrt(30.0)) / 36.0;
  const double ref_x[4] = {-outer, -inner, inner, outer};
  const double ref_w[4] = {w_outer, w_inner, w_inner, w_outer};

  const double h = 2.0 * half_width / cells;
  std::vector<double> nodes, weights;
  nodes.reserve(4 * static_cast<std::size_t>(cells));
  weights.reserve(nodes.capacity());
  for (int c = 0; c < cells; ++c) {
    const double mid = -half_width + (c + 0.5) * h;
    for (int q = 0; q < 4; ++q) {
      nodes.push_back(mid + 0.5 * h * ref_x[q]);
      weights.push_back(0.5 * h * ref_w[q]);
    }
  }
  return QuadratureRule(std::move(nodes), std::move(weights), QuadratureDomain::Truncated,
                        half_width);
}

double default_truncation(double max_abs_velocity, double max_temperature) {
  if (!(max_temperature > 0.0)) {
    throw ParameterError("default_truncation: temperature must be positive");
  }
  return std::abs(max_abs_velocity) + 8.0 * std::sqrt(max_temperature);
}

}  // namespace kinred
