#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kinred/errors.hpp"
#include "kinred/quadrature.hpp"

using namespace kinred;

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);
}

TEST_CASE("gauss_hermite_rule small orders") {
  SUBCASE("n = 1") {
    const auto r = gauss_hermite_rule(1);
    REQUIRE(r.size() == 1);
    CHECK(r.nodes()[0] == 0.0);
    CHECK(r.weights()[0] == doctest::Approx(1.7724538509055159).epsilon(1e-15));
  }
  SUBCASE("n = 2: roots of 4x^2 - 2") {
    const auto r = gauss_hermite_rule(2);
    CHECK(r.nodes()[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r.nodes()[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r.weights()[0] == doctest::Approx(kSqrtPi / 2).epsilon(1e-14));
    CHECK(r.weights()[1] == doctest::Approx(kSqrtPi / 2).epsilon(1e-14));
  }
  SUBCASE("n = 3") {
    const auto r = gauss_hermite_rule(3);
    CHECK(r.nodes()[0] == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-14));
    CHECK(r.nodes()[1] == 0.0);
    CHECK(r.nodes()[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
    CHECK(r.weights()[0] == doctest::Approx(kSqrtPi / 6).epsilon(1e-14));
    CHECK(r.weights()[1] == doctest::Approx(2 * kSqrtPi / 3).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gauss_hermite_rule(0), ParameterError);
  CHECK_THROWS_AS(gauss_hermite_rule(65), ParameterError);
}

TEST_CASE("gauss_hermite_rule polynomial exactness") {
  // int x^(2m) e^{-x^2} = (2m-1)!! sqrt(pi) / 2^m
  for (int n : {1, 4, 9, 20, 40, 64}) {
    const auto r = gauss_hermite_rule(n);
    for (int deg = 0; deg <= 2 * n - 1 && deg <= 24; ++deg) {
      Profile v = r.nodes().array().pow(deg).matrix();
      double exact = 0.0;
      if (deg % 2 == 0) {
        exact = kSqrtPi;
        for (int k = 1; k < deg; k += 2) exact *= k / 2.0;
      }
      // Odd moments cancel in floating point; scale by the absolute sum.
      const double mag = r.integrate(Profile(v.cwiseAbs()));
      CHECK(std::abs(r.integrate(v) - exact) <= 1e-11 * std::max(1.0, mag));
    }
    Profile odd = r.nodes().array().pow(2 * n - 1).matrix();
    CHECK(std::abs(r.integrate(odd)) <= 1e-12 * std::max(1.0, odd.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("truncated_rule") {
  CHECK(truncated_rule(1.0, 1).integrate(Profile::Ones(4)) == doctest::Approx(2.0).epsilon(1e-15));
  const auto r = truncated_rule(8.0, 64);
  CHECK(r.size() == 256);
  CHECK(r.nodes().minCoeff() > -8.0);
  CHECK(r.nodes().maxCoeff() < 8.0);
  const Profile gauss = (-0.5 * r.nodes().array().square()).exp().matrix();
  CHECK(std::abs(r.integrate(gauss) - std::sqrt(2 * std::numbers::pi)) <= 1e-12);
  CHECK(std::abs(r.integrate(Profile(r.nodes().cwiseProduct(gauss)))) <= 1e-14);
  CHECK(std::abs(r.weights().sum() - 16.0) <= 1e-13 * 16.0);
  // piecewise degree-7 exactness on a single cell
  const auto one = truncated_rule(1.0, 1);
  CHECK(one.integrate(Profile(one.nodes().array().pow(6).matrix())) ==
        doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK_THROWS_AS(truncated_rule(-1.0, 8), ParameterError);
}

TEST_CASE("integrate") {
  const auto r = truncated_rule(3.0, 16);
  CHECK(integrate(std::vector<double>(r.size(), 0.0), r) == 0.0);
  CHECK(std::abs(integrate(std::vector<double>(r.size(), 1.0), r) - 6.0) <= 1e-13 * 6.0);
  const auto h2 = gauss_hermite_rule(2);
  CHECK(h2.integrate(Profile(h2.nodes().cwiseAbs2())) == doctest::Approx(kSqrtPi / 2).epsilon(1e-14));
  CHECK_THROWS_AS(integrate(std::vector<double>(3, 1.0), r), ParameterError);
}

TEST_CASE("integrate is linear") {
  const auto r = truncated_rule(5.0, 32);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 50; ++t) {
    Profile a(r.size()), b(r.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a[i] = n01(rng);
      b[i] = n01(rng);
    }
    const double s = n01(rng);
    const double lhs = r.integrate(Profile(a + s * b));
    const double rhs = r.integrate(a) + s * r.integrate(b);
    const double mag = r.integrate(Profile(a.cwiseAbs() + std::abs(s) * b.cwiseAbs()));
    CHECK(std::abs(lhs - rhs) <= 1e-13 * mag);
  }
}

TEST_CASE("rule invariants are enforced") {
  CHECK_THROWS_AS(QuadratureRule({0.0, 1.0}, {1.0, -1.0}, QuadratureDomain::Truncated, 2.0),
                  ParameterError);
  CHECK_THROWS_AS(QuadratureRule({1.0, 0.0}, {1.0, 1.0}, QuadratureDomain::Truncated, 2.0),
                  ParameterError);
  CHECK_THROWS_AS(QuadratureRule({0.0, 3.0}, {1.0, 1.0}, QuadratureDomain::Truncated, 2.0),
                  ParameterError);
  CHECK(default_truncation(0.5, 4.0) == doctest::Approx(16.5));
}
