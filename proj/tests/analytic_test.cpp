#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "zerodisc/analytic.hpp"

namespace zd = zerodisc;
using zd::cplx;

namespace {

cplx random_point(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Catalogue {
  std::string name;
  zd::AnalyticFunction f;
};

std::vector<Catalogue> catalogue() {
  using zd::AnalyticFunction;
  auto geometric = AnalyticFunction::closed_form("1/(1-z)", [](cplx z) {
    const cplx u = 1.0 / (1.0 - z);
    return zd::Jet{u, u * u, 2.0 * u * u * u, 6.0 * u * u * u * u};
  });
  auto sine = AnalyticFunction::closed_form("sin", [](cplx z) {
    return zd::Jet{std::sin(z), std::cos(z), -std::sin(z), -std::cos(z)};
  });
  auto cosine = AnalyticFunction::closed_form("cos", [](cplx z) {
    return zd::Jet{std::cos(z), -std::sin(z), -std::cos(z), std::sin(z)};
  });
  auto log1p = AnalyticFunction::closed_form("log(1+z)", [](cplx z) {
    const cplx u = 1.0 / (1.0 + z);
    return zd::Jet{std::log(1.0 + z), u, -u * u, 2.0 * u * u * u};
  });
  auto sqrt_shift = AnalyticFunction::closed_form("sqrt(2+z)", [](cplx z) {
    const cplx s = std::sqrt(2.0 + z);
    return zd::Jet{s, 0.5 / s, -0.25 / (s * s * s), 0.375 / (s * s * s * s * s)};
  });
  return {
      {"z^2", zd::polynomial({0.0, 0.0, 1.0})},
      {"cubic", zd::polynomial({1.0, cplx(0.0, 2.0), -3.0, 0.5})},
      {"exp", zd::exp_function()},
      {"exp(2z)", zd::exp(cplx(2.0) * zd::identity())},
      {"geometric", geometric},
      {"sin", sine},
      {"cos", cosine},
      {"log1p", log1p},
      {"sqrt", sqrt_shift},
      {"mobius", zd::mobius(zd::DiscPoint(0.3, -0.4))},
  };
}

}  // namespace

TEST(Jet, Examples) {
  const auto sq = zd::polynomial({0.0, 0.0, 1.0});
  const auto j = sq.jet(0.3);
  EXPECT_LT(std::abs(j.value - 0.09), 1e-15);
  EXPECT_LT(std::abs(j.d1 - 0.6), 1e-15);
  EXPECT_LT(std::abs(j.d2 - 2.0), 1e-15);
  EXPECT_EQ(j.d3, cplx(0.0));
  const auto e = zd::exp_function().jet(0.0);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(e[k], cplx(1.0));
  const auto g = zd::AnalyticFunction::from_values("1/(1-z)", [](cplx z) { return 1.0 / (1.0 - z); });
  EXPECT_EQ(g.mode(), zd::DerivativeMode::cauchy_quadrature);
  EXPECT_LT(std::abs(g.jet(0.0).d2 - 2.0), 1e-10);
}

TEST(Jet, OrderTruncationAndRange) {
  const auto e = zd::exp_function();
  const auto j1 = e.jet(0.2, 1);
  EXPECT_EQ(j1.d2, cplx(0.0));
  EXPECT_EQ(j1.d3, cplx(0.0));
  EXPECT_THROW(e.jet(0.2, 4), zd::DomainError);
  EXPECT_THROW(e.jet(0.2, -1), zd::DomainError);
}

TEST(Jet, QuadratureMatchesClosedFormOnCatalogue) {
  std::mt19937_64 rng(2024);
  for (const auto& [name, f] : catalogue()) {
    for (int i = 0; i < 20; ++i) {
      const cplx z = random_point(rng, 0.9);
      const auto exact = f.jet(z);
      const auto quad = f.quadrature_jet(z);
      for (int k = 0; k < 4; ++k) {
        EXPECT_LT(std::abs(quad[k] - exact[k]) / std::max(1.0, std::abs(exact[k])), 1e-8)
            << name << " k=" << k << " z=" << z;
      }
    }
  }
}

TEST(Jet, CombinatorsAgreeWithFiniteDifferences) {
  const auto f = zd::exp(zd::polynomial({0.0, 0.5, 0.25})) * zd::mobius(zd::DiscPoint(0.2, 0.1)) +
                 cplx(2.0) * zd::compose_mobius(zd::exp_function(), zd::DiscPoint(-0.3, 0.3));
  ASSERT_EQ(f.mode(), zd::DerivativeMode::closed_form);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const cplx z = random_point(rng, 0.8);
    const auto j = f.jet(z);
    const double h = 1e-4;
    EXPECT_LT(rel((f(z + h) - f(z - h)) / (2.0 * h), j.d1), 1e-6);
    EXPECT_LT(rel((f.jet(z + h).d2 - f.jet(z - h).d2) / (2.0 * h), j.d3), 1e-6);
    // Cauchy-Riemann: derivative along i equals i times derivative along 1
    const cplx di = (f(z + cplx(0.0, h)) - f(z - cplx(0.0, h))) / (2.0 * h);
    EXPECT_LT(rel(di, cplx(0.0, 1.0) * j.d1), 1e-6);
  }
}

TEST(GrowthNorm, Examples) {
  const auto grid = zd::make_grid(0.999, 10, 64);
  std::vector<zd::DiscPoint> with_origin(grid.begin(), grid.end());
  with_origin.emplace_back(0.0, 0.0);
  const auto g0 = zd::grid_from_points(with_origin);
  EXPECT_NEAR(zd::growth_norm(zd::constant(1.0), 2.0, g0).value, 1.0, 1e-15);
  EXPECT_EQ(zd::growth_norm(zd::constant(0.0), 2.0, grid).value, 0.0);
  const auto f = zd::AnalyticFunction::closed_form("-2/(1-z)^2", [](cplx z) {
    const cplx u = 1.0 / (1.0 - z);
    return zd::Jet{-2.0 * u * u, -4.0 * u * u * u, -12.0 * u * u * u * u, -48.0 * u * u * u * u * u};
  });
  const auto est = zd::growth_norm(f, 2.0, grid);
  EXPECT_NEAR(est.value, 8.0, 0.02 * 8.0);
  EXPECT_DOUBLE_EQ(est.max_modulus, grid.max_modulus());
  EXPECT_THROW(zd::growth_norm(f, -1.0, grid), zd::DomainError);
}

TEST(Schwarzian, Examples) {
  const auto m = zd::mobius(zd::DiscPoint(0.4, -0.2));
  EXPECT_LT(std::abs(zd::schwarzian(m, 0.3)), 1e-12);
  EXPECT_LT(std::abs(zd::schwarzian(m, cplx(-0.5, 0.6))), 1e-12);
  EXPECT_LT(std::abs(zd::schwarzian(zd::exp_function(), 0.0) + 0.5), 1e-15);
  EXPECT_EQ(zd::schwarzian(zd::identity(), 0.7), cplx(0.0));
  EXPECT_THROW(zd::schwarzian(zd::polynomial({0.0, 0.0, 1.0}), 0.0), zd::CriticalPointError);
}

TEST(Schwarzian, MobiusCocycle) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const zd::DiscPoint a(random_point(rng, 0.8));
    const cplx z = random_point(rng, 0.8);
    const zd::Automorphism phi(a);
    const auto composed = zd::compose_mobius(zd::exp_function(), a);
    const cplx lhs = zd::schwarzian(composed, z);
    const cplx d = phi.derivative(z);
    const cplx rhs = zd::schwarzian(zd::exp_function(), phi(z)) * d * d;
    EXPECT_LT(rel(lhs, rhs), 1e-8);
  }
}

TEST(SphericalDerivative, Examples) {
  EXPECT_NEAR(zd::spherical_derivative(zd::identity(), 0.0), 1.0, 1e-15);
  const zd::MeromorphicFunction inv(zd::constant(-1.0), zd::identity());
  EXPECT_NEAR(zd::spherical_derivative(inv, 0.0), 1.0, 1e-15);
  EXPECT_EQ(zd::spherical_derivative(zd::constant(5.0), cplx(0.3, 0.3)), 0.0);
}

TEST(SphericalDerivative, ChartInvariance) {
  std::mt19937_64 rng(13);
  const auto p = zd::exp(zd::polynomial({0.1, 1.0, 0.5}));
  const auto q = zd::polynomial({0.2, -1.0, 0.3});
  const zd::MeromorphicFunction w(p, q), winv(q, p);
  for (int i = 0; i < 100; ++i) {
    const cplx z = random_point(rng, 0.95);
    EXPECT_NEAR(zd::spherical_derivative(w, z), zd::spherical_derivative(winv, z), 1e-9);
  }
}

TEST(PathPrimitive, Examples) {
  const auto o = zd::DiscPoint(0.0, 0.0);
  EXPECT_NEAR(std::abs(zd::path_primitive(zd::constant(1.0), zd::PathSpec::segment(o, zd::DiscPoint(0.5, 0.0))) - 0.5),
              0.0, 1e-15);
  EXPECT_LT(std::abs(zd::path_primitive(zd::exp_function(), zd::PathSpec::segment(o, zd::DiscPoint(0.5, 0.0))) -
                     (std::exp(0.5) - 1.0)),
            1e-14);
  EXPECT_LT(std::abs(zd::path_primitive(zd::polynomial({0.0, 2.0}), zd::PathSpec::segment(o, zd::DiscPoint(0.0, 0.5))) +
                     0.25),
            1e-15);
}

TEST(PathPrimitive, PathIndependence) {
  const auto f = zd::exp(zd::polynomial({0.0, 1.0, -2.0})) * zd::mobius(zd::DiscPoint(0.5, 0.5));
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const zd::DiscPoint a(random_point(rng, 0.8)), b(random_point(rng, 0.8)), via(random_point(rng, 0.8));
    const cplx direct = zd::path_primitive(f, zd::PathSpec({a, b}, 32));
    const cplx detour = zd::path_primitive(f, zd::PathSpec({a, via, b}, 32));
    EXPECT_LT(std::abs(direct - detour), 1e-9);
  }
}

TEST(PathSpec, Validation) {
  const zd::DiscPoint a(0.1, 0.0);
  EXPECT_THROW(zd::PathSpec({a}), zd::DomainError);
  EXPECT_THROW(zd::PathSpec({a, a}), zd::DomainError);
  EXPECT_THROW(zd::PathSpec({a, zd::DiscPoint(0.2, 0.0)}, 0), zd::DomainError);
  EXPECT_NEAR(zd::PathSpec({zd::DiscPoint(0.0, 0.0), zd::DiscPoint(0.3, 0.0), zd::DiscPoint(0.3, 0.4)}).length(), 0.7,
              1e-15);
}

TEST(MobiusPullback, HalfPowerBranchSquaresToDerivative) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const zd::Automorphism phi(zd::DiscPoint(random_point(rng, 0.9)));
    const cplx z = random_point(rng, 0.95);
    const auto s = zd::mobius_half_power_jet(phi, 1, z);
    EXPECT_LT(rel(s.value * s.value, phi.derivative(z)), 1e-13);
    const auto s2 = zd::mobius_half_power_jet(phi, 2, z);
    EXPECT_LT(rel(s2.d1, phi.second_derivative(z)), 1e-12);
  }
}
