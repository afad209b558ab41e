#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "zerodisc/geometry.hpp"
#include "zerodisc/quadrature.hpp"

namespace zd = zerodisc;
using zd::cplx;

namespace {

cplx random_point(std::mt19937_64& rng, double rmax = 0.99) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

}  // namespace

TEST(DiscPoint, RejectsBoundaryAndExterior) {
  EXPECT_THROW(zd::DiscPoint(1.0, 0.0), zd::DomainError);
  EXPECT_THROW(zd::DiscPoint(0.0, -1.5), zd::DomainError);
  EXPECT_THROW(zd::DiscPoint(1.0 - 1e-13, 0.0), zd::DomainError);
  EXPECT_THROW(zd::DiscPoint(NAN, 0.0), zd::DomainError);
  EXPECT_NO_THROW(zd::DiscPoint(1.0 - 1e-11, 0.0));
}

TEST(PseudoDistance, Examples) {
  EXPECT_DOUBLE_EQ(zd::pseudo_distance(0.0, 0.5), 0.5);
  EXPECT_EQ(zd::pseudo_distance(0.5, 0.5), 0.0);
  EXPECT_NEAR(zd::pseudo_distance(0.3, -0.3), 0.6 / 1.09, 1e-15);
}

TEST(PseudoDistance, SymmetryInvarianceAndTriangle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const cplx z = random_point(rng), w = random_point(rng), u = random_point(rng);
    EXPECT_NEAR(zd::pseudo_distance(z, w), zd::pseudo_distance(w, z), 1e-15);
    const zd::Automorphism phi(zd::DiscPoint(random_point(rng, 0.95)));
    EXPECT_NEAR(zd::pseudo_distance(phi(z), phi(w)), zd::pseudo_distance(z, w), 1e-12);
    const double a = zd::pseudo_distance(z, u), b = zd::pseudo_distance(u, w);
    EXPECT_LE(zd::pseudo_distance(z, w), (a + b) / (1.0 + a * b) + 1e-12);
  }
}

TEST(Automorphism, Examples) {
  const zd::Automorphism phi0(zd::DiscPoint(0.0, 0.0));
  EXPECT_EQ(phi0(cplx(0.4)), cplx(-0.4));
  const zd::Automorphism phi(zd::DiscPoint(0.5, 0.0));
  EXPECT_EQ(phi(cplx(0.5)), cplx(0.0));
  EXPECT_EQ(phi(cplx(0.0)), cplx(0.5));
}

TEST(Automorphism, InvolutionAndDerivatives) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const zd::Automorphism phi(zd::DiscPoint(random_point(rng, 0.9)));
    const cplx z = random_point(rng, 0.9);
    EXPECT_LT(std::abs(phi(phi(z)) - z), 1e-12);
    const double h = 1e-5;
    const cplx fd = (phi(z + h) - phi(z - h)) / (2.0 * h);
    EXPECT_LT(std::abs(fd - phi.derivative(z)), 1e-6 * std::max(1.0, std::abs(fd)));
    const cplx fd2 = (phi.derivative(z + h) - phi.derivative(z - h)) / (2.0 * h);
    EXPECT_LT(std::abs(fd2 - phi.second_derivative(z)), 1e-5 * std::max(1.0, std::abs(fd2)));
    const cplx fd3 = (phi.second_derivative(z + h) - phi.second_derivative(z - h)) / (2.0 * h);
    EXPECT_LT(std::abs(fd3 - phi.third_derivative(z)), 1e-4 * std::max(1.0, std::abs(fd3)));
  }
}

TEST(Cayley, Examples) {
  EXPECT_LT(std::abs(zd::cayley(cplx(0.0, 1.0)).value()), 1e-16);
  EXPECT_LT(std::abs(zd::cayley(cplx(0.0, 2.0)).value() - 1.0 / 3.0), 1e-15);
  EXPECT_LT(std::abs(zd::cayley(cplx(1.0, 1.0)).value() - cplx(0.2, -0.4)), 1e-15);
  EXPECT_THROW(zd::cayley(cplx(1.0, 0.0)), zd::DomainError);
  EXPECT_THROW(zd::cayley(cplx(1.0, -2.0)), zd::DomainError);
}

TEST(Cayley, InjectiveOnHalfPlaneGrid) {
  std::set<std::pair<double, double>> images;
  int count = 0;
  for (int i = -10; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      const cplx w = zd::cayley(cplx(0.5 * i, 0.3 * j)).value();
      EXPECT_LT(std::abs(w), 1.0);
      images.insert({w.real(), w.imag()});
      ++count;
    }
  }
  EXPECT_EQ(static_cast<int>(images.size()), count);
}

TEST(PseudoDisc, ContainsAndEuclideanForm) {
  const zd::PseudoDisc d(zd::DiscPoint(0.5, 0.2), 0.3);
  EXPECT_TRUE(d.contains(cplx(0.5, 0.2)));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const cplx z = random_point(rng);
    const bool inside = std::abs(z - d.euclidean_center()) < d.euclidean_radius();
    if (std::abs(zd::pseudo_distance(z, d.center()) - 0.3) > 1e-9) {
      EXPECT_EQ(inside, d.contains(z));
    }
  }
  EXPECT_THROW(zd::PseudoDisc(zd::DiscPoint(0.0, 0.0), 1.0), zd::DomainError);
  EXPECT_THROW(zd::PseudoDisc(zd::DiscPoint(0.0, 0.0), 0.0), zd::DomainError);
}

TEST(MakeGrid, Examples) {
  const auto g = zd::make_grid(0.9, 1, 4);
  ASSERT_EQ(g.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    const cplx z = g.points()[k].value();
    EXPECT_NEAR(std::abs(z), 0.9, 1e-15);
    EXPECT_LT(std::abs(z - std::polar(0.9, k * std::numbers::pi / 2)), 1e-15);
  }
  const auto h = zd::make_grid(0.99, 2, 1);
  ASSERT_EQ(h.size(), 2u);
  for (const auto& p : h) {
    EXPECT_GE(p.re(), 0.0);
    EXPECT_EQ(p.im(), 0.0);
  }
  EXPECT_EQ(zd::make_grid(0.999, 7, 13).size(), 7u * 13u);
}

TEST(MakeGrid, ClusteredTowardBoundary) {
  const auto g = zd::make_grid(0.999, 6, 1);
  std::vector<double> r;
  for (const auto& p : g) r.push_back(p.abs());
  EXPECT_NEAR(r.back(), 0.999, 1e-15);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    EXPECT_NEAR((1.0 - r[i + 1]) / (1.0 - r[i]), 0.5, 1e-12);
  }
  EXPECT_LE(g.max_modulus(), 0.999);
}

TEST(MakeGrid, RejectsBadParameters) {
  EXPECT_THROW(zd::make_grid(1.0, 2, 2), zd::DomainError);
  EXPECT_THROW(zd::make_grid(0.0, 2, 2), zd::DomainError);
  EXPECT_THROW(zd::make_grid(0.5, 0, 2), zd::DomainError);
  EXPECT_THROW(zd::make_grid(0.5, 2, 0), zd::DomainError);
}

TEST(PseudoUniformGrid, BoundedByModulus) {
  const auto g = zd::make_pseudo_uniform_grid(0.99, 5, 8, 256);
  EXPECT_EQ(g.scheme(), zd::GridScheme::pseudo_uniform);
  for (const auto& p : g) EXPECT_LE(p.abs(), 0.99 + 1e-15);
}

TEST(Quadrature, GaussLegendreIsExactOnPolynomials) {
  for (int n : {2, 5, 8}) {
    const auto& rule = zd::gauss_legendre(n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " deg=" << deg;
    }
  }
  EXPECT_NEAR(zd::integrate_gauss([](double x) { return std::exp(x); }, 0.0, 1.0, 4), std::exp(1.0) - 1.0, 1e-13);
  EXPECT_NEAR(zd::integrate_periodic([](double t) { return std::cos(t) * std::cos(t); }, 16), std::numbers::pi, 1e-14);
}
