#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "zerodisc/builder.hpp"
#include "zerodisc/oscillation.hpp"

namespace zd = zerodisc;
using zd::cplx;

namespace {

cplx random_point(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

const zd::DiscPoint kOrigin(0.0, 0.0);

zd::AnalyticFunction minus_two_over_square() {
  return zd::AnalyticFunction::closed_form("-2/(1-z)^2", [](cplx z) {
    const cplx u = 1.0 / (1.0 - z);
    return zd::Jet{-2.0 * u * u, -4.0 * u * u * u, -12.0 * u * u * u * u, -48.0 * u * u * u * u * u};
  });
}

}  // namespace

TEST(Integrate, Examples) {
  const auto path = zd::PathSpec::segment(kOrigin, zd::DiscPoint(0.7, 0.0));
  const auto t0 = zd::integrate(zd::constant(0.0), {kOrigin, 0.0, 1.0}, path);
  EXPECT_LT(std::abs(t0.final().f - 0.7), 1e-14);
  EXPECT_LT(std::abs(t0.final().fprime - 1.0), 1e-14);

  const auto t1 = zd::integrate(zd::constant(1.0), {kOrigin, 0.0, 1.0}, zd::PathSpec::segment(kOrigin, zd::DiscPoint(0.5, 0.0)));
  EXPECT_LT(std::abs(t1.final().f - 0.4794255386042030), 1e-10);
  EXPECT_LT(std::abs(t1.final().fprime - 0.8775825618903728), 1e-10);
  EXPECT_LE(t1.tolerance_achieved, 1e-10);

  const auto t2 = zd::integrate(minus_two_over_square(), {kOrigin, 1.0, -2.0},
                                zd::PathSpec::segment(kOrigin, zd::DiscPoint(0.5, 0.0)));
  EXPECT_LT(std::abs(t2.final().f - 0.25), 1e-10);
  EXPECT_LT(std::abs(t2.final().fprime + 1.0), 1e-10);
}

TEST(Integrate, TraceIsOrderedAndHitsWaypoints) {
  const zd::PathSpec path({kOrigin, zd::DiscPoint(0.5, 0.0), zd::DiscPoint(0.5, 0.5)}, 8);
  const auto tr = zd::integrate(zd::constant(1.0), {kOrigin, 0.0, 1.0}, path);
  ASSERT_EQ(tr.states.size(), tr.params.size());
  for (std::size_t i = 1; i < tr.params.size(); ++i) {
    EXPECT_GT(tr.params[i], tr.params[i - 1]);
    EXPECT_LE(std::abs(tr.states[i].position.value() - tr.states[i - 1].position.value()), 1.0 / 8 * 0.5 + 1e-12);
  }
  EXPECT_NEAR(tr.params.back(), 1.0, 1e-12);
  EXPECT_EQ(tr.final().position.value(), cplx(0.5, 0.5));
  EXPECT_LT(std::abs(tr.final().f - std::sin(cplx(0.5, 0.5))), 1e-10);
  EXPECT_THROW(zd::integrate(zd::constant(1.0), {zd::DiscPoint(0.1, 0.0), 0.0, 1.0}, path), zd::PreconditionError);
}

TEST(Integrate, TraceCsv) {
  const auto tr = zd::integrate(zd::constant(0.0), {kOrigin, 0.0, 1.0},
                                zd::PathSpec::segment(kOrigin, zd::DiscPoint(0.5, 0.0), 2));
  std::ostringstream out;
  zd::write_trace_csv(out, tr);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "s,re_z,im_z,re_f,im_f,re_fprime,im_fprime");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
  }
  EXPECT_EQ(rows, static_cast<int>(tr.states.size()));
}

TEST(Integrate, SingularCoefficientUnderflows) {
  // A has a pole on the path: the step size collapses.
  const auto a = zd::AnalyticFunction::closed_form("1/(z-0.3)^3", [](cplx z) {
    const cplx u = 1.0 / (z - 0.3);
    return zd::Jet{u * u * u, 0.0, 0.0, 0.0};
  });
  EXPECT_THROW(zd::integrate(a, {kOrigin, 1.0, 0.0}, zd::PathSpec::segment(kOrigin, zd::DiscPoint(0.6, 0.0))),
               zd::IntegrationError);
}

TEST(Integrate, WronskianConservedAlongTraces) {
  const auto bundle = zd::build_coefficient({0.0, 0.5, cplx(-0.3, 0.6)});
  const auto path = zd::PathSpec({kOrigin, zd::DiscPoint(0.8, 0.1), zd::DiscPoint(-0.2, 0.85), zd::DiscPoint(-0.9, 0.0)}, 32);
  const auto fj = bundle.f.jet(0.0, 1);
  const auto [g0, gp0] = zd::wronskian_partner(fj.value, fj.d1);
  const double tol = 1e-12;
  const auto tf = zd::integrate(bundle.A, {kOrigin, fj.value, fj.d1}, path, tol);
  const auto tg = zd::integrate(bundle.A, {kOrigin, g0, gp0}, path, tol);
  EXPECT_LT(std::abs(fj.value * gp0 - fj.d1 * g0 - 1.0), 1e-15);
  // Both traces share step positions only at waypoints, so check the first
  // integral on each trace against an independent solve of the partner.
  const zd::OdeSolution gsol(bundle.A, {kOrigin, g0, gp0}, tol);
  double worst = 0.0;
  for (std::size_t i = 0; i < tf.states.size(); i += 7) {
    const auto& s = tf.states[i];
    const auto g = gsol.at(s.position.value());
    worst = std::max(worst, std::abs(s.f * g.fprime - s.fprime * g.f - 1.0));
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_LT(std::abs(tf.final().f * tg.final().fprime - tf.final().fprime * tg.final().f - 1.0), 1e-9);
}

TEST(Integrate, PathIndependence) {
  const auto bundle = zd::build_coefficient(zd::exponential_sequence(3));
  const auto fj = bundle.f.jet(0.0, 1);
  const zd::OdeState s0{kOrigin, fj.value, fj.d1};
  std::mt19937_64 rng(12);
  for (int i = 0; i < 5; ++i) {
    const zd::DiscPoint end(random_point(rng, 0.85));
    const zd::DiscPoint via(random_point(rng, 0.85));
    const auto direct = zd::integrate(bundle.A, s0, zd::PathSpec({kOrigin, end}, 16)).final();
    const auto detour = zd::integrate(bundle.A, s0, zd::PathSpec({kOrigin, via, end}, 16)).final();
    const double scale = std::max(std::abs(direct.f), std::abs(direct.fprime));
    EXPECT_LT(std::abs(direct.f - detour.f) / scale, 1e-8);
    EXPECT_LT(std::abs(direct.fprime - detour.fprime) / scale, 1e-8);
    EXPECT_LT(rel(direct.f, bundle.f(end.value())), 1e-8);
  }
}

TEST(CountZeros, Examples) {
  const double pi = std::numbers::pi;
  const auto s = zd::count_zeros(zd::constant(pi * pi), {kOrigin, 0.0, pi}, {0.0, 0.9});
  EXPECT_EQ(s.count, 1);
  EXPECT_LT(std::abs(s.raw - 1.0), 0.02);
  const auto z = zd::count_zeros(zd::constant(0.0), {kOrigin, 0.0, 1.0}, {0.0, 0.5});
  EXPECT_EQ(z.count, 1);
  EXPECT_LT(std::abs(z.raw - 1.0), 0.02);
  const auto e = zd::count_zeros(zd::constant(-1.0), {kOrigin, 1.0, 1.0}, {cplx(0.1, 0.1), 0.6});
  EXPECT_EQ(e.count, 0);
}

TEST(CountZeros, OffCenterAndIntegrality) {
  // f = sin(pi z / 0.4) has zeros at 0, +-0.4, +-0.8.
  const double k = std::numbers::pi / 0.4;
  const zd::OdeState init{kOrigin, 0.0, k};
  EXPECT_EQ(zd::count_zeros(zd::constant(k * k), init, {0.0, 0.6}).count, 3);
  EXPECT_EQ(zd::count_zeros(zd::constant(k * k), init, {cplx(0.4, 0.0), 0.2}).count, 1);
  const auto all = zd::count_zeros(zd::constant(k * k), init, {0.0, 0.9});
  EXPECT_EQ(all.count, 5);
  EXPECT_LT(std::abs(all.raw - 5.0), 0.02);
}

TEST(CountZeros, NudgesOffAZero) {
  // The zeros 0 and 0.4 lie on the contour |z - 0.2| = 0.2; the first nudge
  // enlarges the radius and encloses both.
  const double k = std::numbers::pi / 0.4;
  const auto c = zd::count_zeros(zd::constant(k * k), {kOrigin, 0.0, k}, {cplx(0.2, 0.0), 0.2});
  EXPECT_EQ(c.nudges, 1);
  EXPECT_EQ(c.count, 2);
  zd::ContourOptions none;
  none.max_nudges = 0;
  EXPECT_THROW(zd::count_zeros(zd::constant(k * k), {kOrigin, 0.0, k}, {cplx(0.2, 0.0), 0.2}, 1e-10, none),
               zd::ContourError);
}

TEST(CountZeros, RejectsContourOutsideDisc) {
  EXPECT_THROW(zd::count_zeros(zd::constant(0.0), {kOrigin, 0.0, 1.0}, {0.5, 0.6}), zd::DomainError);
}

TEST(Verify, SingleZeroAtOrigin) {
  const auto rep = zd::verify_prescribed_zeros(zd::build_coefficient({0.0}));
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.max_abs_f_at_zeros, 0.0);
  EXPECT_EQ(rep.counted.count, 1);
  EXPECT_EQ(rep.expected, 1);
  EXPECT_LT(rep.radial_rel_error, 1e-12);
}

TEST(Verify, TwoZeros) {
  const auto rep = zd::verify_prescribed_zeros(zd::build_coefficient({0.0, 0.5}));
  EXPECT_TRUE(rep.passed()) << (rep.mismatches.empty() ? "" : rep.mismatches.front());
  EXPECT_EQ(rep.counted.count, 2);
  EXPECT_LT(rep.max_abs_f_at_zeros, 1e-8);
  EXPECT_LT(rep.radial_rel_error, 1e-8);
  EXPECT_LT(std::abs(rep.counted.raw - 2.0), 0.02);
}

TEST(SecondSolution, Examples) {
  const auto r = zd::second_solution(zd::identity(), zd::DiscPoint(0.5, 0.0), zd::DiscPoint(0.8, 0.3));
  const cplx z(0.8, 0.3);
  EXPECT_LT(std::abs(r.g - (2.0 * z - 1.0)), 1e-12);
  EXPECT_LT(std::abs(z * r.gprime - r.g - 1.0), 1e-12);

  const auto e = zd::second_solution(zd::exp_function(), kOrigin, zd::DiscPoint(0.3, -0.6));
  const cplx w(0.3, -0.6);
  // g = e^z (1 - e^{-2z}) / 2 for base 0
  EXPECT_LT(std::abs(e.g - 0.5 * (std::exp(w) - std::exp(-w))), 1e-12);
  EXPECT_LT(std::abs(std::exp(w) * e.gprime - std::exp(w) * e.g - 1.0), 1e-10);

  EXPECT_THROW(zd::second_solution(zd::identity(), zd::DiscPoint(-0.5, 0.0), zd::DiscPoint(0.5, 0.0)), zd::DomainError);
  EXPECT_THROW(zd::second_solution(zd::identity(), kOrigin, kOrigin), zd::DomainError);
}

TEST(SecondSolution, WronskianAtSamplePoints) {
  const auto f = zd::exp(zd::polynomial({0.1, 0.7, -0.3}));
  const zd::DiscPoint base(0.1, 0.2);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    const zd::DiscPoint z(random_point(rng, 0.9));
    const auto s = zd::second_solution(f, base, z);
    const auto fj = f.jet(z.value(), 1);
    EXPECT_LT(std::abs(fj.value * s.gprime - fj.d1 * s.g - 1.0), 1e-9);
  }
}

TEST(OdeSecondSolution, WronskianPartner) {
  const auto [g, gp] = zd::wronskian_partner(cplx(0.3, 0.4), cplx(-1.0, 2.0));
  EXPECT_LT(std::abs(cplx(0.3, 0.4) * gp - cplx(-1.0, 2.0) * g - 1.0), 1e-15);
  EXPECT_THROW(zd::wronskian_partner(0.0, 0.0), zd::DegenerateInputError);

  // For A = -1 and f = e^z the partner solves the same equation: g = a e^z + b e^{-z}.
  const auto sol = zd::ode_second_solution(zd::constant(-1.0), zd::exp_function());
  const auto gf = sol.as_function();
  std::mt19937_64 rng(14);
  for (int i = 0; i < 10; ++i) {
    const cplx z = random_point(rng, 0.9);
    const auto gj = gf.jet(z, 3);
    EXPECT_LT(std::abs(zd::wronskian(zd::exp_function().jet(z, 1), gj) - 1.0), 1e-9);
    EXPECT_LT(std::abs(gj.d2 - gj.value), 1e-12);
  }
}

TEST(Transport, Examples) {
  std::mt19937_64 rng(15);
  const zd::DiscPoint a(0.3, -0.5);
  for (int i = 0; i < 10; ++i) {
    const cplx z = random_point(rng, 0.95);
    EXPECT_EQ(zd::conformal_transport(zd::constant(0.0), a)(z), cplx(0.0));
    EXPECT_LT(std::abs(zd::conformal_transport(zd::constant(-1.0), kOrigin)(z) + 1.0), 1e-15);
  }
}

TEST(Transport, MatchedGridIdentity) {
  const auto bundle = zd::build_coefficient({0.0, 0.5});
  const auto grid = zd::make_grid(0.99, 6, 24);
  std::mt19937_64 rng(16);
  for (int i = 0; i < 5; ++i) {
    const zd::DiscPoint a(random_point(rng, 0.8));
    const auto b = zd::conformal_transport(bundle.A, a);
    const auto image = zd::transform_grid(grid, zd::Automorphism(a));
    const double lhs = zd::growth_norm(b, 2.0, grid).value;
    const double rhs = zd::growth_norm(bundle.A, 2.0, image).value;
    EXPECT_LT(std::abs(lhs - rhs) / rhs, 1e-10);
  }
}

TEST(Transport, SolutionSolvesTransportedEquation) {
  const double pi = std::numbers::pi;
  const auto f = zd::AnalyticFunction::closed_form("sin(pi z)", [pi](cplx z) {
    return zd::Jet{std::sin(pi * z), pi * std::cos(pi * z), -pi * pi * std::sin(pi * z), -pi * pi * pi * std::cos(pi * z)};
  });
  const zd::DiscPoint a(0.4, 0.3);
  const auto b = zd::conformal_transport(zd::constant(pi * pi), a);
  const auto ft = zd::transport_solution(f, a);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const cplx z = random_point(rng, 0.9);
    EXPECT_LT(zd::ode_relative_residual(ft.jet(z, 2), b(z)), 1e-10);
  }
  // The transported zero is the phi-preimage of 0, i.e. phi(0) = a.
  const auto fj = ft.jet(0.0, 1);
  const auto c = zd::count_zeros(b, {kOrigin, fj.value, fj.d1}, {0.0, 0.8});
  EXPECT_EQ(c.count, 1);
  EXPECT_LT(std::abs(ft(a.value())), 1e-14);
}

TEST(Transport, BranchTracking) {
  const zd::Automorphism phi(zd::DiscPoint(0.6, 0.2));
  std::vector<cplx> loop;
  for (int k = 0; k <= 256; ++k) loop.push_back(std::polar(0.9, 2.0 * std::numbers::pi * k / 256));
  const auto branch = zd::track_inverse_sqrt_branch(phi, loop);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    EXPECT_LT(std::abs(branch[i] * branch[i] * phi.derivative(loop[i]) - 1.0), 1e-12);
    EXPECT_LT(std::abs(branch[i] - 1.0 / zd::mobius_half_power_jet(phi, 1, loop[i]).value), 1e-12);
  }
  const auto f = zd::exp_function();
  const auto along = zd::transport_solution_along(f, zd::DiscPoint(0.6, 0.2), loop);
  const auto global = zd::transport_solution(f, zd::DiscPoint(0.6, 0.2));
  for (std::size_t i = 0; i < loop.size(); ++i) EXPECT_LT(std::abs(along[i] - global(loop[i])), 1e-12);
  // Adjacent samples on opposite sides of the pole image cannot be joined.
  const zd::Automorphism steep(zd::DiscPoint(0.999, 0.0));
  EXPECT_THROW(zd::track_inverse_sqrt_branch(steep, {cplx(0.99, 0.011), cplx(0.99, -0.011)}), zd::BranchError);
}

TEST(Theorem1Bound, Examples) {
  const auto one = zd::theorem1_bound(1.0);
  EXPECT_TRUE(one.one_point);
  EXPECT_EQ(one.value, 0.0);
  const double t = 1.0 - 2.0 * 3.0 / 10.0;
  const double direct = (2.0 * std::numbers::pi + 1.0) * std::sqrt(t) / std::pow(1.0 - std::sqrt(t), 2);
  EXPECT_NEAR(zd::theorem1_bound(9.0).value, direct, 1e-9);
  EXPECT_NEAR(zd::theorem1_bound(9.0).value, 34.098, 1e-3);
  const auto below = zd::theorem1_bound(0.5);
  EXPECT_TRUE(below.one_point);
  EXPECT_TRUE(below.out_of_domain);
  EXPECT_THROW(zd::theorem1_bound(INFINITY), zd::DomainError);
}

TEST(Theorem1Bound, MonotoneAndContinuousAtOne) {
  double previous = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double n = std::pow(10.0, 4.0 * i / 400.0);
    const double v = zd::theorem1_bound(n).value;
    EXPECT_GT(v, previous) << n;
    previous = v;
  }
  EXPECT_LT(zd::theorem1_bound(1.0 + 1e-6).value, 1e-2);
}

TEST(Normality, ZeroAtOrigin) {
  const auto f = zd::identity();
  const auto g = zd::constant(-1.0);
  const auto rep = zd::normality_diagnostic(f, g, zd::make_grid(0.99, 8, 32), kOrigin);
  EXPECT_LE(rep.sup_sampled, 1.0);
  for (const auto& s : rep.per_point) {
    const double r2 = std::norm(s.z.value());
    EXPECT_NEAR(s.value, (1.0 - r2) / (1.0 + r2), 1e-15);
  }
  EXPECT_THROW(zd::normality_diagnostic(f, zd::constant(1.0), zd::make_grid(0.9, 2, 4)), zd::PreconditionError);
}

TEST(Normality, ValuesAtZerosMatchClosedForm) {
  const auto seq = zd::exponential_sequence(4);
  const auto bundle = zd::build_coefficient(seq);
  const auto g = zd::ode_second_solution(bundle.A, bundle.f).as_function();
  const auto rep = zd::normality_diagnostic(bundle.f, g, zd::make_grid(0.95, 3, 8), kOrigin, &bundle.zeros);
  ASSERT_EQ(rep.at_zeros.size(), seq.size());
  for (const auto& s : rep.at_zeros) {
    // f(z_n) = 0 and W = 1 force g(z_n) = -1/f'(z_n).
    const cplx zn = s.z.value();
    const double closed = (1.0 - std::norm(zn)) * std::norm(bundle.f.jet(zn, 1).d1);
    EXPECT_LT(std::abs(s.value - closed) / closed, 1e-7);
  }
}

TEST(Normality, SchwarzianOfRatioIsTwiceCoefficient) {
  const auto bundle = zd::build_coefficient({0.0, 0.5, cplx(0.0, -0.6)});
  std::mt19937_64 rng(18);
  int used = 0;
  for (int attempt = 0; used < 20 && attempt < 1000; ++attempt) {
    const cplx z = random_point(rng, 0.9);
    if (bundle.evaluator->patch_index(z) >= 0 || std::abs(bundle.f(z)) < 1e-3) continue;
    ++used;
    const cplx two_a = 2.0 * bundle.A(z);
    EXPECT_LT(std::abs(zd::ratio_schwarzian(bundle.f, z) - two_a) / std::max(1.0, std::abs(two_a)), 1e-6);
  }
  EXPECT_EQ(used, 20);
}
