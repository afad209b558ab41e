#pragma once

// Coefficients A with prescribed zeros.
//
// For a uniformly separated sequence with Blaschke product B, take k solving
//   k(z_n) = -B''(z_n) / (2 B'(z_n)^2),
// set h = B k and f = B e^h. Then f'' + A f = 0 with
//   A = -(B'' + 2 B' h') / B - (h')^2 - h'',
// and the interpolation condition makes the numerator vanish at every z_n, so
// A extends analytically across the zeros of B.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "zerodisc/analytic.hpp"
#include "zerodisc/blaschke.hpp"
#include "zerodisc/errors.hpp"
#include "zerodisc/geometry.hpp"
#include "zerodisc/sequences.hpp"

namespace zerodisc {

inline constexpr double kUniformSeparationWarning = 0.05;

struct InterpolationProblem {
  PointSequence nodes;
  std::vector<cplx> targets;
  double uniform_separation = 1.0;
  std::vector<std::string> warnings;
};

/// Targets -B''(z_n) / (2 B'(z_n)^2) from the at-zero derivatives of B.
inline InterpolationProblem interpolation_targets(const PointSequence& seq) {
  InterpolationProblem prob;
  prob.nodes = seq;
  if (seq.size() >= 2) prob.uniform_separation = uniform_separation_constant(seq);
  if (prob.uniform_separation < kUniformSeparationWarning) {
    prob.warnings.push_back("uniform separation constant " + std::to_string(prob.uniform_separation) +
                            " is below 0.05; targets may be large");
  }
  const BlaschkeProduct b(seq);
  prob.targets.reserve(seq.size());
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const cplx d1 = derivative_at_zero(b, n).derivative;
    if (std::abs(d1) < kCriticalPointThreshold) {
      throw CriticalPointError("interpolation_targets: |B'(z_n)| below 1e-12 at index " + std::to_string(n));
    }
    const cplx d2 = second_derivative_at_zero(b, n);
    prob.targets.push_back(cplx(0.0) - d2 / (2.0 * d1 * d1));
  }
  return prob;
}

/// sup_n (1 - |z_n|^2) |B''(z_n) / B'(z_n)|.
inline double bloch_ratio_sup(const BlaschkeProduct& b) {
  double best = 0.0;
  for (std::size_t n = 0; n < b.size(); ++n) {
    const cplx zn = b.zeros()[n].value();
    best = std::max(best, (1.0 - std::norm(zn)) * std::abs(second_derivative_at_zero(b, n) /
                                                             derivative_at_zero(b, n).derivative));
  }
  return best;
}

/// inf_n (1 - |z_n|^2) |B'(z_n)|.
inline double derivative_floor(const BlaschkeProduct& b) {
  double best = 1.0;
  for (std::size_t n = 0; n < b.size(); ++n) best = std::min(best, derivative_at_zero(b, n).normalized);
  return best;
}

inline constexpr double kConditionLimit = 1e10;
inline constexpr double kRidge = 1e-10;
inline constexpr double kInterpolationResidualLimit = 1e-8;

/// k(z) = sum_n c_n ((1 - |z_n|^2) / (1 - conj(z_n) z))^2.
class KernelInterpolant {
 public:
  KernelInterpolant(PointSequence nodes, std::vector<cplx> coeffs)
      : nodes_(std::move(nodes)), coeffs_(std::move(coeffs)) {}

  static cplx kernel(cplx zn, cplx z) {
    const cplx q = (1.0 - std::norm(zn)) / (1.0 - std::conj(zn) * z);
    return q * q;
  }

  Jet jet(cplx z) const {
    Jet acc{};
    for (std::size_t n = 0; n < coeffs_.size(); ++n) {
      const cplx zn = nodes_[n].value();
      const cplx czn = std::conj(zn);
      const cplx u = 1.0 / (1.0 - czn * z);
      const double s = (1.0 - std::norm(zn)) * (1.0 - std::norm(zn));
      const cplx c = coeffs_[n] * s;
      const cplx u2 = u * u;
      acc.value += c * u2;
      acc.d1 += c * 2.0 * czn * u2 * u;
      acc.d2 += c * 6.0 * czn * czn * u2 * u2;
      acc.d3 += c * 24.0 * czn * czn * czn * u2 * u2 * u;
    }
    return acc;
  }

  cplx operator()(cplx z) const {
    cplx acc = 0.0;
    for (std::size_t n = 0; n < coeffs_.size(); ++n) acc += coeffs_[n] * kernel(nodes_[n].value(), z);
    return acc;
  }

  AnalyticFunction as_function() const {
    const auto self = std::make_shared<const KernelInterpolant>(*this);
    return AnalyticFunction::closed_form(
        "k", [self](cplx z) { return self->jet(z); }, [self](cplx z) { return (*self)(z); });
  }

  const std::vector<cplx>& coefficients() const noexcept { return coeffs_; }
  const PointSequence& nodes() const noexcept { return nodes_; }

 private:
  PointSequence nodes_;
  std::vector<cplx> coeffs_;
};

struct InterpolationSolution {
  KernelInterpolant interpolant;
  double residual = 0.0;   // max |k(z_m) - target_m|
  double condition = 1.0;  // reciprocal of the LU condition estimate
  bool regularized = false;
};

/// Dense solve of k(z_m) = target_m in the kernel basis. Partial-pivot LU; when
/// the condition estimate exceeds 1e10 the system is re-solved as ridge least
/// squares (M^H M + lambda I) c = M^H t with lambda = 1e-10 * trace(M^H M) / n.
/// Residuals above 1e-8 * max(1, max |target|) are an error.
inline InterpolationSolution solve_interpolation(const InterpolationProblem& prob) {
  const std::size_t n = prob.nodes.size();
  if (prob.targets.size() != n) throw PreconditionError("solve_interpolation: target count differs from node count");
  if (n == 0) return {KernelInterpolant(prob.nodes, {}), 0.0, 1.0, false};
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXcd t(static_cast<Eigen::Index>(n));
  double target_scale = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    t(static_cast<Eigen::Index>(r)) = prob.targets[r];
    target_scale = std::max(target_scale, std::abs(prob.targets[r]));
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          KernelInterpolant::kernel(prob.nodes[c].value(), prob.nodes[r].value());
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const double rcond = lu.rcond();
  InterpolationSolution sol{KernelInterpolant(prob.nodes, {}), 0.0, rcond > 0.0 ? 1.0 / rcond : INFINITY, false};
  Eigen::VectorXcd c;
  if (sol.condition > kConditionLimit) {
    const Eigen::MatrixXcd mh = m.adjoint();
    Eigen::MatrixXcd normal = mh * m;
    const double lambda = kRidge * normal.trace().real() / static_cast<double>(n);
    normal.diagonal().array() += lambda;
    c = normal.ldlt().solve(mh * t);
    sol.regularized = true;
  } else {
    c = lu.solve(t);
  }
  sol.residual = (m * c - t).cwiseAbs().maxCoeff();
  std::vector<cplx> coeffs(c.data(), c.data() + c.size());
  sol.interpolant = KernelInterpolant(prob.nodes, std::move(coeffs));
  if (!(sol.residual <= kInterpolationResidualLimit * target_scale)) {
    throw InterpolationError("solve_interpolation: residual " + std::to_string(sol.residual) +
                             " exceeds 1e-8 (condition estimate " + std::to_string(sol.condition) +
                             (sol.regularized ? ", ridge-regularized)" : ")"));
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Coefficient bundles.

inline constexpr double kSingularFraction = 0.05;

/// Evaluates A = -(B'' + 2 B' h')/B - h'^2 - h'' with h = B k. Inside
/// Delta(z_n, eps_n), eps_n = 0.05 * local separation, A is recovered from
/// the Cauchy integral over |zeta - z_n| = 2 eps_n (1 - |z_n|^2), where the
/// direct quotient is well conditioned.
class CoefficientEvaluator {
 public:
  CoefficientEvaluator(BlaschkeProduct b, KernelInterpolant k) : b_(std::move(b)), k_(std::move(k)) {
    const auto& zeros = b_.zeros();
    for (std::size_t n = 0; n < zeros.size(); ++n) {
      const double sep = zeros.size() >= 2 ? local_separation(zeros, n) : 1.0;
      eps_.push_back(kSingularFraction * sep);
    }
  }

  cplx direct(cplx z) const {
    const Jet bj = b_.jet(z, 2);
    const Jet hj = bj * k_.jet(z);
    return -(bj.d2 + 2.0 * bj.d1 * hj.d1) / bj.value - hj.d1 * hj.d1 - hj.d2;
  }

  /// Index of the patch containing z, or -1.
  int patch_index(cplx z) const {
    const auto& zeros = b_.zeros();
    for (std::size_t n = 0; n < zeros.size(); ++n) {
      if (pseudo_distance(zeros[n].value(), z) <= eps_[n]) return static_cast<int>(n);
    }
    return -1;
  }

  double patch_radius(std::size_t n) const {
    return 2.0 * eps_[n] * (1.0 - std::norm(b_.zeros()[n].value()));
  }

  cplx operator()(cplx z) const {
    const int n = patch_index(z);
    if (n < 0) return direct(z);
    const auto idx = static_cast<std::size_t>(n);
    return cauchy_interior_value([this](cplx w) { return direct(w); }, b_.zeros()[idx].value(), patch_radius(idx), z);
  }

  double singular_fraction_radius(std::size_t n) const { return eps_.at(n); }

  /// (log f, f'/f) for f = B e^h, with log B summed factorwise so neither part
  /// overflows where e^h does.
  std::pair<cplx, cplx> log_f(cplx z) const {
    cplx log_b = 0.0;
    for (std::size_t n = 0; n < b_.size(); ++n) log_b += std::log(b_.factor(n, z));
    const Jet bj = b_.jet(z, 1);
    const Jet hj = bj * k_.jet(z);
    return {log_b + hj.value, bj.d1 / bj.value + hj.d1};
  }

 private:
  BlaschkeProduct b_;
  KernelInterpolant k_;
  std::vector<double> eps_;
};

struct BundleDiagnostics {
  double interp_residual = 0.0;
  double interp_condition = 1.0;
  bool interp_regularized = false;
  double h2_norm_grid = 0.0;       // growth_norm(A, 2) on the diagnostics grid
  double h2_grid_max_modulus = 0.0;
  double singular_radius = 0.0;    // smallest eps_n
  double ode_residual = 0.0;       // max relative |f'' + A f| at random test points
  double uniform_separation = 1.0;
  double bloch_ratio = 0.0;        // sup (1 - |z_n|^2) |B''/B'|(z_n)
  double derivative_floor = 1.0;   // inf (1 - |z_n|^2) |B'(z_n)|
  double density_upper = 0.0;      // finite-radius proxy at norm_grid_modulus
  double beta = 0.5;               // (density_upper + 1) / 2
  std::vector<std::string> warnings;
};

struct CoefficientBundle {
  AnalyticFunction A;
  AnalyticFunction f;
  AnalyticFunction h;
  AnalyticFunction k;
  AnalyticFunction B;
  PointSequence zeros;
  std::vector<cplx> targets;
  std::vector<cplx> kernel_coefficients;
  std::shared_ptr<const CoefficientEvaluator> evaluator;
  BundleDiagnostics diagnostics;
};

struct BuildOptions {
  int residual_points = 100;
  unsigned long long seed = 1;
  double residual_limit = 1e-7;
  double norm_grid_modulus = 0.999;
  int norm_grid_radial = 10;
  int norm_grid_angular = 256;
};

/// Relative ODE residual |f'' + A f| / max(|f''|, |A f|), zero when both vanish.
inline double ode_relative_residual(const Jet& fj, cplx a) {
  const double num = std::abs(fj.d2 + a * fj.value);
  const double den = std::max(std::abs(fj.d2), std::abs(a * fj.value));
  return den == 0.0 ? num : num / den;
}

inline CoefficientBundle build_coefficient(const PointSequence& seq, const BuildOptions& opts = {}) {
  if (seq.empty()) throw DegenerateInputError("build_coefficient: sequence must be nonempty");
  CoefficientBundle bundle;
  bundle.zeros = seq;

  const InterpolationProblem prob = interpolation_targets(seq);
  const InterpolationSolution sol = solve_interpolation(prob);
  bundle.targets = prob.targets;
  bundle.kernel_coefficients = sol.interpolant.coefficients();

  const BlaschkeProduct b(seq);
  bundle.B = b.as_function();
  bundle.k = sol.interpolant.as_function();
  bundle.h = bundle.B * bundle.k;
  bundle.f = bundle.B * exp(bundle.h);
  auto eval = std::make_shared<const CoefficientEvaluator>(b, sol.interpolant);
  bundle.evaluator = eval;
  bundle.A = AnalyticFunction::from_values("A", [eval](cplx z) { return (*eval)(z); });

  auto& d = bundle.diagnostics;
  d.interp_residual = sol.residual;
  d.interp_condition = sol.condition;
  d.interp_regularized = sol.regularized;
  d.uniform_separation = prob.uniform_separation;
  d.warnings = prob.warnings;
  d.bloch_ratio = bloch_ratio_sup(b);
  d.derivative_floor = derivative_floor(b);
  d.singular_radius = 1.0;
  for (std::size_t n = 0; n < seq.size(); ++n) d.singular_radius = std::min(d.singular_radius, eval->singular_fraction_radius(n));

  // Self-consistency at random points away from the patches.
  double outer = 0.9;
  for (const auto& z : seq) outer = std::max(outer, 0.5 * (1.0 + z.abs()));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int accepted = 0;
  for (int attempt = 0; accepted < opts.residual_points && attempt < 100 * opts.residual_points; ++attempt) {
    const cplx z = std::polar(outer * std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
    bool near = false;
    for (std::size_t n = 0; n < seq.size(); ++n) {
      if (pseudo_distance(seq[n].value(), z) <= 2.0 * eval->singular_fraction_radius(n)) near = true;
    }
    if (near) continue;
    ++accepted;
    d.ode_residual = std::max(d.ode_residual, ode_relative_residual(bundle.f.jet(z, 2), bundle.A(z)));
  }
  if (d.ode_residual > opts.residual_limit) {
    throw ConstructionError("build_coefficient: relative residual of f'' + A f is " + std::to_string(d.ode_residual));
  }

  const DiscGrid grid = make_grid(opts.norm_grid_modulus, opts.norm_grid_radial, opts.norm_grid_angular);
  d.h2_norm_grid = growth_norm(bundle.A, 2.0, grid).value;
  d.h2_grid_max_modulus = grid.max_modulus();
  d.density_upper = density_upper(seq, opts.norm_grid_modulus, default_density_centers(seq, 256)).value;
  d.beta = 0.5 * (d.density_upper + 1.0);
  return bundle;
}

// ---------------------------------------------------------------------------
// Zero-free solutions and the corona identity.

struct ZeroFreeExample {
  AnalyticFunction A;
  AnalyticFunction f1;  // e^{g + h}
  AnalyticFunction f2;  // e^{g - h}
  AnalyticFunction h;   // h' = e^{-2g}, h(0) = 0
  double corona_lower_bound = 0.0;  // min over the grid of |f1| + |f2|
};

/// Primitive h of e^{-2g} from 0 along the straight segment.
inline AnalyticFunction zero_free_primitive(const AnalyticFunction& g, int samples = 16) {
  const auto hprime = exp(cplx(-2.0) * g);
  return AnalyticFunction::closed_form("h", [g, hprime, samples](cplx z) {
    const Jet hp = hprime.jet(z, 2);
    const cplx value = (z == cplx(0.0)) ? cplx(0.0)
                                        : path_primitive(hprime, PathSpec::segment(DiscPoint(0.0, 0.0), DiscPoint(z), samples));
    return Jet{value, hp.value, hp.d1, hp.d2};
  });
}

inline ZeroFreeExample zero_free_example(const AnalyticFunction& g, const DiscGrid& grid = make_grid(0.99, 6, 32)) {
  ZeroFreeExample ex;
  ex.h = zero_free_primitive(g);
  ex.f1 = exp(g + ex.h);
  ex.f2 = exp(g - ex.h);
  ex.A = AnalyticFunction::from_values("A", [g](cplx z) {
    const Jet gj = g.jet(z, 2);
    return -gj.d2 - gj.d1 * gj.d1 - std::exp(-4.0 * gj.value);
  });
  double lower = INFINITY;
  for (const auto& p : grid) lower = std::min(lower, std::abs(ex.f1(p.value())) + std::abs(ex.f2(p.value())));
  ex.corona_lower_bound = lower;
  return ex;
}

inline constexpr double kPartitionTolerance = 1e-10;

/// A = f1 g1'' + f2 g2'' + 2 (f1' g1' + f2' g2'), valid when f1 g1 + f2 g2 = 1
/// and f1, f2 solve f'' + A f = 0.
inline AnalyticFunction corona_coefficient(const AnalyticFunction& f1, const AnalyticFunction& f2,
                                           const AnalyticFunction& g1, const AnalyticFunction& g2,
                                           const DiscGrid& grid = make_grid(0.95, 6, 32)) {
  double worst = 0.0;
  for (const auto& p : grid) {
    const cplx z = p.value();
    worst = std::max(worst, std::abs(f1(z) * g1(z) + f2(z) * g2(z) - 1.0));
  }
  if (!(worst < kPartitionTolerance)) {
    throw PreconditionError("corona_coefficient: |f1 g1 + f2 g2 - 1| reaches " + std::to_string(worst));
  }
  return AnalyticFunction::from_values("A_corona", [f1, f2, g1, g2](cplx z) {
    const Jet a = f1.jet(z, 2), b = f2.jet(z, 2), c = g1.jet(z, 2), d = g2.jet(z, 2);
    return a.value * c.d2 + b.value * d.d2 + 2.0 * (a.d1 * c.d1 + b.d1 * d.d1);
  });
}

}  // namespace zerodisc
