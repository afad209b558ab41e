#pragma once

// Jet-evaluable analytic functions on the disc.
//
// An AnalyticFunction either carries closed-form derivatives up to order three
// or only values, in which case derivatives come from a trapezoidal Cauchy
// integral on a small circle. Combinators propagate jets exactly (Leibniz and
// Faa di Bruno to order three), so compositional constructions such as
// B * exp(B k) keep closed-form derivatives.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "zerodisc/errors.hpp"
#include "zerodisc/geometry.hpp"
#include "zerodisc/quadrature.hpp"

namespace zerodisc {

/// Value and first three complex derivatives at a point.
struct Jet {
  cplx value{};
  cplx d1{};
  cplx d2{};
  cplx d3{};

  cplx operator[](int k) const noexcept {
    switch (k) {
      case 0: return value;
      case 1: return d1;
      case 2: return d2;
      default: return d3;
    }
  }
  bool finite() const noexcept {
    for (int k = 0; k < 4; ++k) {
      const cplx v = (*this)[k];
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
  }
  /// Zero out derivatives above `order`.
  Jet truncated(int order) const noexcept {
    Jet j = *this;
    if (order < 3) j.d3 = 0.0;
    if (order < 2) j.d2 = 0.0;
    if (order < 1) j.d1 = 0.0;
    return j;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) noexcept {
  return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}
inline Jet operator-(const Jet& a, const Jet& b) noexcept {
  return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}
inline Jet operator-(const Jet& a) noexcept { return {-a.value, -a.d1, -a.d2, -a.d3}; }
inline Jet operator*(cplx c, const Jet& a) noexcept {
  return {c * a.value, c * a.d1, c * a.d2, c * a.d3};
}
/// Leibniz rule to order three.
inline Jet operator*(const Jet& f, const Jet& g) noexcept {
  return {f.value * g.value,
          f.d1 * g.value + f.value * g.d1,
          f.d2 * g.value + 2.0 * f.d1 * g.d1 + f.value * g.d2,
          f.d3 * g.value + 3.0 * f.d2 * g.d1 + 3.0 * f.d1 * g.d2 + f.value * g.d3};
}

/// Jet of outer(inner(z)) given the outer jet at inner(z) and the inner jet at z.
inline Jet chain(const Jet& outer, const Jet& inner) noexcept {
  const cplx u1 = inner.d1, u2 = inner.d2, u3 = inner.d3;
  return {outer.value,
          outer.d1 * u1,
          outer.d2 * u1 * u1 + outer.d1 * u2,
          outer.d3 * u1 * u1 * u1 + 3.0 * outer.d2 * u1 * u2 + outer.d1 * u3};
}

inline Jet exp(const Jet& u) noexcept {
  const cplx e = std::exp(u.value);
  return chain({e, e, e, e}, u);
}

inline Jet reciprocal(const Jet& u) noexcept {
  const cplx r = 1.0 / u.value;
  return chain({r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r}, u);
}

inline Jet constant_jet(cplx c) noexcept { return {c, 0.0, 0.0, 0.0}; }
inline Jet identity_jet(cplx z) noexcept { return {z, 1.0, 0.0, 0.0}; }

enum class DerivativeMode { closed_form, cauchy_quadrature };

inline constexpr int kDefaultCauchyNodes = 64;

/// Circle radius used for Cauchy derivatives at z.
inline double cauchy_radius(cplx z) noexcept { return std::min(0.25 * (1.0 - std::abs(z)), 0.1); }

/// Derivatives up to `order` at `center` from m!/(2 pi i) \oint F / (zeta - z)^{m+1},
/// trapezoid rule with `nodes` points on |zeta - center| = radius.
template <class F>
Jet cauchy_jet(F&& f, cplx center, int order, double radius, int nodes = kDefaultCauchyNodes) {
  std::array<cplx, 4> acc{};
  for (int j = 0; j < nodes; ++j) {
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * j / nodes);
    const cplx v = f(center + radius * w);
    cplx winv = 1.0;
    const cplx wc = std::conj(w);
    for (int m = 1; m <= order; ++m) {
      winv *= wc;
      acc[static_cast<std::size_t>(m)] += v * winv;
    }
  }
  Jet out{f(center), 0.0, 0.0, 0.0};
  double scale = 1.0, fact = 1.0;
  for (int m = 1; m <= order; ++m) {
    scale *= radius;
    fact *= m;
    const cplx d = acc[static_cast<std::size_t>(m)] * (fact / (nodes * scale));
    if (m == 1) out.d1 = d;
    if (m == 2) out.d2 = d;
    if (m == 3) out.d3 = d;
  }
  return out;
}

/// F(z) from the Cauchy integral over |zeta - center| = radius, for z inside
/// the circle.
template <class F>
cplx cauchy_interior_value(F&& f, cplx center, double radius, cplx z, int nodes = kDefaultCauchyNodes) {
  cplx sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * j / nodes);
    const cplx zeta = center + radius * w;
    // dzeta = i radius w dtheta; the i cancels the 1/(2 pi i).
    sum += f(zeta) * (radius * w) / (zeta - z);
  }
  return sum / static_cast<double>(nodes);
}

/// Immutable, shareable analytic function object.
class AnalyticFunction {
 public:
  using ValueFn = std::function<cplx(cplx)>;
  using JetFn = std::function<Jet(cplx)>;

  AnalyticFunction() : AnalyticFunction(closed_form("0", [](cplx) { return Jet{}; })) {}

  /// Closed-form jet; `value` is an optional cheaper value-only path.
  static AnalyticFunction closed_form(std::string label, JetFn jet, ValueFn value = {}) {
    auto impl = std::make_shared<Impl>();
    impl->label = std::move(label);
    impl->mode = DerivativeMode::closed_form;
    impl->jet = std::move(jet);
    impl->value = std::move(value);
    return AnalyticFunction(std::move(impl));
  }

  /// Value-only function; derivatives from Cauchy quadrature.
  static AnalyticFunction from_values(std::string label, ValueFn value, int cauchy_nodes = kDefaultCauchyNodes) {
    auto impl = std::make_shared<Impl>();
    impl->label = std::move(label);
    impl->mode = DerivativeMode::cauchy_quadrature;
    impl->value = std::move(value);
    impl->nodes = cauchy_nodes;
    return AnalyticFunction(std::move(impl));
  }

  cplx operator()(cplx z) const {
    if (impl_->value) return impl_->value(z);
    return impl_->jet(z).value;
  }

  /// Derivatives up to `order` (0..3); entries above `order` are zero.
  Jet jet(cplx z, int order = 3) const {
    if (order < 0 || order > 3) throw DomainError("jet: order must be in 0..3");
    if (order == 0) return {(*this)(z), 0.0, 0.0, 0.0};
    if (impl_->mode == DerivativeMode::closed_form) return impl_->jet(z).truncated(order);
    return cauchy_jet(impl_->value, z, order, cauchy_radius(z), impl_->nodes);
  }

  /// Jet forced through Cauchy quadrature, regardless of mode.
  Jet quadrature_jet(cplx z, int order = 3, int nodes = kDefaultCauchyNodes) const {
    const auto& self = *this;
    return cauchy_jet([&self](cplx w) { return self(w); }, z, order, cauchy_radius(z), nodes);
  }

  DerivativeMode mode() const noexcept { return impl_->mode; }
  const std::string& label() const noexcept { return impl_->label; }

 private:
  struct Impl {
    std::string label;
    DerivativeMode mode = DerivativeMode::closed_form;
    JetFn jet;
    ValueFn value;
    int nodes = kDefaultCauchyNodes;
  };
  explicit AnalyticFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline Jet jet(const AnalyticFunction& f, const DiscPoint& z, int order = 3) { return f.jet(z.value(), order); }

// ---------------------------------------------------------------------------
// Elementary functions and combinators.

inline AnalyticFunction constant(cplx c) {
  return AnalyticFunction::closed_form("const", [c](cplx) { return constant_jet(c); }, [c](cplx) { return c; });
}

inline AnalyticFunction identity() {
  return AnalyticFunction::closed_form("z", [](cplx z) { return identity_jet(z); }, [](cplx z) { return z; });
}

inline AnalyticFunction exp_function() {
  return AnalyticFunction::closed_form(
      "exp", [](cplx z) { const cplx e = std::exp(z); return Jet{e, e, e, e}; },
      [](cplx z) { return std::exp(z); });
}

/// Polynomial with coefficients c[0] + c[1] z + ...
inline AnalyticFunction polynomial(std::vector<cplx> coeffs) {
  return AnalyticFunction::closed_form("poly", [coeffs](cplx z) {
    Jet acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
      acc = acc * identity_jet(z) + constant_jet(*it);
    }
    return acc;
  });
}

/// The disc automorphism (a - z) / (1 - conj(a) z) as an analytic function.
inline AnalyticFunction mobius(DiscPoint a) {
  const Automorphism phi(a);
  return AnalyticFunction::closed_form(
      "mobius", [phi](cplx z) {
        return Jet{phi(z), phi.derivative(z), phi.second_derivative(z), phi.third_derivative(z)};
      },
      [phi](cplx z) { return phi(z); });
}

namespace detail {
inline DerivativeMode combine(const AnalyticFunction& f, const AnalyticFunction& g) {
  return (f.mode() == DerivativeMode::closed_form && g.mode() == DerivativeMode::closed_form)
             ? DerivativeMode::closed_form
             : DerivativeMode::cauchy_quadrature;
}

template <class JetOp, class ValueOp>
AnalyticFunction binary(std::string label, const AnalyticFunction& f, const AnalyticFunction& g, JetOp jop,
                        ValueOp vop) {
  if (combine(f, g) == DerivativeMode::closed_form) {
    return AnalyticFunction::closed_form(
        std::move(label), [f, g, jop](cplx z) { return jop(f.jet(z), g.jet(z)); },
        [f, g, vop](cplx z) { return vop(f(z), g(z)); });
  }
  return AnalyticFunction::from_values(std::move(label), [f, g, vop](cplx z) { return vop(f(z), g(z)); });
}
}  // namespace detail

inline AnalyticFunction operator+(const AnalyticFunction& f, const AnalyticFunction& g) {
  return detail::binary(
      "(" + f.label() + "+" + g.label() + ")", f, g, [](const Jet& a, const Jet& b) { return a + b; },
      [](cplx a, cplx b) { return a + b; });
}

inline AnalyticFunction operator-(const AnalyticFunction& f, const AnalyticFunction& g) {
  return detail::binary(
      "(" + f.label() + "-" + g.label() + ")", f, g, [](const Jet& a, const Jet& b) { return a - b; },
      [](cplx a, cplx b) { return a - b; });
}

inline AnalyticFunction operator*(const AnalyticFunction& f, const AnalyticFunction& g) {
  return detail::binary(
      f.label() + "*" + g.label(), f, g, [](const Jet& a, const Jet& b) { return a * b; },
      [](cplx a, cplx b) { return a * b; });
}

inline AnalyticFunction operator*(cplx c, const AnalyticFunction& f) { return constant(c) * f; }

/// exp(F).
inline AnalyticFunction exp(const AnalyticFunction& f) {
  if (f.mode() == DerivativeMode::closed_form) {
    return AnalyticFunction::closed_form(
        "exp(" + f.label() + ")", [f](cplx z) { return exp(f.jet(z)); }, [f](cplx z) { return std::exp(f(z)); });
  }
  return AnalyticFunction::from_values("exp(" + f.label() + ")", [f](cplx z) { return std::exp(f(z)); });
}

/// F o phi_a.
inline AnalyticFunction compose_mobius(const AnalyticFunction& f, DiscPoint a) {
  const Automorphism phi(a);
  if (f.mode() == DerivativeMode::closed_form) {
    return AnalyticFunction::closed_form(
        f.label() + "@phi", [f, phi](cplx z) {
          const Jet inner{phi(z), phi.derivative(z), phi.second_derivative(z), phi.third_derivative(z)};
          return chain(f.jet(inner.value), inner);
        },
        [f, phi](cplx z) { return f(phi(z)); });
  }
  return AnalyticFunction::from_values(f.label() + "@phi", [f, phi](cplx z) { return f(phi(z)); });
}

/// Jet of (phi_a')^{k/2} using the global branch
/// (phi_a')^{1/2} = i sqrt(1 - |a|^2) / (1 - conj(a) z), which is analytic and
/// zero-free on the whole disc.
inline Jet mobius_half_power_jet(const Automorphism& phi, int half_power, cplx z) {
  const cplx a = phi.center();
  const cplx s = cplx(0.0, 1.0) * std::sqrt(1.0 - std::norm(a));
  // (s / (1 - conj(a) z))^k = s^k (1 - conj(a) z)^{-k}
  const cplx u = 1.0 - std::conj(a) * z;
  const double k = half_power;
  const cplx ca = std::conj(a);
  const cplx base = std::pow(s, k) * std::pow(u, -k);
  // d/dz u^{-k} = k conj(a) u^{-k-1}
  const cplx d1 = base * (k * ca / u);
  const cplx d2 = base * (k * (k + 1.0) * ca * ca / (u * u));
  const cplx d3 = base * (k * (k + 1.0) * (k + 2.0) * ca * ca * ca / (u * u * u));
  return {base, d1, d2, d3};
}

/// (F o phi_a) (phi_a')^{k/2}. k = -1 transports solutions, k = 4 coefficients.
inline AnalyticFunction mobius_pullback(const AnalyticFunction& f, DiscPoint a, int half_power) {
  const Automorphism phi(a);
  const auto composed = compose_mobius(f, a);
  if (f.mode() == DerivativeMode::closed_form) {
    return AnalyticFunction::closed_form(
        f.label() + "|phi^" + std::to_string(half_power),
        [composed, phi, half_power](cplx z) { return composed.jet(z) * mobius_half_power_jet(phi, half_power, z); },
        [composed, phi, half_power](cplx z) {
          return composed(z) * mobius_half_power_jet(phi, half_power, z).value;
        });
  }
  return AnalyticFunction::from_values(f.label() + "|phi^" + std::to_string(half_power),
                                       [composed, phi, half_power](cplx z) {
                                         return composed(z) * mobius_half_power_jet(phi, half_power, z).value;
                                       });
}

// ---------------------------------------------------------------------------
// Norms, Schwarzian, spherical derivative.

struct GrowthEstimate {
  double value = 0.0;
  DiscPoint argmax;
  double max_modulus = 0.0;  // of the grid; the estimate is a lower bound
};

/// max over the grid of (1 - |z|^2)^alpha |F(z)|.
inline GrowthEstimate growth_norm(const AnalyticFunction& f, double alpha, const DiscGrid& grid) {
  if (alpha < 0.0) throw DomainError("growth_norm: alpha must be >= 0");
  GrowthEstimate best{0.0, grid.points().front(), grid.max_modulus()};
  for (const auto& p : grid) {
    const double w = std::pow(1.0 - std::norm(p.value()), alpha) * std::abs(f(p.value()));
    if (w > best.value) {
      best.value = w;
      best.argmax = p;
    }
  }
  return best;
}

inline constexpr double kCriticalPointThreshold = 1e-12;

/// (W''/W')' - (W''/W')^2 / 2 = W'''/W' - 3/2 (W''/W')^2.
inline cplx schwarzian_from_jet(const Jet& w) {
  if (std::abs(w.d1) < kCriticalPointThreshold) {
    throw CriticalPointError("schwarzian: |W'(z)| below 1e-12");
  }
  const cplx q = w.d2 / w.d1;
  return w.d3 / w.d1 - 1.5 * q * q;
}

inline cplx schwarzian(const AnalyticFunction& w, cplx z) { return schwarzian_from_jet(w.jet(z, 3)); }

/// Quotient P/Q of analytic functions, the representation used for meromorphic
/// functions. Either chart (P/Q or Q/P) can be evaluated.
class MeromorphicFunction {
 public:
  MeromorphicFunction(AnalyticFunction numerator, AnalyticFunction denominator)
      : num_(std::move(numerator)), den_(std::move(denominator)) {}
  explicit MeromorphicFunction(AnalyticFunction f) : num_(std::move(f)), den_(constant(1.0)) {}

  const AnalyticFunction& numerator() const noexcept { return num_; }
  const AnalyticFunction& denominator() const noexcept { return den_; }

 private:
  AnalyticFunction num_;
  AnalyticFunction den_;
};

inline constexpr double kPoleChartThreshold = 1e6;

/// |W'| / (1 + |W|^2); switches to the chart 1/W when |W| > 1e6.
inline double spherical_derivative(const MeromorphicFunction& w, cplx z) {
  const Jet p = w.numerator().jet(z, 1);
  const Jet q = w.denominator().jet(z, 1);
  if (std::abs(p.value) > kPoleChartThreshold * std::abs(q.value)) {
    const cplx v = q.value / p.value;
    const cplx dv = (q.d1 * p.value - q.value * p.d1) / (p.value * p.value);
    return std::abs(dv) / (1.0 + std::norm(v));
  }
  const cplx v = p.value / q.value;
  const cplx dv = (p.d1 * q.value - p.value * q.d1) / (q.value * q.value);
  return std::abs(dv) / (1.0 + std::norm(v));
}

inline double spherical_derivative(const AnalyticFunction& w, cplx z) {
  return spherical_derivative(MeromorphicFunction(w), z);
}

// ---------------------------------------------------------------------------
// Paths.

/// Polyline through interior waypoints.
class PathSpec {
 public:
  PathSpec(std::vector<DiscPoint> waypoints, int samples_per_segment = 16)
      : waypoints_(std::move(waypoints)), samples_(samples_per_segment) {
    if (waypoints_.size() < 2) throw DomainError("PathSpec: need at least two waypoints");
    if (samples_ < 1) throw DomainError("PathSpec: samples_per_segment must be >= 1");
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
      if (waypoints_[i] == waypoints_[i - 1]) throw DomainError("PathSpec: consecutive waypoints must differ");
    }
  }

  static PathSpec segment(DiscPoint from, DiscPoint to, int samples = 16) { return PathSpec({from, to}, samples); }

  std::span<const DiscPoint> waypoints() const noexcept { return waypoints_; }
  int samples_per_segment() const noexcept { return samples_; }
  DiscPoint start() const noexcept { return waypoints_.front(); }
  DiscPoint end() const noexcept { return waypoints_.back(); }

  double length() const noexcept {
    double s = 0.0;
    for (std::size_t i = 1; i < waypoints_.size(); ++i) s += std::abs(waypoints_[i].value() - waypoints_[i - 1].value());
    return s;
  }

 private:
  std::vector<DiscPoint> waypoints_;
  int samples_;
};

/// Integral of F dz along the path, composite 5-point Gauss-Legendre.
template <class F>
cplx path_integral(F&& f, const PathSpec& path) {
  cplx total = 0.0;
  const auto wp = path.waypoints();
  for (std::size_t s = 1; s < wp.size(); ++s) {
    const cplx a = wp[s - 1].value();
    const cplx dz = wp[s].value() - a;
    total += dz * integrate_gauss([&](double t) -> cplx { return f(a + t * dz); }, 0.0, 1.0,
                                  path.samples_per_segment(), 5);
  }
  return total;
}

inline cplx path_primitive(const AnalyticFunction& f, const PathSpec& path) {
  return path_integral([&f](cplx z) { return f(z); }, path);
}

}  // namespace zerodisc
