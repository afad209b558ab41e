#pragma once

// Direct integration of f'' + A f = 0 along paths in the disc, zero counting
// by the argument principle, second solutions, conformal transport, the
// growth bound for coefficients admitting at most one zero and normality
// diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "zerodisc/analytic.hpp"
#include "zerodisc/builder.hpp"
#include "zerodisc/errors.hpp"
#include "zerodisc/geometry.hpp"

namespace zerodisc {

inline constexpr double kDefaultOdeTolerance = 1e-10;

struct OdeState {
  DiscPoint position;
  cplx f;
  cplx fprime;

  bool finite() const noexcept {
    return std::isfinite(f.real()) && std::isfinite(f.imag()) && std::isfinite(fprime.real()) &&
           std::isfinite(fprime.imag());
  }
};

struct SolutionTrace {
  std::vector<OdeState> states;
  std::vector<double> params;  // arc length from the path start
  double tolerance_achieved = 0.0;
  long steps = 0;
  long rejected = 0;

  const OdeState& final() const { return states.back(); }
};

/// Parametrized curve t in [0,1] -> z(t) with velocity z'(t).
struct Curve {
  std::function<cplx(double)> z;
  std::function<cplx(double)> dz;
  double length = 0.0;
};

inline Curve line_curve(cplx a, cplx b) {
  const cplx d = b - a;
  return {[a, d](double t) { return a + t * d; }, [d](double) { return d; }, std::abs(d)};
}

inline Curve arc_curve(cplx center, double radius, double theta0, double sweep) {
  return {[=](double t) { return center + std::polar(radius, theta0 + t * sweep); },
          [=](double t) { return cplx(0.0, sweep) * std::polar(radius, theta0 + t * sweep); },
          radius * std::abs(sweep)};
}

struct IntegratorOptions {
  double tol = kDefaultOdeTolerance;
  double max_step = 0.05;  // in curve parameter units
  long max_steps = 20'000'000;
  bool normalize_f = false;  // divide the state by |f| after every step
};

struct CurveResult {
  cplx f;
  cplx fp;
  double log_scale = 0.0;  // true state = (f, fp) * e^{log_scale}
  double t_end = 0.0;
  double max_error = 0.0;
  long steps = 0;
  long rejected = 0;
};

/// Dormand-Prince 5(4) on (f, f')' = (f', -A f) z'(t). The observer sees the
/// start and every accepted step as (t, z, f, fp, log_scale); it may rewrite
/// the state and returns false to stop early.
template <class Observer>
CurveResult integrate_curve(const AnalyticFunction& a, const Curve& curve, cplx f0, cplx fp0,
                            const IntegratorOptions& opts, Observer&& observer) {
  if (!(opts.tol > 0.0)) throw DomainError("integrate: tol must be positive");
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  using Vec = std::array<cplx, 2>;
  const auto rhs = [&](double t, const Vec& y) -> Vec {
    const cplx v = curve.dz(t);
    return {y[1] * v, -a(curve.z(t)) * y[0] * v};
  };
  const auto combo = [](const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
    Vec out = y;
    for (const auto& [c, k] : terms) {
      out[0] += h * c * (*k)[0];
      out[1] += h * c * (*k)[1];
    }
    return out;
  };

  CurveResult res{f0, fp0};
  Vec y{f0, fp0};
  double t = 0.0;
  if (!observer(t, curve.z(t), y[0], y[1], res.log_scale)) return res;
  double h = std::min(opts.max_step, 0.01);
  Vec k1 = rhs(t, y);
  while (t < 1.0) {
    if (res.steps + res.rejected > opts.max_steps) throw IntegrationError("integrate: step budget exhausted");
    if (h < 1e-14) {
      throw IntegrationError("integrate: step size underflow near z = " + std::to_string(curve.z(t).real()) + " + " +
                             std::to_string(curve.z(t).imag()) + "i (stiffness or singularity)");
    }
    const bool last = t + h >= 1.0;
    if (last) h = 1.0 - t;
    const Vec k2 = rhs(t + c2 * h, combo(y, h, {{a21, &k1}}));
    const Vec k3 = rhs(t + c3 * h, combo(y, h, {{a31, &k1}, {a32, &k2}}));
    const Vec k4 = rhs(t + c4 * h, combo(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec k5 = rhs(t + c5 * h, combo(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec k6 = rhs(t + h, combo(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec ynew = combo(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const double tnew = last ? 1.0 : t + h;
    const Vec k7 = rhs(tnew, ynew);
    // Relative error of (f, f'/lambda), lambda = max(1, sqrt|A|) read off k1.
    const double speed = std::abs(curve.dz(t));
    const double lambda =
        (y[0] != cplx(0.0) && speed > 0.0) ? std::max(1.0, std::sqrt(std::abs(k1[1]) / (std::abs(y[0]) * speed))) : 1.0;
    const double size = std::max({std::abs(y[0]), std::abs(ynew[0]), std::abs(y[1]) / lambda, std::abs(ynew[1]) / lambda});
    const double scale_of[2] = {opts.tol * size, opts.tol * size * lambda};
    double err = 0.0;
    bool finite = std::isfinite(size);
    for (std::size_t i = 0; i < 2; ++i) {
      const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, size > 0.0 ? std::abs(e) / scale_of[i] : 0.0);
      finite = finite && std::isfinite(std::abs(ynew[i])) && std::isfinite(std::abs(e));
    }
    if (!finite) {
      throw IntegrationError("integrate: non-finite state near z = " + std::to_string(curve.z(t).real()) + " + " +
                             std::to_string(curve.z(t).imag()) + "i");
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err > 1.0) {
      ++res.rejected;
      h *= std::min(fac, 0.9);
      continue;
    }
    ++res.steps;
    res.max_error = std::max(res.max_error, err * opts.tol);
    t = tnew;
    y = ynew;
    k1 = k7;
    double scale = 0.0;
    if (opts.normalize_f && y[0] != cplx(0.0)) {
      scale = std::abs(y[0]);
    } else {
      const double m = std::max(std::abs(y[0]), std::abs(y[1]));
      if (m > 1e100 || (m > 0.0 && m < 1e-100)) scale = m;
    }
    if (scale > 0.0) {
      y[0] /= scale;
      y[1] /= scale;
      k1[0] /= scale;
      k1[1] /= scale;
      res.log_scale += std::log(scale);
    }
    const Vec before = y;
    const bool go_on = observer(t, curve.z(t), y[0], y[1], res.log_scale);
    if (y != before) k1 = rhs(t, y);
    h = std::min(h * fac, opts.max_step);
    if (!go_on) break;
  }
  res.f = y[0];
  res.fp = y[1];
  res.t_end = t;
  return res;
}

inline CurveResult integrate_curve(const AnalyticFunction& a, const Curve& curve, cplx f0, cplx fp0,
                                   const IntegratorOptions& opts = {}) {
  return integrate_curve(a, curve, f0, fp0, opts, [](double, cplx, cplx&, cplx&, double&) { return true; });
}

/// Integrates along a polyline; every accepted step is recorded, including
/// the state at each waypoint.
inline SolutionTrace integrate(const AnalyticFunction& a, const OdeState& initial, const PathSpec& path,
                               double tol = kDefaultOdeTolerance) {
  if (!(initial.position == path.start())) throw PreconditionError("integrate: initial state must sit at the path start");
  if (!initial.finite()) throw DomainError("integrate: initial state must be finite");
  SolutionTrace trace;
  trace.states.push_back(initial);
  trace.params.push_back(0.0);
  IntegratorOptions opts;
  opts.tol = tol;
  opts.max_step = 1.0 / path.samples_per_segment();
  cplx f = initial.f, fp = initial.fprime;
  double offset = 0.0;
  const auto wp = path.waypoints();
  for (std::size_t s = 1; s < wp.size(); ++s) {
    const Curve c = line_curve(wp[s - 1].value(), wp[s].value());
    const auto res = integrate_curve(a, c, f, fp, opts, [&](double t, cplx z, cplx& g, cplx& gp, double& ls) {
      if (t == 0.0) return true;
      const double m = std::exp(ls);
      trace.states.push_back(OdeState{DiscPoint(z), g * m, gp * m});
      trace.params.push_back(offset + t * c.length);
      return true;
    });
    f = trace.states.back().f;
    fp = trace.states.back().fprime;
    trace.tolerance_achieved = std::max(trace.tolerance_achieved, res.max_error);
    trace.steps += res.steps;
    trace.rejected += res.rejected;
    offset += c.length;
  }
  return trace;
}

/// State at z reached along the straight segment from the initial position.
inline OdeState integrate_to(const AnalyticFunction& a, const OdeState& initial, DiscPoint z,
                             double tol = kDefaultOdeTolerance) {
  if (initial.position == z) return initial;
  IntegratorOptions opts;
  opts.tol = tol;
  const auto res = integrate_curve(a, line_curve(initial.position.value(), z.value()), initial.f, initial.fprime, opts);
  const double m = std::exp(res.log_scale);
  return {z, res.f * m, res.fp * m};
}

/// CSV of (s, Re z, Im z, Re f, Im f, Re f', Im f').
inline void write_trace_csv(std::ostream& out, const SolutionTrace& trace) {
  out << "s,re_z,im_z,re_f,im_f,re_fprime,im_fprime\n";
  out.precision(17);
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const auto& st = trace.states[i];
    out << trace.params[i] << ',' << st.position.re() << ',' << st.position.im() << ',' << st.f.real() << ','
        << st.f.imag() << ',' << st.fprime.real() << ',' << st.fprime.imag() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Argument principle.

struct Circle {
  cplx center = 0.0;
  double radius = 0.5;
};

/// (log f, f'/f) at z; used to re-seed the integrated state on contours where
/// |f| sweeps across many orders of magnitude.
using LogAnchor = std::function<std::pair<cplx, cplx>(cplx)>;

struct ContourOptions {
  double nudge_fraction = 1e-3;
  int max_nudges = 2;
  double integrality = 0.1;
  double max_arc_step = 1.0 / 512;
  LogAnchor anchor;
  double anchor_log_gap = 4.0;
};

struct ZeroCount {
  int count = 0;
  double raw = 0.0;
  double radius_used = 0.0;
  double min_newton_distance = 0.0;  // min |f/f'| on the contour
  int nudges = 0;
  long steps = 0;
  int anchors = 0;
  double anchor_mismatch = 0.0;  // max relative jump at re-seeding along the arc
  double start_mismatch = 0.0;   // relative gap between the radial state and the anchor
};

namespace detail {

struct ArcWinding {
  double raw = 0.0;
  double min_newton = INFINITY;
  long steps = 0;
  int anchors = 0;
  double mismatch = 0.0;
  double start_mismatch = 0.0;
  bool phase_jump = false;
};

inline ArcWinding wind_arc(const AnalyticFunction& a, const Circle& c, double r, cplx f, cplx fp, double tol,
                           const ContourOptions& copts, double max_step) {
  ArcWinding w;
  IntegratorOptions opts;
  opts.tol = tol;
  opts.max_step = max_step;
  opts.normalize_f = true;
  const Curve arc = arc_curve(c.center, r, 0.0, 2.0 * std::numbers::pi);
  double log0 = 0.0;
  if (f != cplx(0.0)) {
    log0 = std::log(std::abs(f));
    fp /= std::abs(f);
    f /= std::abs(f);
  }
  cplx prev = f;
  double anchor_log = log0;
  const auto observer = [&](double t, cplx z, cplx& g, cplx& gp, double& ls) {
    const double true_log = ls + log0;
    if (copts.anchor && (std::abs(true_log - anchor_log) > copts.anchor_log_gap || t == 0.0 || t == 1.0)) {
      const auto [lf, u] = copts.anchor(z);
      const cplx drift = std::log(g) + true_log - lf;
      const double jump =
          std::abs(std::exp(cplx(drift.real(), std::remainder(drift.imag(), 2.0 * std::numbers::pi))) - 1.0);
      if (t == 0.0) {
        w.start_mismatch = jump;
      } else {
        w.mismatch = std::max(w.mismatch, jump);
      }
      g = std::polar(1.0, lf.imag());
      gp = g * u;
      ls = lf.real() - log0;
      anchor_log = lf.real();
      ++w.anchors;
    }
    if (t > 0.0) {
      const double d = std::arg(g / prev);
      if (std::abs(d) > std::numbers::pi / 2) w.phase_jump = true;
      w.raw += d;
    }
    prev = g;
    if (g != cplx(0.0) && gp != cplx(0.0)) w.min_newton = std::min(w.min_newton, std::abs(g / gp));
    if (g == cplx(0.0)) w.min_newton = 0.0;
    return !w.phase_jump;
  };
  const auto res = integrate_curve(a, arc, f, fp, opts, observer);
  w.steps = res.steps;
  w.raw /= 2.0 * std::numbers::pi;
  return w;
}

}  // namespace detail

/// Number of zeros of the solution through `initial` inside the circle. The
/// state is carried radially from initial.position to center + radius, then
/// once around; the winding of f is accumulated step by step.
inline ZeroCount count_zeros(const AnalyticFunction& a, const OdeState& initial, const Circle& contour,
                             double tol = kDefaultOdeTolerance, const ContourOptions& copts = {}) {
  if (!(contour.radius > 0.0) || std::abs(contour.center) + contour.radius * (1.0 + copts.nudge_fraction * copts.max_nudges) >= 1.0) {
    throw DomainError("count_zeros: contour must lie inside the disc");
  }
  ZeroCount out;
  for (int attempt = 0; attempt <= copts.max_nudges; ++attempt) {
    const double sign = attempt % 2 == 1 ? 1.0 : -1.0;
    const double r = contour.radius * (1.0 + sign * copts.nudge_fraction * ((attempt + 1) / 2));
    const DiscPoint start(contour.center + r);
    const OdeState s0 = integrate_to(a, initial, start, tol);
    double max_step = copts.max_arc_step;
    detail::ArcWinding w;
    bool capped = true;
    for (int refine = 0; refine < 4; ++refine) {
      w = detail::wind_arc(a, contour, r, s0.f, s0.fprime, tol, copts, max_step);
      // A smaller cap only helps when the cap, not the tolerance, set the steps.
      capped = static_cast<double>(w.steps) <= 4.0 / max_step;
      if (!w.phase_jump || !capped) break;
      max_step /= 4.0;
    }
    const bool near_zero = capped && w.min_newton <= std::max(10.0 * tol, 2.0 * std::numbers::pi * r * max_step);
    if (w.phase_jump && !near_zero) throw AccuracyError("count_zeros: phase step above pi/2 persists after refinement");
    out.nudges = attempt;
    out.radius_used = r;
    out.raw = w.raw;
    out.min_newton_distance = w.min_newton;
    out.steps = w.steps;
    out.anchors = w.anchors;
    out.anchor_mismatch = w.mismatch;
    out.start_mismatch = w.start_mismatch;
    if (w.phase_jump || w.min_newton <= 10.0 * tol) continue;
    out.count = static_cast<int>(std::lround(w.raw));
    if (std::abs(w.raw - out.count) > copts.integrality) {
      throw AccuracyError("count_zeros: winding " + std::to_string(w.raw) + " is not near an integer");
    }
    return out;
  }
  throw ContourError("count_zeros: contour stays within tol of a zero after " + std::to_string(copts.max_nudges) +
                     " nudges");
}

// ---------------------------------------------------------------------------
// Verification of built coefficients.

struct VerifyOptions {
  double zero_tol = 1e-8;
  double contour_radius = 0.995;
  double ode_tol = kDefaultOdeTolerance;
  double radial_tol = 1e-6;
  int radial_checkpoints = 200;
};

struct VerificationReport {
  double max_abs_f_at_zeros = 0.0;
  int expected = 0;
  ZeroCount counted;
  double radial_rel_error = 0.0;
  bool zeros_ok = false;
  bool count_ok = false;
  bool radial_ok = false;
  std::vector<std::string> mismatches;

  bool passed() const noexcept { return zeros_ok && count_ok && radial_ok; }
};

inline LogAnchor bundle_anchor(const CoefficientBundle& bundle) {
  const auto eval = bundle.evaluator;
  return [eval](cplx z) { return eval->log_f(z); };
}

/// Checks (i) |f(z_n)| < zero_tol, (ii) the argument-principle count on
/// |z| = contour_radius against the number of prescribed zeros inside, and
/// (iii) an independent integration from (f(0), f'(0)) along [0, contour_radius]
/// against the closed form, relative to the sup of |f| there.
inline VerificationReport verify_prescribed_zeros(const CoefficientBundle& bundle, const VerifyOptions& opts = {}) {
  VerificationReport rep;
  for (const auto& z : bundle.zeros) {
    const double v = std::abs(bundle.f(z.value()));
    rep.max_abs_f_at_zeros = std::max(rep.max_abs_f_at_zeros, v);
    if (z.abs() <= opts.contour_radius) ++rep.expected;
  }
  rep.zeros_ok = rep.max_abs_f_at_zeros < opts.zero_tol;
  if (!rep.zeros_ok) rep.mismatches.push_back("max |f(z_n)| = " + std::to_string(rep.max_abs_f_at_zeros));

  const Jet f0 = bundle.f.jet(0.0, 1);
  const OdeState initial{DiscPoint(0.0, 0.0), f0.value, f0.d1};
  ContourOptions copts;
  copts.anchor = bundle_anchor(bundle);
  try {
    rep.counted = count_zeros(bundle.A, initial, Circle{0.0, opts.contour_radius}, opts.ode_tol, copts);
    rep.count_ok = rep.counted.count == rep.expected;
    if (!rep.count_ok) {
      rep.mismatches.push_back("argument principle counts " + std::to_string(rep.counted.count) + " zeros, expected " +
                               std::to_string(rep.expected));
    }
  } catch (const Error& err) {
    rep.mismatches.push_back(std::string("zero count failed: ") + err.what());
  }

  try {
    const auto trace =
        integrate(bundle.A, initial, PathSpec::segment(initial.position, DiscPoint(opts.contour_radius, 0.0),
                                                       opts.radial_checkpoints),
                  opts.ode_tol);
    double sup = 0.0, worst = 0.0;
    for (const auto& st : trace.states) {
      const cplx exact = bundle.f(st.position.value());
      sup = std::max(sup, std::abs(exact));
      worst = std::max(worst, std::abs(st.f - exact));
    }
    rep.radial_rel_error = sup > 0.0 ? worst / sup : worst;
    rep.radial_ok = rep.radial_rel_error < opts.radial_tol;
    if (!rep.radial_ok) rep.mismatches.push_back("radial re-integration differs by " + std::to_string(rep.radial_rel_error));
  } catch (const Error& err) {
    rep.mismatches.push_back(std::string("radial re-integration failed: ") + err.what());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Second solutions.

struct SecondSolution {
  cplx g;
  cplx gprime;
};

inline constexpr double kPathZeroThreshold = 1e-10;

namespace detail {

/// True when Newton's method, started from the local minima of |f| sampled
/// along a segment, converges to a zero lying on that segment.
inline bool segment_hits_zero(const AnalyticFunction& f, cplx a, cplx b, int samples) {
  const cplx dz = b - a;
  const int m = 4 * samples;
  std::vector<double> mod(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) mod[static_cast<std::size_t>(i)] = std::abs(f(a + (static_cast<double>(i) / m) * dz));
  for (int i = 0; i <= m; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if ((i > 0 && mod[u - 1] < mod[u]) || (i < m && mod[u + 1] < mod[u])) continue;
    cplx w = a + (static_cast<double>(i) / m) * dz;
    for (int it = 0; it < 30; ++it) {
      const Jet j = f.jet(w, 1);
      if (j.value == cplx(0.0)) break;
      if (j.d1 == cplx(0.0) || std::abs(w) >= 1.0) break;
      const cplx step = j.value / j.d1;
      w -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(w))) break;
    }
    if (!(std::abs(w) < 1.0) || !(std::abs(f(w)) < kPathZeroThreshold)) continue;
    const double t = std::clamp(std::real((w - a) * std::conj(dz)) / std::norm(dz), 0.0, 1.0);
    if (std::abs(a + t * dz - w) < 1e-8 * std::abs(dz)) return true;
  }
  return false;
}

}  // namespace detail

/// g = f * integral_base^z dzeta / f^2 along the path, so W(f, g) = 1.
inline SecondSolution second_solution(const AnalyticFunction& f, const PathSpec& path) {
  const auto wp = path.waypoints();
  for (std::size_t s = 1; s < wp.size(); ++s) {
    if (detail::segment_hits_zero(f, wp[s - 1].value(), wp[s].value(), path.samples_per_segment())) {
      throw DomainError("second_solution: path passes through a zero of f");
    }
  }
  double min_abs = INFINITY;
  const cplx integral = path_integral(
      [&](cplx z) {
        const cplx v = f(z);
        min_abs = std::min(min_abs, std::abs(v));
        return 1.0 / (v * v);
      },
      path);
  const Jet fe = f.jet(path.end().value(), 1);
  min_abs = std::min({min_abs, std::abs(fe.value), std::abs(f(path.start().value()))});
  if (min_abs < kPathZeroThreshold) throw DomainError("second_solution: path passes through a zero of f");
  return {fe.value * integral, fe.d1 * integral + 1.0 / fe.value};
}

inline SecondSolution second_solution(const AnalyticFunction& f, DiscPoint base, DiscPoint z, int samples = 32) {
  if (base == z) {
    const cplx v = f(base.value());
    if (std::abs(v) < kPathZeroThreshold) throw DomainError("second_solution: base is a zero of f");
    return {0.0, 1.0 / v};
  }
  return second_solution(f, PathSpec::segment(base, z, samples));
}

/// Initial data with W(f, g) = f g' - f' g = 1 of minimal norm:
/// (g, g') = (-conj(f'), conj(f)) / (|f|^2 + |f'|^2).
inline std::pair<cplx, cplx> wronskian_partner(cplx f, cplx fp) {
  const double n = std::norm(f) + std::norm(fp);
  if (n == 0.0) throw DegenerateInputError("wronskian_partner: zero state");
  return {-std::conj(fp) / n, std::conj(f) / n};
}

/// Solution evaluator obtained by integrating from a fixed base state along
/// straight segments. The jet uses the equation: g'' = -A g, g''' = -A' g - A g'.
class OdeSolution {
 public:
  OdeSolution(AnalyticFunction a, OdeState base, double tol = kDefaultOdeTolerance)
      : a_(std::move(a)), base_(base), tol_(tol) {}

  OdeState at(cplx z) const { return integrate_to(a_, base_, DiscPoint(z), tol_); }

  AnalyticFunction as_function(std::string label = "ode_solution") const {
    const auto self = std::make_shared<const OdeSolution>(*this);
    return AnalyticFunction::closed_form(
        std::move(label),
        [self](cplx z) {
          const OdeState s = self->at(z);
          const Jet aj = self->a_.jet(z, 1);
          return Jet{s.f, s.fprime, -aj.value * s.f, -aj.d1 * s.f - aj.value * s.fprime};
        },
        [self](cplx z) { return self->at(z).f; });
  }

  const OdeState& base() const noexcept { return base_; }

 private:
  AnalyticFunction a_;
  OdeState base_;
  double tol_;
};

/// Second solution of f'' + A f = 0 with W(f, g) = 1, seeded at `base` by
/// the minimal-norm partner of (f(base), f'(base)).
inline OdeSolution ode_second_solution(const AnalyticFunction& a, const AnalyticFunction& f, DiscPoint base = DiscPoint(0.0, 0.0),
                                       double tol = kDefaultOdeTolerance) {
  const Jet fj = f.jet(base.value(), 1);
  const auto [g, gp] = wronskian_partner(fj.value, fj.d1);
  return OdeSolution(a, OdeState{base, g, gp}, tol);
}

inline cplx wronskian(const Jet& f, const Jet& g) noexcept { return f.value * g.d1 - f.d1 * g.value; }

// ---------------------------------------------------------------------------
// Conformal transport.

/// z -> A(phi_a(z)) phi_a'(z)^2.
inline AnalyticFunction conformal_transport(const AnalyticFunction& a, DiscPoint point) {
  return mobius_pullback(a, point, 4);
}

/// z -> f(phi_a(z)) phi_a'(z)^{-1/2} on the global branch
/// phi_a'(z)^{1/2} = i sqrt(1 - |a|^2) / (1 - conj(a) z).
inline AnalyticFunction transport_solution(const AnalyticFunction& f, DiscPoint point) {
  return mobius_pullback(f, point, -1);
}

/// Continuous branch of phi_a'^{-1/2} along a sequence of samples. Each step
/// keeps the sign closest to the previous value. If arg phi_a' moves by pi/2 or
/// more between adjacent samples the sign choice is ambiguous and the samples
/// are rejected as too coarse.
inline std::vector<cplx> track_inverse_sqrt_branch(const Automorphism& phi, const std::vector<cplx>& samples) {
  std::vector<cplx> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    cplx s = 1.0 / std::sqrt(phi.derivative(samples[i]));
    if (i == 0) {
      const cplx global = 1.0 / (cplx(0.0, std::sqrt(1.0 - std::norm(phi.center()))) /
                                 (1.0 - std::conj(phi.center()) * samples[0]));
      if (std::abs(s + global) < std::abs(s - global)) s = -s;
    } else {
      if (std::abs(std::arg(phi.derivative(samples[i]) / phi.derivative(samples[i - 1]))) >= std::numbers::pi / 2) {
        throw BranchError("track_inverse_sqrt_branch: discontinuity between adjacent samples");
      }
      const cplx prev = out.back();
      if (std::abs(s + prev) < std::abs(s - prev)) s = -s;
    }
    out.push_back(s);
  }
  return out;
}

/// Transported solution values along sampled points with the tracked branch.
inline std::vector<cplx> transport_solution_along(const AnalyticFunction& f, DiscPoint point,
                                                  const std::vector<cplx>& samples) {
  const Automorphism phi(point);
  const auto branch = track_inverse_sqrt_branch(phi, samples);
  std::vector<cplx> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out.push_back(f(phi(samples[i])) * branch[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Density bound for at most one zero.

struct Theorem1Bound {
  bool one_point = false;     // N <= 1: at most one zero
  bool out_of_domain = false; // N < 1
  double value = 0.0;
};

/// (2 pi + 1) t^{1/2} (1 - t^{1/2})^{-2} with t = 1 - 2 sqrt(N)/(N + 1),
/// written as t = (sqrt(N) - 1)^2 / (N + 1) to keep digits near N = 1.
inline Theorem1Bound theorem1_bound(double n) {
  if (!std::isfinite(n)) throw DomainError("theorem1_bound: N must be finite");
  Theorem1Bound out;
  if (n <= 1.0) {
    out.one_point = true;
    out.out_of_domain = n < 1.0;
    return out;
  }
  const double s = std::sqrt(n) - 1.0;
  const double t = s * s / (n + 1.0);
  const double rt = std::sqrt(t);
  out.value = (2.0 * std::numbers::pi + 1.0) * rt / ((1.0 - rt) * (1.0 - rt));
  return out;
}

// ---------------------------------------------------------------------------
// Normality.

struct NormalitySample {
  DiscPoint z;
  double value;
};

struct NormalityReport {
  double sup_sampled = 0.0;
  std::optional<DiscPoint> argmax;
  std::vector<NormalitySample> per_point;
  std::vector<NormalitySample> at_zeros;  // (1 - |z_n|^2) / |g(z_n)|^2
};

inline constexpr double kWronskianCheck = 1e-8;

/// (1 - |z|^2) w#(z) for w = g/f, which equals (1 - |z|^2)/(|f|^2 + |g|^2)
/// once W(f, g) = 1.
inline NormalityReport normality_diagnostic(const AnalyticFunction& f, const AnalyticFunction& g, const DiscGrid& grid,
                                            DiscPoint base = DiscPoint(0.0, 0.0), const PointSequence* zeros = nullptr) {
  const cplx w = wronskian(f.jet(base.value(), 1), g.jet(base.value(), 1));
  if (std::abs(w - 1.0) > kWronskianCheck) {
    throw PreconditionError("normality_diagnostic: W(f, g) at the base point is not 1");
  }
  NormalityReport rep;
  for (const auto& p : grid) {
    const cplx z = p.value();
    const double v = (1.0 - std::norm(z)) / (std::norm(f(z)) + std::norm(g(z)));
    rep.per_point.push_back({p, v});
    if (v > rep.sup_sampled || !rep.argmax) {
      rep.sup_sampled = std::max(rep.sup_sampled, v);
      rep.argmax = p;
    }
  }
  if (zeros) {
    for (const auto& zn : *zeros) {
      rep.at_zeros.push_back({zn, (1.0 - std::norm(zn.value())) / std::norm(g(zn.value()))});
    }
  }
  return rep;
}

/// Schwarzian of w = g/f from w' = 1/f^2 (W = 1); S_w should equal 2A.
inline cplx ratio_schwarzian(const AnalyticFunction& f, cplx z) {
  const Jet fj = f.jet(z, 2);
  const cplx f2 = fj.value * fj.value;
  // w' = f^-2, w'' = -2 f' f^-3, w''' = -2 f'' f^-3 + 6 f'^2 f^-4
  const Jet wj{0.0, 1.0 / f2, -2.0 * fj.d1 / (f2 * fj.value), -2.0 * fj.d2 / (f2 * fj.value) + 6.0 * fj.d1 * fj.d1 / (f2 * f2)};
  return schwarzian_from_jet(wj);
}

}  // namespace zerodisc
