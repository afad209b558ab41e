#pragma once

// Finite Blaschke products with derivatives everywhere, including at their
// own zeros, and an empirical witness for the Schwarz-type growth bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "zerodisc/analytic.hpp"
#include "zerodisc/errors.hpp"
#include "zerodisc/geometry.hpp"
#include "zerodisc/sequences.hpp"

namespace zerodisc {

/// Above this many zeros, values are accumulated as log-modulus plus phase.
inline constexpr std::size_t kLogAccumulationThreshold = 32;

/// B(z) = prod_n b_n(z) with b_n(z) = (|z_n|/z_n)(z_n - z)/(1 - conj(z_n) z)
/// for z_n != 0 and b_n(z) = z for z_n = 0.
class BlaschkeProduct {
 public:
  BlaschkeProduct() = default;
  explicit BlaschkeProduct(PointSequence zeros) : zeros_(std::move(zeros)) {
    unimodular_.reserve(zeros_.size());
    for (const auto& p : zeros_) {
      const cplx z = p.value();
      // c = -1 at the origin turns (0 - z)/1 into z.
      unimodular_.push_back(z == cplx(0.0) ? cplx(-1.0) : std::abs(z) / z);
    }
  }

  const PointSequence& zeros() const noexcept { return zeros_; }
  std::size_t size() const noexcept { return zeros_.size(); }

  /// Jet of the n-th factor.
  Jet factor_jet(std::size_t n, cplx z) const {
    const cplx zn = zeros_[n].value();
    const cplx c = unimodular_[n];
    if (zn == cplx(0.0)) return identity_jet(z);
    const cplx czn = std::conj(zn);
    const cplx r = 1.0 / (1.0 - czn * z);
    const cplx cm = c * (std::norm(zn) - 1.0) * r * r;
    const cplx q = czn * r;
    return {c * (zn - z) * r, cm, 2.0 * cm * q, 6.0 * cm * q * q};
  }

  cplx factor(std::size_t n, cplx z) const {
    const cplx zn = zeros_[n].value();
    if (zn == cplx(0.0)) return z;
    return unimodular_[n] * (zn - z) / (1.0 - std::conj(zn) * z);
  }

  cplx operator()(cplx z) const {
    if (zeros_.size() <= kLogAccumulationThreshold) {
      cplx p = 1.0;
      for (std::size_t n = 0; n < zeros_.size(); ++n) p *= factor(n, z);
      return p;
    }
    double log_mod = 0.0, phase = 0.0;
    for (std::size_t n = 0; n < zeros_.size(); ++n) {
      const cplx b = factor(n, z);
      if (b == cplx(0.0)) return 0.0;
      log_mod += std::log(std::abs(b));
      phase += std::arg(b);
    }
    return std::polar(std::exp(log_mod), phase);
  }

  /// Jet of B by Leibniz products of factor jets, renormalized as it goes so
  /// long products neither underflow nor lose the derivative information.
  Jet jet(cplx z, int order = 3) const {
    Jet acc = constant_jet(1.0);
    double log_scale = 0.0;
    for (std::size_t n = 0; n < zeros_.size(); ++n) {
      acc = acc * factor_jet(n, z);
      double m = 0.0;
      for (const cplx& c : {acc.value, acc.d1, acc.d2, acc.d3}) m = std::max({m, std::fabs(c.real()), std::fabs(c.imag())});
      if (m > 0.0 && (m < 1e-100 || m > 1e100)) {
        acc = cplx(1.0 / m) * acc;
        log_scale += std::log(m);
      }
    }
    if (log_scale != 0.0) acc = cplx(std::exp(log_scale)) * acc;
    return acc.truncated(order);
  }

  AnalyticFunction as_function() const {
    const auto self = *this;
    return AnalyticFunction::closed_form(
        "B", [self](cplx z) { return self.jet(z); }, [self](cplx z) { return self(z); });
  }

  /// prod_{k != n} b_k(z_n).
  cplx others_at_zero(std::size_t n) const {
    check_index(n);
    const cplx zn = zeros_[n].value();
    if (zeros_.size() <= kLogAccumulationThreshold) {
      cplx p = 1.0;
      for (std::size_t k = 0; k < zeros_.size(); ++k) {
        if (k != n) p *= factor(k, zn);
      }
      return p;
    }
    double log_mod = 0.0, phase = 0.0;
    for (std::size_t k = 0; k < zeros_.size(); ++k) {
      if (k == n) continue;
      const cplx b = factor(k, zn);
      log_mod += std::log(std::abs(b));
      phase += std::arg(b);
    }
    return std::polar(std::exp(log_mod), phase);
  }

  void check_index(std::size_t n) const {
    if (n >= zeros_.size()) throw DomainError("BlaschkeProduct: zero index out of range");
  }

 private:
  PointSequence zeros_;
  std::vector<cplx> unimodular_;
};

inline cplx eval_B(const BlaschkeProduct& b, cplx z) { return b(z); }

struct ZeroDerivative {
  cplx derivative;    // B'(z_n)
  double normalized;  // (1 - |z_n|^2) |B'(z_n)| = prod_{k != n} rho(z_k, z_n)
};

/// B'(z_n) = b_n'(z_n) prod_{k != n} b_k(z_n), no cancellation.
inline ZeroDerivative derivative_at_zero(const BlaschkeProduct& b, std::size_t n) {
  b.check_index(n);
  const cplx zn = b.zeros()[n].value();
  const cplx d = b.factor_jet(n, zn).d1 * b.others_at_zero(n);
  return {d, (1.0 - std::norm(zn)) * std::abs(d)};
}

/// B''(z_n) = b_n''(z_n) P + 2 b_n'(z_n) P', with P = prod_{k != n} b_k and
/// P'/P = sum_{k != n} b_k'/b_k at z_n.
inline cplx second_derivative_at_zero(const BlaschkeProduct& b, std::size_t n) {
  b.check_index(n);
  const cplx zn = b.zeros()[n].value();
  const Jet own = b.factor_jet(n, zn);
  cplx log_derivative = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (k == n) continue;
    const Jet fk = b.factor_jet(k, zn);
    log_derivative += fk.d1 / fk.value;
  }
  const cplx p = b.others_at_zero(n);
  return own.d2 * p + 2.0 * own.d1 * log_derivative * p;
}

struct SchwarzReport {
  double max_ratio = 0.0;
  double norm = 0.0;            // growth norm used in the denominator
  std::size_t points_used = 0;  // grid points inside the pseudo-disc
  std::optional<DiscPoint> argmax;
};

/// Empirical constant C(alpha, delta) in
///   |g(z)| <= C ||g||_alpha rho(z, z0) / (1 - |z0|^2)^alpha  on Delta(z0, delta)
/// for g vanishing at z0: the maximum of the ratio over grid points in the
/// pseudo-disc. `norm` overrides the grid estimate of ||g||_alpha.
inline SchwarzReport schwarz_bound_check(const AnalyticFunction& g, DiscPoint z0, double delta, double alpha,
                                         const DiscGrid& grid, std::optional<double> norm = std::nullopt) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("schwarz_bound_check: delta must lie in (0,1)");
  if (std::abs(g(z0.value())) >= 1e-10) throw PreconditionError("schwarz_bound_check: g(z0) must vanish");
  SchwarzReport report;
  report.norm = norm ? *norm : growth_norm(g, alpha, grid).value;
  if (report.norm <= 0.0) return report;
  const double weight = std::pow(1.0 - std::norm(z0.value()), alpha);
  for (const auto& p : grid) {
    const double rho = pseudo_distance(p, z0);
    if (rho >= delta || rho == 0.0) continue;
    ++report.points_used;
    const double ratio = std::abs(g(p.value())) * weight / (report.norm * rho);
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.argmax = p;
    }
  }
  return report;
}

}  // namespace zerodisc
