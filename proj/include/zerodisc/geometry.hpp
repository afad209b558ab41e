#pragma once

// Pseudo-hyperbolic geometry of the unit disc: points, distances, disc
// automorphisms, the Cayley map and deterministic sample grids.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "zerodisc/errors.hpp"

namespace zerodisc {

using cplx = std::complex<double>;

/// Points with |z| >= 1 - kBoundaryExclusion are rejected by DiscPoint.
inline constexpr double kBoundaryExclusion = 1e-12;

/// A point of the open unit disc.
class DiscPoint {
 public:
  DiscPoint() = default;
  explicit DiscPoint(cplx z) : z_(z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        std::abs(z) >= 1.0 - kBoundaryExclusion) {
      throw DomainError("DiscPoint: |z| must be < 1 - 1e-12, got " + describe(z));
    }
  }
  DiscPoint(double re, double im) : DiscPoint(cplx(re, im)) {}

  cplx value() const noexcept { return z_; }
  operator cplx() const noexcept { return z_; }
  double abs() const noexcept { return std::abs(z_); }
  double re() const noexcept { return z_.real(); }
  double im() const noexcept { return z_.imag(); }

  friend bool operator==(const DiscPoint& a, const DiscPoint& b) noexcept {
    return a.z_ == b.z_;
  }

 private:
  static std::string describe(cplx z) {
    return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
  }
  cplx z_{0.0, 0.0};
};

/// rho(z, w) = |z - w| / |1 - conj(z) w|.
///
/// Both points are strictly interior, so |1 - conj(z) w| >= 1 - |z||w| > 0 and
/// the quotient is always finite.
inline double pseudo_distance(cplx z, cplx w) noexcept {
  return std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
}

/// Open pseudo-hyperbolic disc Delta(center, radius).
class PseudoDisc {
 public:
  PseudoDisc(DiscPoint center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0 && radius < 1.0)) {
      throw DomainError("PseudoDisc: radius must lie in (0,1)");
    }
  }
  DiscPoint center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  bool contains(cplx z) const noexcept { return pseudo_distance(center_, z) < radius_; }

  /// Euclidean center and radius of the same disc.
  cplx euclidean_center() const noexcept {
    const double r2 = radius_ * radius_;
    return center_.value() * (1.0 - r2) / (1.0 - r2 * std::norm(center_.value()));
  }
  double euclidean_radius() const noexcept {
    const double r2 = radius_ * radius_;
    return radius_ * (1.0 - std::norm(center_.value())) /
           (1.0 - r2 * std::norm(center_.value()));
  }

 private:
  DiscPoint center_;
  double radius_;
};

/// The involutive disc automorphism phi_a(z) = (a - z) / (1 - conj(a) z).
class Automorphism {
 public:
  explicit Automorphism(DiscPoint a) : a_(a.value()) {}

  cplx operator()(cplx z) const noexcept { return (a_ - z) / (1.0 - std::conj(a_) * z); }
  DiscPoint operator()(const DiscPoint& z) const { return DiscPoint((*this)(z.value())); }

  /// phi_a'(z) = (|a|^2 - 1) / (1 - conj(a) z)^2.
  cplx derivative(cplx z) const noexcept {
    const cplx d = 1.0 - std::conj(a_) * z;
    return (std::norm(a_) - 1.0) / (d * d);
  }
  cplx second_derivative(cplx z) const noexcept {
    const cplx d = 1.0 - std::conj(a_) * z;
    return 2.0 * std::conj(a_) * (std::norm(a_) - 1.0) / (d * d * d);
  }
  cplx third_derivative(cplx z) const noexcept {
    const cplx d = 1.0 - std::conj(a_) * z;
    const cplx ca = std::conj(a_);
    return 6.0 * ca * ca * (std::norm(a_) - 1.0) / (d * d * d * d);
  }

  cplx center() const noexcept { return a_; }

 private:
  cplx a_;
};

inline Automorphism automorphism(DiscPoint a) { return Automorphism(a); }

/// Cayley map (zeta - i) / (zeta + i) from the upper half-plane onto the disc.
inline DiscPoint cayley(cplx zeta) {
  if (!(zeta.imag() > 0.0)) {
    throw DomainError("cayley: Im(zeta) must be positive");
  }
  const cplx i(0.0, 1.0);
  return DiscPoint((zeta - i) / (zeta + i));
}

/// Non-throwing variant used by generators that filter by modulus themselves.
inline cplx cayley_raw(cplx zeta) noexcept {
  const cplx i(0.0, 1.0);
  return (zeta - i) / (zeta + i);
}

enum class GridScheme { polar, pseudo_uniform };

/// Finite, immutable set of sample points used as a proxy for suprema over the
/// disc.
class DiscGrid {
 public:
  DiscGrid(std::vector<DiscPoint> points, GridScheme scheme) : points_(std::move(points)), scheme_(scheme) {
    if (points_.empty()) throw DomainError("DiscGrid: grid must be nonempty");
    max_modulus_ = 0.0;
    for (const auto& p : points_) max_modulus_ = std::max(max_modulus_, p.abs());
  }

  std::span<const DiscPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double max_modulus() const noexcept { return max_modulus_; }
  GridScheme scheme() const noexcept { return scheme_; }

  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

 private:
  std::vector<DiscPoint> points_;
  GridScheme scheme_;
  double max_modulus_ = 0.0;
};

namespace detail {

// Radii 1 - (1 - max_modulus) 2^k, outermost first in k. Levels that would fall
// at or below zero are replaced by an even fill of (0, innermost positive level).
inline std::vector<double> clustered_radii(double max_modulus, int radial_count) {
  std::vector<double> radii(static_cast<std::size_t>(radial_count));
  int first_positive = 0;
  for (int i = 0; i < radial_count; ++i) {
    const double r = 1.0 - (1.0 - max_modulus) * std::ldexp(1.0, radial_count - 1 - i);
    radii[static_cast<std::size_t>(i)] = r;
    if (r <= 0.0) first_positive = i + 1;
  }
  if (first_positive > 0) {
    const double inner = radii[static_cast<std::size_t>(first_positive)];
    for (int i = 0; i < first_positive; ++i) {
      radii[static_cast<std::size_t>(i)] = inner * (i + 1) / (first_positive + 1);
    }
  }
  return radii;
}

inline void check_grid_params(double max_modulus, int radial_count, int angular_count) {
  if (!(max_modulus > 0.0 && max_modulus < 1.0)) {
    throw DomainError("make_grid: max_modulus must lie in (0,1)");
  }
  if (radial_count < 1 || angular_count < 1) {
    throw DomainError("make_grid: radial and angular counts must be >= 1");
  }
}

}  // namespace detail

/// Polar grid of radial_count x angular_count points. Radii are geometric in
/// 1 - r with ratio 1/2 per level, the outermost level at max_modulus; angles
/// are 2 pi k / angular_count.
inline DiscGrid make_grid(double max_modulus, int radial_count, int angular_count) {
  detail::check_grid_params(max_modulus, radial_count, angular_count);
  const auto radii = detail::clustered_radii(max_modulus, radial_count);
  std::vector<DiscPoint> pts;
  pts.reserve(static_cast<std::size_t>(radial_count) * static_cast<std::size_t>(angular_count));
  for (double r : radii) {
    for (int k = 0; k < angular_count; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / angular_count;
      pts.emplace_back(std::polar(r, theta));
    }
  }
  return DiscGrid(std::move(pts), GridScheme::polar);
}

/// Boundary-clustered grid whose angular count doubles on each outer level
/// (roughly constant hyperbolic spacing), capped at max_angular; always
/// contains the origin.
inline DiscGrid make_pseudo_uniform_grid(double max_modulus, int radial_count, int base_angular,
                                         int max_angular = 4096) {
  detail::check_grid_params(max_modulus, radial_count, base_angular);
  const auto radii = detail::clustered_radii(max_modulus, radial_count);
  std::vector<DiscPoint> pts;
  pts.emplace_back(0.0, 0.0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    const int m = std::min(max_angular, static_cast<int>(std::ceil(base_angular * 0.5 / (1.0 - r))));
    const int count = std::max(base_angular, m);
    // Stagger alternate levels by half a step.
    const double offset = (i % 2 == 0) ? 0.0 : 0.5;
    for (int k = 0; k < count; ++k) {
      pts.emplace_back(std::polar(r, 2.0 * std::numbers::pi * (k + offset) / count));
    }
  }
  return DiscGrid(std::move(pts), GridScheme::pseudo_uniform);
}

/// Grid made from explicit points (e.g. a sequence plus the origin).
inline DiscGrid grid_from_points(std::vector<DiscPoint> points) {
  return DiscGrid(std::move(points), GridScheme::pseudo_uniform);
}

/// Image of a grid under an automorphism.
inline DiscGrid transform_grid(const DiscGrid& grid, const Automorphism& phi) {
  std::vector<DiscPoint> pts;
  pts.reserve(grid.size());
  for (const auto& p : grid) pts.push_back(phi(p));
  return DiscGrid(std::move(pts), grid.scheme());
}

}  // namespace zerodisc
