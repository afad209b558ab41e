#pragma once

// p-Carleson constants of two kinds of measures on the disc:
//   point measures  sum_n (1 - |z_n|)^p delta_{z_n}
//   area measures   |A(z)|^2 (1 - |z|^2)^{2+p} dm(z)
// in the conformally invariant form (sup over a of the Moebius-kernel
// integral) and the box form (sup over arcs I of mu(Q(I)) / |I|^p).
//
// Conventions: dm is unnormalized Lebesgue area measure; arc lengths are
// normalized so the whole circle has length 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "zerodisc/analytic.hpp"
#include "zerodisc/errors.hpp"
#include "zerodisc/geometry.hpp"
#include "zerodisc/quadrature.hpp"
#include "zerodisc/sequences.hpp"

namespace zerodisc {

inline void check_carleson_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("Carleson exponent p must lie in (0,1]");
}

struct PointMeasure {
  PointSequence sequence;
  double p = 1.0;
};

/// Polar product rule: Gauss-Legendre radially on panels geometric in 1 - r
/// (edges 0, 1/2, 3/4, ...), trapezoid in angle with a count doubling per
/// panel up to max_angular.
struct AreaQuadrature {
  int radial_order = 6;
  int base_angular = 32;
  int max_angular = 4096;

  AreaQuadrature refined() const { return {radial_order * 2, base_angular * 2, max_angular * 2}; }
};

inline constexpr double kDefaultAreaTruncation = 1.0 - 1e-4;

struct AreaMeasureSpec {
  AnalyticFunction A;
  double p = 1.0;
  double truncation_radius = kDefaultAreaTruncation;
  AreaQuadrature quadrature{};
};

/// Arc of the unit circle; arc_length is a fraction of the full circle.
struct CarlesonBox {
  double arc_center = 0.0;
  double arc_length = 1.0;

  void validate() const {
    if (!(arc_length > 0.0 && arc_length <= 1.0)) throw DomainError("CarlesonBox: arc_length must lie in (0,1]");
  }
  bool contains(cplx z) const {
    if (std::abs(z) < 1.0 - arc_length) return false;
    if (arc_length >= 1.0) return true;
    const double d = std::remainder(std::arg(z) - arc_center, 2.0 * std::numbers::pi);
    return std::abs(d) <= std::numbers::pi * arc_length;
  }
};

struct CarlesonReport {
  double constant = 0.0;
  DiscPoint maximizer;          // center a, or (1 - |I|) e^{i arc_center} for boxes
  double truncation = 1.0;      // truncation radius of the area integral (1 for point measures)
  double refinement_delta = 0.0;  // relative change under quadrature refinement
  bool stable = true;
  std::size_t candidates = 0;   // centers or boxes scanned
};

// ---------------------------------------------------------------------------
// Point measures.

/// sum_n ((1 - |a|^2) / |1 - conj(a) z_n|^2)^p (1 - |z_n|)^p at one center.
inline double invariant_sum_point(const PointMeasure& m, cplx a) {
  double s = 0.0;
  const double one_minus_a = 1.0 - std::norm(a);
  for (const auto& z : m.sequence) {
    const double kernel = one_minus_a / std::norm(1.0 - std::conj(a) * z.value());
    s += std::pow(kernel * (1.0 - z.abs()), m.p);
  }
  return s;
}

/// Centers: the atoms of the measure plus the supplied grid.
inline CarlesonReport invariant_constant_point(const PointMeasure& m, const DiscGrid& centers) {
  check_carleson_p(m.p);
  CarlesonReport rep;
  rep.maximizer = centers.points().front();
  auto visit = [&](const DiscPoint& a) {
    const double v = invariant_sum_point(m, a.value());
    ++rep.candidates;
    if (v > rep.constant) {
      rep.constant = v;
      rep.maximizer = a;
    }
  };
  for (const auto& a : m.sequence) visit(a);
  for (const auto& a : centers) visit(a);
  return rep;
}

// ---------------------------------------------------------------------------
// Area measures.

/// Quadrature nodes on |z| <= R with |A|^2 sampled once, reusable for any p and
/// any center.
struct AreaSamples {
  std::vector<cplx> z;
  std::vector<double> decay;  // 1 - |z|^2
  std::vector<double> mass;   // |A|^2 (1 - |z|^2)^2 r dr dtheta
  double truncation = 0.0;
};

namespace detail {
/// Panel edges 0, 1/2, 3/4, ... stopped at R.
inline std::vector<double> geometric_edges(double r_lo, double r_hi) {
  std::vector<double> edges{r_lo};
  double gap = 1.0 - r_lo;
  while (true) {
    gap *= 0.5;
    const double next = 1.0 - gap;
    if (next >= r_hi * (1.0 - 1e-15) || r_hi - next < 1e-3 * (1.0 - next)) break;
    edges.push_back(next);
  }
  edges.push_back(r_hi);
  return edges;
}

/// w^p with square-root chains for the quarter exponents.
inline double kernel_power(double w, double p) {
  if (p == 1.0) return w;
  if (p == 0.5) return std::sqrt(w);
  if (p == 0.25) return std::sqrt(std::sqrt(w));
  if (p == 0.75) {
    const double q = std::sqrt(std::sqrt(w));
    return q * q * q;
  }
  return std::pow(w, p);
}
}  // namespace detail

inline AreaSamples sample_area(const AnalyticFunction& A, double truncation_radius, const AreaQuadrature& quad) {
  if (!(truncation_radius > 0.0 && truncation_radius < 1.0)) {
    throw DomainError("area measure: truncation_radius must lie in (0,1)");
  }
  AreaSamples s;
  s.truncation = truncation_radius;
  const auto edges = detail::geometric_edges(0.0, truncation_radius);
  const auto& gl = gauss_legendre(quad.radial_order);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double r0 = edges[k], r1 = edges[k + 1];
    const int m = std::min(quad.max_angular, quad.base_angular << std::min<std::size_t>(k, 30));
    const double dtheta = 2.0 * std::numbers::pi / m;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gl.nodes[i];
      const double wr = 0.5 * (r1 - r0) * gl.weights[i] * r * dtheta;
      const double d = (1.0 - r) * (1.0 + r);
      // Offset alternate panels so nodes do not line up radially.
      const double offset = (k % 2 == 0) ? 0.0 : 0.5;
      for (int j = 0; j < m; ++j) {
        const cplx z = std::polar(r, (j + offset) * dtheta);
        s.z.push_back(z);
        s.decay.push_back(d);
        s.mass.push_back(wr * std::norm(A(z)) * d * d);
      }
    }
  }
  return s;
}

/// integral of ((1 - |a|^2)/|1 - conj(a) z|^2)^p |A|^2 (1 - |z|^2)^{2+p} dm.
inline double invariant_integral_area(const AreaSamples& s, double p, cplx a) {
  const double one_minus_a = 1.0 - std::norm(a);
  const cplx ca = std::conj(a);
  double total = 0.0;
  const std::size_t n = s.z.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (s.mass[i] == 0.0) continue;
    const cplx u = 1.0 - ca * s.z[i];
    const double w = one_minus_a * s.decay[i] / (u.real() * u.real() + u.imag() * u.imag());
    total += s.mass[i] * detail::kernel_power(w, p);
  }
  return total;
}

inline constexpr double kRefinementTolerance = 0.01;

/// Scan the base quadrature over all centers, then re-evaluate the three best
/// centers with the refined quadrature. A relative change above 1% marks the
/// report unstable.
inline CarlesonReport invariant_constant_area(const AreaSamples& base, const AreaSamples& refined, double p,
                                              const DiscGrid& centers) {
  check_carleson_p(p);
  std::vector<std::pair<double, DiscPoint>> values;
  values.reserve(centers.size());
  for (const auto& a : centers) values.emplace_back(invariant_integral_area(base, p, a.value()), a);
  const std::size_t top = std::min<std::size_t>(3, values.size());
  std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(top), values.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });
  CarlesonReport rep;
  rep.truncation = refined.truncation;
  rep.candidates = centers.size();
  rep.maximizer = values.front().second;
  for (std::size_t t = 0; t < top; ++t) {
    const double fine = invariant_integral_area(refined, p, values[t].second.value());
    const double coarse = values[t].first;
    const double delta = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
    if (fine > rep.constant) {
      rep.constant = fine;
      rep.maximizer = values[t].second;
    }
    if (fine != 0.0 || coarse != 0.0) rep.refinement_delta = std::max(rep.refinement_delta, delta);
  }
  rep.stable = rep.refinement_delta <= kRefinementTolerance;
  return rep;
}

inline CarlesonReport invariant_constant_area(const AreaMeasureSpec& spec, const DiscGrid& centers) {
  check_carleson_p(spec.p);
  const auto base = sample_area(spec.A, spec.truncation_radius, spec.quadrature);
  const auto fine = sample_area(spec.A, spec.truncation_radius, spec.quadrature.refined());
  return invariant_constant_area(base, fine, spec.p, centers);
}

/// Atoms plus a boundary-clustered polar grid reaching radius 1 - 1e-3.
inline DiscGrid default_carleson_centers(const PointSequence& atoms, int radial = 8, int angular = 16) {
  const DiscGrid g = make_pseudo_uniform_grid(1.0 - 1e-3, radial, angular, 512);
  std::vector<DiscPoint> pts(atoms.begin(), atoms.end());
  pts.insert(pts.end(), g.begin(), g.end());
  return grid_from_points(std::move(pts));
}

// ---------------------------------------------------------------------------
// Box form.

/// All dyadic arcs of length 2^{-m}, m = 0..levels.
inline std::vector<CarlesonBox> dyadic_boxes(int levels) {
  std::vector<CarlesonBox> boxes;
  for (int m = 0; m <= levels; ++m) {
    const int count = 1 << m;
    const double len = std::ldexp(1.0, -m);
    for (int j = 0; j < count; ++j) boxes.push_back({2.0 * std::numbers::pi * (j + 0.5) * len, len});
  }
  return boxes;
}

/// Arcs of length 2^{-m} (m = 0..levels) centered at the arguments of the atoms.
inline std::vector<CarlesonBox> atom_boxes(const PointSequence& atoms, int levels) {
  std::vector<CarlesonBox> boxes;
  for (const auto& z : atoms) {
    for (int m = 0; m <= levels; ++m) boxes.push_back({std::arg(z.value()), std::ldexp(1.0, -m)});
  }
  return boxes;
}

inline cplx box_corner(const CarlesonBox& box) {
  return std::polar(std::max(0.0, 1.0 - box.arc_length) * (1.0 - 1e-12), box.arc_center);
}

/// max over boxes of mu(Q(I)) / |I|^p, point masses summed exactly.
inline CarlesonReport box_constant(const PointMeasure& m, const std::vector<CarlesonBox>& boxes) {
  check_carleson_p(m.p);
  if (boxes.empty()) throw DegenerateInputError("box_constant: no boxes");
  CarlesonReport rep;
  rep.maximizer = DiscPoint(box_corner(boxes.front()));
  rep.candidates = boxes.size();
  for (const auto& box : boxes) {
    box.validate();
    double mass = 0.0;
    for (const auto& z : m.sequence) {
      if (box.contains(z.value())) mass += std::pow(1.0 - z.abs(), m.p);
    }
    const double ratio = mass / std::pow(box.arc_length, m.p);
    if (ratio > rep.constant) {
      rep.constant = ratio;
      rep.maximizer = DiscPoint(box_corner(box));
    }
  }
  return rep;
}

/// mu_{A,p}(Q(I)) truncated at the measure truncation radius: Gauss-Legendre in r on panels
/// geometric toward the boundary, composite Gauss-Legendre in angle with panel
/// width tied to 1 - r.
inline double area_box_mass(const AreaMeasureSpec& spec, const CarlesonBox& box, const AreaQuadrature& quad) {
  box.validate();
  const double r_lo = std::max(0.0, 1.0 - box.arc_length);
  const double R = spec.truncation_radius;
  if (r_lo >= R) return 0.0;
  const auto edges = detail::geometric_edges(r_lo, R);
  const auto& gl = gauss_legendre(quad.radial_order);
  const double half_arc = std::numbers::pi * box.arc_length;
  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double r0 = edges[k], r1 = edges[k + 1];
    const double feature = std::max(1.0 - r1, 1e-6);
    const int panels = std::clamp(static_cast<int>(std::ceil(half_arc / feature)), 1,
                                  std::max(1, quad.max_angular / quad.radial_order));
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gl.nodes[i];
      const double wr = 0.5 * (r1 - r0) * gl.weights[i] * r;
      const double decay = std::pow(1.0 - r * r, 2.0 + spec.p);
      const double angular = integrate_gauss(
          [&](double theta) { return std::norm(spec.A(std::polar(r, theta))); }, box.arc_center - half_arc,
          box.arc_center + half_arc, panels, quad.radial_order);
      mass += wr * decay * angular;
    }
  }
  return mass;
}

inline CarlesonReport box_constant(const AreaMeasureSpec& spec, const std::vector<CarlesonBox>& boxes) {
  check_carleson_p(spec.p);
  if (boxes.empty()) throw DegenerateInputError("box_constant: no boxes");
  CarlesonReport rep;
  rep.truncation = spec.truncation_radius;
  rep.candidates = boxes.size();
  rep.maximizer = DiscPoint(box_corner(boxes.front()));
  const CarlesonBox* best = &boxes.front();
  for (const auto& box : boxes) {
    const double ratio = area_box_mass(spec, box, spec.quadrature) / std::pow(box.arc_length, spec.p);
    if (ratio > rep.constant) {
      rep.constant = ratio;
      rep.maximizer = DiscPoint(box_corner(box));
      best = &box;
    }
  }
  if (rep.constant > 0.0) {
    const double fine = area_box_mass(spec, *best, spec.quadrature.refined()) / std::pow(best->arc_length, spec.p);
    rep.refinement_delta = std::abs(fine - rep.constant) / fine;
    rep.constant = fine;
    rep.stable = rep.refinement_delta <= kRefinementTolerance;
  }
  return rep;
}

}  // namespace zerodisc
