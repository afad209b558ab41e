#pragma once

// Finite zero sequences in the disc and the statistics that classify them:
// separation, uniform separation, Blaschke sums, integrated counting functions
// and the uniform-density proxies built from them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "zerodisc/errors.hpp"
#include "zerodisc/geometry.hpp"
#include "zerodisc/quadrature.hpp"

namespace zerodisc {

/// Ordered list of pairwise distinct disc points.
class PointSequence {
 public:
  PointSequence() = default;
  explicit PointSequence(std::vector<DiscPoint> points) : points_(std::move(points)) { check_distinct(); }
  PointSequence(std::initializer_list<cplx> points) {
    points_.reserve(points.size());
    for (cplx z : points) points_.emplace_back(z);
    check_distinct();
  }

  std::span<const DiscPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const DiscPoint& operator[](std::size_t i) const { return points_.at(i); }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  /// Image under a disc automorphism.
  PointSequence mapped(const Automorphism& phi) const {
    std::vector<DiscPoint> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(phi(p));
    return PointSequence(std::move(out));
  }

 private:
  void check_distinct() const {
    std::vector<cplx> sorted;
    sorted.reserve(points_.size());
    for (const auto& p : points_) sorted.push_back(p.value());
    auto less = [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); };
    std::sort(sorted.begin(), sorted.end(), less);
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("PointSequence: points must be pairwise distinct");
    }
  }
  std::vector<DiscPoint> points_;
};

/// The exponential sequence {1 - 2^{-n}}, n = 1..count.
inline PointSequence exponential_sequence(int count) {
  std::vector<DiscPoint> pts;
  for (int n = 1; n <= count; ++n) pts.emplace_back(1.0 - std::ldexp(1.0, -n), 0.0);
  return PointSequence(std::move(pts));
}

inline void require_pairs(const PointSequence& seq, const char* op) {
  if (seq.size() < 2) throw DegenerateInputError(std::string(op) + ": need at least two points");
}

/// min over n != k of rho(z_n, z_k).
inline double separation_constant(const PointSequence& seq) {
  require_pairs(seq, "separation_constant");
  const auto pts = seq.points();
  double best = 1.0;
  for (std::size_t n = 0; n < pts.size(); ++n) {
    for (std::size_t k = n + 1; k < pts.size(); ++k) best = std::min(best, pseudo_distance(pts[n], pts[k]));
  }
  return best;
}

/// min over n != k of rho(z_n, z_k) for one fixed n.
inline double local_separation(const PointSequence& seq, std::size_t n) {
  double best = 1.0;
  const auto pts = seq.points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k != n) best = std::min(best, pseudo_distance(pts[n], pts[k]));
  }
  return best;
}

/// log of prod_{n != k} rho(z_n, z_k).
inline double log_distance_product(const PointSequence& seq, std::size_t k) {
  const auto pts = seq.points();
  double s = 0.0;
  for (std::size_t n = 0; n < pts.size(); ++n) {
    if (n != k) s += std::log(pseudo_distance(pts[n], pts[k]));
  }
  return s;
}

/// min over k of prod_{n != k} rho(z_n, z_k), accumulated in logs.
inline double uniform_separation_constant(const PointSequence& seq) {
  require_pairs(seq, "uniform_separation_constant");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < seq.size(); ++k) best = std::min(best, log_distance_product(seq, k));
  return std::exp(best);
}

/// sum (1 - |z_n|) over the truncation.
inline double blaschke_sum(const PointSequence& seq) {
  double s = 0.0;
  for (const auto& p : seq) s += 1.0 - p.abs();
  return s;
}

/// Integral over s in [0, r] of n(seq, zeta, s), the number of points with
/// rho(z_n, zeta) < s. Exact: sum of (r - rho) over points with rho < r.
inline double counting_integral(const PointSequence& seq, cplx zeta, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("counting_integral: r must lie in (0,1)");
  double s = 0.0;
  for (const auto& p : seq) {
    const double rho = pseudo_distance(p, zeta);
    if (rho < r) s += r - rho;
  }
  return s;
}

/// Finite proxy for a uniform density: value = extremum over the supplied
/// centers of counting_integral / log(1 / (1 - r_max)).
struct DensityEstimate {
  double value = 0.0;
  double r_max = 0.0;
  std::size_t centers = 0;
  DiscPoint extremal_center;
};

namespace detail {
template <class Better>
DensityEstimate density_scan(const PointSequence& seq, double r_max, const DiscGrid& centers, Better better) {
  if (!(r_max > 0.0 && r_max < 1.0)) throw DomainError("density: r_max must lie in (0,1)");
  const double norm = std::log(1.0 / (1.0 - r_max));
  DensityEstimate est{0.0, r_max, centers.size(), centers.points().front()};
  bool first = true;
  for (const auto& c : centers) {
    const double v = counting_integral(seq, c.value(), r_max) / norm;
    if (first || better(v, est.value)) {
      est.value = v;
      est.extremal_center = c;
      first = false;
    }
  }
  return est;
}
}  // namespace detail

inline DensityEstimate density_upper(const PointSequence& seq, double r_max, const DiscGrid& centers) {
  return detail::density_scan(seq, r_max, centers, [](double v, double best) { return v > best; });
}

inline DensityEstimate density_lower(const PointSequence& seq, double r_max, const DiscGrid& centers) {
  return detail::density_scan(seq, r_max, centers, [](double v, double best) { return v < best; });
}

/// The sequence itself plus the origin. With `limit` > 0 only the `limit`
/// points nearest the origin are used.
inline DiscGrid default_density_centers(const PointSequence& seq, std::size_t limit = 0) {
  std::vector<DiscPoint> pts(seq.begin(), seq.end());
  if (limit > 0 && pts.size() > limit) {
    std::stable_sort(pts.begin(), pts.end(), [](const DiscPoint& a, const DiscPoint& b) { return a.abs() < b.abs(); });
    pts.resize(limit);
  }
  if (std::find(pts.begin(), pts.end(), DiscPoint(0.0, 0.0)) == pts.end()) pts.insert(pts.begin(), DiscPoint(0.0, 0.0));
  return grid_from_points(std::move(pts));
}

// ---------------------------------------------------------------------------
// Lattices.

inline constexpr double kDefaultTruncation = 1e-6;

/// Index box for the lattice a^j (b k + i) and the boundary cutoff applied to
/// its Cayley image.
struct LatticeParams {
  double a = 2.0;
  double b = 1.0;
  int j_min = 0;
  int j_max = 0;
  int k_min = 0;
  int k_max = 0;
  double eps_trunc = kDefaultTruncation;

  void validate() const {
    if (!(a > 1.0)) throw DomainError("LatticeParams: a must exceed 1");
    if (!(b > 0.0)) throw DomainError("LatticeParams: b must be positive");
    if (j_min > j_max || k_min > k_max) throw DomainError("LatticeParams: index ranges must be nonempty");
    if (!(eps_trunc > 0.0 && eps_trunc < 1.0)) throw DomainError("LatticeParams: eps_trunc must lie in (0,1)");
  }

  /// Asymptotic uniform density 2 pi / (b log a) of the full lattice.
  double density() const { return 2.0 * std::numbers::pi / (b * std::log(a)); }
};

/// Cayley images of a^j (b k + i) for indices in the box, keeping those of
/// modulus < 1 - eps_trunc; exact duplicates removed, order (j, k) ascending.
inline PointSequence seip_lattice(const LatticeParams& params) {
  params.validate();
  std::vector<DiscPoint> pts;
  const double limit = 1.0 - params.eps_trunc;
  for (int j = params.j_min; j <= params.j_max; ++j) {
    const double scale = std::pow(params.a, j);
    for (int k = params.k_min; k <= params.k_max; ++k) {
      const cplx w = cayley_raw(scale * cplx(params.b * k, 1.0));
      if (std::abs(w) < limit) pts.emplace_back(w);
    }
  }
  std::vector<DiscPoint> unique;
  unique.reserve(pts.size());
  {
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto key_less = [&](std::size_t x, std::size_t y) {
      const cplx a = pts[x].value(), b = pts[y].value();
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    };
    std::stable_sort(order.begin(), order.end(), key_less);
    std::vector<bool> keep(pts.size(), true);
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (pts[order[i]] == pts[order[i - 1]]) keep[order[i]] = false;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (keep[i]) unique.push_back(pts[i]);
    }
  }
  return PointSequence(std::move(unique));
}

/// Smallest index box containing every lattice point of modulus < 1 - eps.
///
/// With zeta = a^j (b k + i), 1 - |w|^2 = 4 a^j / (a^{2j} b^2 k^2 + (a^j + 1)^2),
/// which bounds both j and |k| in closed form.
inline LatticeParams lattice_box_for_truncation(double a, double b, double eps) {
  LatticeParams p{a, b, 0, 0, 0, 0, eps};
  p.validate();
  const double t = 1.0 - (1.0 - eps) * (1.0 - eps);
  auto row_reaches = [&](int j) {
    const double aj = std::pow(a, j);
    return 4.0 * aj / ((aj + 1.0) * (aj + 1.0)) > t;
  };
  int j_lo = 0, j_hi = 0;
  while (row_reaches(j_lo - 1)) --j_lo;
  while (row_reaches(j_hi + 1)) ++j_hi;
  int k_hi = 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double aj = std::pow(a, j);
    const double k2 = (4.0 * aj / t - (aj + 1.0) * (aj + 1.0)) / (aj * aj * b * b);
    if (k2 > 0.0) k_hi = std::max(k_hi, static_cast<int>(std::ceil(std::sqrt(k2))) + 1);
  }
  p.j_min = j_lo;
  p.j_max = j_hi;
  p.k_min = -k_hi;
  p.k_max = k_hi;
  return p;
}

/// Every lattice point of modulus < 1 - eps, generated row by row so that
/// rows with huge k ranges do not inflate the others.
inline PointSequence seip_lattice_truncated(double a, double b, double eps) {
  const LatticeParams box = lattice_box_for_truncation(a, b, eps);
  const double t = 1.0 - (1.0 - eps) * (1.0 - eps);
  std::vector<DiscPoint> pts;
  for (int j = box.j_min; j <= box.j_max; ++j) {
    const double aj = std::pow(a, j);
    const double k2 = (4.0 * aj / t - (aj + 1.0) * (aj + 1.0)) / (aj * aj * b * b);
    if (k2 < 0.0) continue;
    const int kb = static_cast<int>(std::ceil(std::sqrt(k2))) + 1;
    for (int k = -kb; k <= kb; ++k) {
      const cplx w = cayley_raw(aj * cplx(b * k, 1.0));
      if (std::abs(w) < 1.0 - eps) pts.emplace_back(w);
    }
  }
  return PointSequence(std::move(pts));
}

/// Trapezoid estimate of the integral over [0, 2 pi) of log dist(e^{i theta}, seq).
inline double boundary_log_distance(const PointSequence& seq, int quad_nodes) {
  if (seq.empty()) throw DegenerateInputError("boundary_log_distance: sequence must be nonempty");
  if (quad_nodes < 16) throw DomainError("boundary_log_distance: quad_nodes must be >= 16");
  return integrate_periodic(
      [&seq](double theta) {
        const cplx e = std::polar(1.0, theta);
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : seq) d = std::min(d, std::abs(e - p.value()));
        return std::log(d);
      },
      quad_nodes);
}

}  // namespace zerodisc
