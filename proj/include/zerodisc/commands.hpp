#pragma once

// Run configuration and the four report-producing commands.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zerodisc/builder.hpp"
#include "zerodisc/carleson.hpp"
#include "zerodisc/errors.hpp"
#include "zerodisc/oscillation.hpp"
#include "zerodisc/report.hpp"
#include "zerodisc/sequence_io.hpp"
#include "zerodisc/sequences.hpp"

namespace zerodisc {

enum class Command { sequence, build, corollary1, normal };
enum class Format { csv, json };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::sequence: return "sequence";
    case Command::build: return "build";
    case Command::corollary1: return "corollary1";
    case Command::normal: return "normal";
  }
  return "?";
}

/// Lattice source: explicit index box, or (a, b) alone with the box chosen
/// from the truncation 1 - rmax.
struct LatticeSource {
  double a = 2.0;
  double b = 1.0;
  std::optional<LatticeParams> box;
};

inline constexpr std::size_t kDenseLimit = 2000;   // largest sequence for the dense builder
inline constexpr std::size_t kPairLimit = 5000;    // O(N^2) statistics above this are skipped
inline constexpr double kNormGridModulus = 0.999;

struct RunConfig {
  Command command = Command::sequence;
  std::optional<std::string> sequence_file;
  std::optional<LatticeSource> lattice;
  std::vector<double> p_values;
  double rmax = 0.99;
  int grid_radial = 8;
  int grid_angular = 64;
  double tol = kDefaultOdeTolerance;
  double contour_radius = 0.995;
  double area_truncation = kDefaultAreaTruncation;
  std::string out_dir;
  Format format = Format::csv;
  unsigned long long seed = 1;
  bool force = false;

  std::vector<double> effective_p() const {
    if (!p_values.empty()) return p_values;
    return {0.25, 0.5, 1.0};
  }

  void validate() const {
    if (sequence_file && lattice) throw ConfigError("give either --sequence or --lattice, not both");
    if (!sequence_file && !lattice) throw ConfigError("a sequence source is required (--sequence FILE or --lattice ...)");
    for (double p : p_values) {
      if (!(p > 0.0 && p <= 1.0)) throw ConfigError("--p values must lie in (0,1]");
    }
    if (!(rmax > 0.0 && rmax < 1.0)) throw ConfigError("--rmax must lie in (0,1)");
    if (grid_radial < 1 || grid_radial > 64) throw ConfigError("--grid-radial must lie in [1,64]");
    if (grid_angular < 4 || grid_angular > 8192) throw ConfigError("--grid-angular must lie in [4,8192]");
    if (!(tol >= 1e-14 && tol <= 1e-3)) throw ConfigError("--tol must lie in [1e-14,1e-3]");
    if (lattice) {
      if (!(lattice->a > 1.0) || !(lattice->b > 0.0)) throw ConfigError("--lattice needs a > 1 and b > 0");
      if (lattice->box) {
        try {
          lattice->box->validate();
        } catch (const DomainError& e) {
          throw ConfigError(std::string("--lattice: ") + e.what());
        }
      }
    }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command_name(command);
    if (sequence_file) j["sequence"] = *sequence_file;
    if (lattice) {
      nlohmann::ordered_json l;
      l["a"] = lattice->a;
      l["b"] = lattice->b;
      if (lattice->box) {
        l["j_min"] = lattice->box->j_min;
        l["j_max"] = lattice->box->j_max;
        l["k_min"] = lattice->box->k_min;
        l["k_max"] = lattice->box->k_max;
      }
      j["lattice"] = l;
    }
    j["p"] = effective_p();
    j["rmax"] = rmax;
    j["grid_radial"] = grid_radial;
    j["grid_angular"] = grid_angular;
    j["tol"] = tol;
    j["contour_radius"] = contour_radius;
    j["area_truncation"] = area_truncation;
    j["norm_grid_modulus"] = kNormGridModulus;
    j["seed"] = seed;
    j["force"] = force;
    return j;
  }

  std::string hash() const { return fnv1a_hex(to_json().dump()); }
};

/// Parses "a,b" or "a,b,jmin,jmax,kmin,kmax"; a and b accept exp(x).
inline LatticeSource parse_lattice(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 2 && parts.size() != 6) throw ConfigError("--lattice expects a,b or a,b,jmin,jmax,kmin,kmax");
  const auto real = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    bool exponential = false;
    if (s.rfind("exp(", 0) == 0 && !s.empty() && s.back() == ')') {
      s = s.substr(4, s.size() - 5);
      exponential = true;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("--lattice: cannot read number '" + s + "'");
    return exponential ? std::exp(v) : v;
  };
  const auto integer = [](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("--lattice: cannot read index '" + s + "'");
    return v;
  };
  LatticeSource src{real(parts[0]), real(parts[1]), std::nullopt};
  if (parts.size() == 6) {
    src.box = LatticeParams{src.a, src.b, integer(parts[2]), integer(parts[3]), integer(parts[4]), integer(parts[5])};
  }
  return src;
}

inline PointSequence load_sequence(const RunConfig& cfg) {
  if (cfg.sequence_file) return read_sequence_file(*cfg.sequence_file);
  const LatticeSource& l = *cfg.lattice;
  const double eps = 1.0 - cfg.rmax;
  if (l.box) {
    LatticeParams p = *l.box;
    p.eps_trunc = eps;
    return seip_lattice(p);
  }
  return seip_lattice_truncated(l.a, l.b, eps);
}

/// Truncation levels 10^{-m/2}, m = 2, 3, ..., ending at eps_min.
inline std::vector<double> nested_levels(double eps_min) {
  std::vector<double> out;
  for (int m = 2; m < 40; ++m) {
    const double e = std::pow(10.0, -0.5 * m);
    if (e < eps_min * (1.0 + 1e-9)) break;
    out.push_back(e);
  }
  if (out.empty() || out.back() > eps_min * (1.0 + 1e-9)) out.push_back(eps_min);
  return out;
}

inline PointSequence restrict_to(const PointSequence& seq, double eps) {
  std::vector<DiscPoint> kept;
  for (const auto& z : seq) {
    if (z.abs() < 1.0 - eps) kept.push_back(z);
  }
  if (kept.empty()) return PointSequence();
  return PointSequence(std::move(kept));
}

namespace detail {

inline Report start_report(const RunConfig& cfg) {
  Report rep;
  rep.command = command_name(cfg.command);
  rep.config = cfg.to_json();
  rep.config_hash = fnv1a_hex(rep.config.dump());
  return rep;
}

inline void add_point(Record& r, const std::string& prefix, cplx z) {
  r.set(prefix + "_re", z.real());
  r.set(prefix + "_im", z.imag());
}

inline double density_proxy_at_origin(const PointSequence& seq, double r) {
  return counting_integral(seq, 0.0, r) / std::log(1.0 / (1.0 - r));
}

/// Hypothesis guard shared by build and normal.
inline void guard_uniform_separation(const PointSequence& seq, const RunConfig& cfg, Report& rep) {
  if (seq.size() > kDenseLimit) {
    throw RefusalError("sequence has " + std::to_string(seq.size()) + " points; the dense builder accepts at most " +
                       std::to_string(kDenseLimit));
  }
  const double usep = seq.size() >= 2 ? uniform_separation_constant(seq) : 1.0;
  if (usep < kUniformSeparationWarning) {
    const std::string msg = "uniform separation constant " + format_double(usep) +
                            " is below 0.05; the construction needs a uniformly separated sequence";
    if (!cfg.force) throw RefusalError(msg + " (rerun with --force to proceed)");
    rep.warnings.push_back(msg + "; proceeding because of --force");
  }
}

inline BuildOptions build_options(const RunConfig& cfg) {
  BuildOptions o;
  o.seed = cfg.seed;
  o.norm_grid_modulus = kNormGridModulus;
  o.norm_grid_radial = cfg.grid_radial;
  o.norm_grid_angular = cfg.grid_angular;
  return o;
}

inline void add_bundle_records(Report& rep, const CoefficientBundle& b) {
  const auto& d = b.diagnostics;
  rep.add("coefficient_builder", "bundle")
      .set("count", b.zeros.size())
      .set("interp_residual", d.interp_residual)
      .set("interp_condition", d.interp_condition)
      .set("interp_regularized", d.interp_regularized)
      .set("h2_norm_grid", d.h2_norm_grid)
      .set("h2_grid_max_modulus", d.h2_grid_max_modulus)
      .set("singular_radius", d.singular_radius)
      .set("ode_residual", d.ode_residual)
      .set("uniform_separation", d.uniform_separation)
      .set("bloch_ratio", d.bloch_ratio)
      .set("derivative_floor", d.derivative_floor)
      .set("density_upper", d.density_upper)
      .set("beta", d.beta);
  for (const auto& w : d.warnings) rep.warnings.push_back(w);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline Report cmd_sequence(const RunConfig& cfg) {
  Report rep = detail::start_report(cfg);
  const PointSequence seq = load_sequence(cfg);
  if (seq.empty()) throw ConfigError("the sequence source produced no points");
  auto& s = rep.add("sequences", "summary");
  s.set("count", seq.size()).set("blaschke_sum", blaschke_sum(seq));
  if (seq.size() >= 2 && seq.size() <= kPairLimit) {
    s.set("separation", separation_constant(seq)).set("uniform_separation", uniform_separation_constant(seq));
  } else if (seq.size() > kPairLimit) {
    rep.warnings.push_back("pairwise statistics skipped above " + std::to_string(kPairLimit) + " points");
  }
  if (seq.size() <= 20000) s.set("boundary_log_distance", boundary_log_distance(seq, 1024));

  const DiscGrid centers = default_density_centers(seq, 16);
  for (double eps : nested_levels(1.0 - cfg.rmax)) {
    const double r = 1.0 - eps;
    const auto up = density_upper(seq, r, centers);
    const auto lo = density_lower(seq, r, centers);
    auto& d = rep.add("sequences", "density");
    d.set("r", r).set("upper", up.value).set("lower", lo.value).set("centers", centers.size());
    detail::add_point(d, "upper_center", up.extremal_center.value());
  }
  if (cfg.lattice) {
    rep.add("sequences", "lattice").set("a", cfg.lattice->a).set("b", cfg.lattice->b).set(
        "density_formula", 2.0 * std::numbers::pi / (cfg.lattice->b * std::log(cfg.lattice->a)));
    for (double eps : nested_levels(1.0 - cfg.rmax)) {
      const PointSequence part = restrict_to(seq, eps);
      rep.add("sequences", "partial_sum").set("eps", eps).set("count", part.size()).set("blaschke_sum",
                                                                                      part.empty() ? 0.0 : blaschke_sum(part));
    }
  }
  return rep;
}

/// JSON manifest of a built bundle; its "points" list makes it a valid
/// sequence document as well.
inline nlohmann::ordered_json bundle_manifest(const CoefficientBundle& b, const VerificationReport* verification,
                                              const Report& rep) {
  nlohmann::ordered_json m = sequence_to_json(b.zeros);
  m["config_hash"] = rep.config_hash;
  const auto& d = b.diagnostics;
  nlohmann::ordered_json diag;
  diag["interp_residual"] = d.interp_residual;
  diag["interp_condition"] = std::isfinite(d.interp_condition) ? nlohmann::ordered_json(d.interp_condition)
                                                               : nlohmann::ordered_json(format_double(d.interp_condition));
  diag["interp_regularized"] = d.interp_regularized;
  diag["h2_norm_grid"] = d.h2_norm_grid;
  diag["h2_grid_max_modulus"] = d.h2_grid_max_modulus;
  diag["singular_radius"] = d.singular_radius;
  diag["ode_residual"] = d.ode_residual;
  diag["uniform_separation"] = d.uniform_separation;
  diag["bloch_ratio"] = d.bloch_ratio;
  diag["derivative_floor"] = d.derivative_floor;
  m["diagnostics"] = diag;
  const auto pairs = [](const std::vector<cplx>& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const cplx& c : v) arr.push_back({{"re", c.real() + 0.0}, {"im", c.imag() + 0.0}});
    return arr;
  };
  m["targets"] = pairs(b.targets);
  m["kernel_coefficients"] = pairs(b.kernel_coefficients);
  if (verification) {
    nlohmann::ordered_json v;
    v["max_abs_f_at_zeros"] = verification->max_abs_f_at_zeros;
    v["expected_count"] = verification->expected;
    v["counted"] = verification->counted.count;
    v["raw_winding"] = verification->counted.raw;
    v["radial_rel_error"] = verification->radial_rel_error;
    v["passed"] = verification->passed();
    v["mismatches"] = verification->mismatches;
    m["verification"] = v;
  }
  nlohmann::ordered_json carl = nlohmann::ordered_json::array();
  for (const auto* r : rep.find("carleson_area")) {
    carl.push_back({{"p", r->number("p")}, {"constant", r->number("constant")},
                    {"refinement_delta", r->number("refinement_delta")}});
  }
  m["carleson"] = carl;
  return m;
}

struct BuildArtifacts {
  std::optional<CoefficientBundle> bundle;
  std::optional<SolutionTrace> radial_trace;
  nlohmann::ordered_json manifest;
};

inline Report cmd_build(const RunConfig& cfg, BuildArtifacts* artifacts = nullptr) {
  Report rep = detail::start_report(cfg);
  const PointSequence seq = load_sequence(cfg);
  if (seq.empty()) throw ConfigError("the sequence source produced no points");
  detail::guard_uniform_separation(seq, cfg, rep);
  const CoefficientBundle bundle = build_coefficient(seq, detail::build_options(cfg));
  detail::add_bundle_records(rep, bundle);

  VerifyOptions vo;
  vo.contour_radius = cfg.contour_radius;
  vo.ode_tol = cfg.tol;
  const VerificationReport ver = verify_prescribed_zeros(bundle, vo);
  rep.add("oscillation", "verification")
      .set("max_abs_f_at_zeros", ver.max_abs_f_at_zeros)
      .set("contour_radius", ver.counted.radius_used)
      .set("expected_count", ver.expected)
      .set("counted", ver.counted.count)
      .set("raw_winding", ver.counted.raw)
      .set("anchors", ver.counted.anchors)
      .set("anchor_mismatch", ver.counted.anchor_mismatch)
      .set("radial_rel_error", ver.radial_rel_error)
      .set("passed", ver.passed());
  for (const auto& m : ver.mismatches) rep.warnings.push_back("verification: " + m);
  if (!ver.passed()) rep.failed = true;

  const DiscGrid grid = make_grid(kNormGridModulus, cfg.grid_radial, cfg.grid_angular);
  const GrowthEstimate g = growth_norm(bundle.A, 2.0, grid);
  auto& gr = rep.add("analytic_core", "growth_norm");
  gr.set("alpha", 2.0).set("value", g.value).set("max_modulus", g.max_modulus);
  detail::add_point(gr, "argmax", g.argmax.value());

  const DiscGrid centers = default_carleson_centers(seq);
  AreaQuadrature quad;
  const AreaSamples base = sample_area(bundle.A, cfg.area_truncation, quad);
  const AreaSamples fine = sample_area(bundle.A, cfg.area_truncation, quad.refined());
  for (double p : cfg.effective_p()) {
    const CarlesonReport c = invariant_constant_area(base, fine, p, centers);
    auto& r = rep.add("carleson", "carleson_area");
    r.set("measure", "area_A").set("p", p).set("constant", c.constant);
    detail::add_point(r, "maximizer", c.maximizer.value());
    r.set("truncation", c.truncation).set("refinement_delta", c.refinement_delta).set("stable", c.stable);
  }

  if (artifacts) {
    const Jet f0 = bundle.f.jet(0.0, 1);
    artifacts->radial_trace = integrate(bundle.A, OdeState{DiscPoint(0.0, 0.0), f0.value, f0.d1},
                                        PathSpec::segment(DiscPoint(0.0, 0.0), DiscPoint(cfg.contour_radius, 0.0), 200),
                                        cfg.tol);
    artifacts->manifest = bundle_manifest(bundle, &ver, rep);
    artifacts->bundle = bundle;
  }
  return rep;
}

inline Report cmd_corollary1(const RunConfig& cfg) {
  Report rep = detail::start_report(cfg);
  if (!cfg.lattice) throw ConfigError("corollary1 needs --lattice");
  const double density = 2.0 * std::numbers::pi / (cfg.lattice->b * std::log(cfg.lattice->a));
  if (density >= 1.0) {
    throw RefusalError("lattice density 2 pi/(b log a) = " + format_double(density) +
                       " is not below 1");
  }
  rep.add("sequences", "lattice").set("a", cfg.lattice->a).set("b", cfg.lattice->b).set("density_formula", density);
  const PointSequence all = load_sequence(cfg);
  double previous_sum = -1.0;
  bool increasing = true;
  int levels = 0;
  for (double eps : nested_levels(1.0 - cfg.rmax)) {
    const PointSequence part = restrict_to(all, eps);
    auto& r = rep.add("cli_report", "truncation");
    r.set("eps", eps).set("count", part.size());
    if (part.empty()) continue;
    ++levels;
    const double sum = blaschke_sum(part);
    if (!(sum > previous_sum)) increasing = false;
    previous_sum = sum;
    r.set("blaschke_sum", sum).set("density_proxy", detail::density_proxy_at_origin(part, 1.0 - eps));
    if (part.size() >= 2 && part.size() <= kPairLimit) r.set("uniform_separation", uniform_separation_constant(part));
    if (part.size() <= kDenseLimit) {
      try {
        const CoefficientBundle b = build_coefficient(part, detail::build_options(cfg));
        r.set("interp_residual", b.diagnostics.interp_residual).set("h2_norm_grid", b.diagnostics.h2_norm_grid);
      } catch (const Error& e) {
        r.set("build_error", std::string(e.what()));
      }
    } else {
      r.set("build_error", "skipped: above the dense builder limit");
    }
  }
  rep.add("cli_report", "trend").set("levels", levels).set("sums_strictly_increasing", increasing);
  return rep;
}

inline Report cmd_normal(const RunConfig& cfg) {
  Report rep = detail::start_report(cfg);
  const PointSequence seq = load_sequence(cfg);
  if (seq.empty()) throw ConfigError("the sequence source produced no points");
  detail::guard_uniform_separation(seq, cfg, rep);
  const CoefficientBundle bundle = build_coefficient(seq, detail::build_options(cfg));
  detail::add_bundle_records(rep, bundle);

  const DiscPoint base(0.0, 0.0);
  const AnalyticFunction g = ode_second_solution(bundle.A, bundle.f, base, cfg.tol).as_function("g");
  const DiscGrid grid = make_grid(cfg.rmax, cfg.grid_radial, cfg.grid_angular);
  const NormalityReport nr = normality_diagnostic(bundle.f, g, grid, base, &bundle.zeros);
  auto& n = rep.add("oscillation", "normality");
  n.set("sup_sampled", nr.sup_sampled).set("grid_points", grid.size()).set("grid_max_modulus", grid.max_modulus());
  if (nr.argmax) detail::add_point(n, "argmax", nr.argmax->value());
  double previous = 0.0;
  for (std::size_t i = 0; i < nr.at_zeros.size(); ++i) {
    const auto& s = nr.at_zeros[i];
    const cplx zn = s.z.value();
    const double closed = (1.0 - std::norm(zn)) * std::norm(bundle.f.jet(zn, 1).d1);
    auto& r = rep.add("oscillation", "zero_value");
    r.set("index", i);
    detail::add_point(r, "z", zn);
    r.set("value", s.value).set("closed_form", closed);
    if (i > 0 && previous > 0.0) r.set("ratio_to_previous", s.value / previous);
    previous = s.value;
  }

  // S_w = 2A at seeded random points away from the zeros.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double outer = std::min(0.9, cfg.rmax);
  double worst = 0.0;
  int used = 0;
  for (int attempt = 0; used < 20 && attempt < 2000; ++attempt) {
    const cplx z = std::polar(outer * std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
    bool near = false;
    for (const auto& zn : bundle.zeros) near = near || pseudo_distance(zn.value(), z) < 0.1;
    if (near) continue;
    ++used;
    const cplx two_a = 2.0 * bundle.A(z);
    worst = std::max(worst, std::abs(ratio_schwarzian(bundle.f, z) - two_a) / std::max(1.0, std::abs(two_a)));
  }
  rep.add("oscillation", "schwarzian_identity").set("points", used).set("max_rel_error", worst);
  return rep;
}

// ---------------------------------------------------------------------------

inline Report run_report(const RunConfig& cfg, BuildArtifacts* artifacts = nullptr) {
  cfg.validate();
  switch (cfg.command) {
    case Command::sequence: return cmd_sequence(cfg);
    case Command::build: return cmd_build(cfg, artifacts);
    case Command::corollary1: return cmd_corollary1(cfg);
    case Command::normal: return cmd_normal(cfg);
  }
  throw ConfigError("unknown command");
}

inline void write_report(std::ostream& out, const Report& rep, Format format) {
  if (format == Format::json) {
    write_report_json(out, rep);
  } else {
    write_report_csv(out, rep);
  }
}

/// Runs a command and emits its report: to stdout, or into --out as
/// report.{csv,json} (plus bundle.json and radial_trace.csv for build).
/// Returns 0 on success, 2 on refusal or invalid input, 1 on computation errors.
inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    BuildArtifacts artifacts;
    const Report rep = run_report(cfg, &artifacts);
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
    if (cfg.out_dir.empty()) {
      write_report(out, rep, cfg.format);
    } else {
      namespace fs = std::filesystem;
      fs::create_directories(cfg.out_dir);
      const fs::path dir(cfg.out_dir);
      std::ofstream rf(dir / (cfg.format == Format::json ? "report.json" : "report.csv"), std::ios::binary);
      write_report(rf, rep, cfg.format);
      if (artifacts.bundle) {
        std::ofstream mf(dir / "bundle.json", std::ios::binary);
        mf << artifacts.manifest.dump(2) << '\n';
      }
      if (artifacts.radial_trace) {
        std::ofstream tf(dir / "radial_trace.csv", std::ios::binary);
        write_trace_csv(tf, *artifacts.radial_trace);
      }
      if (!rf) throw Error("cannot write report into " + cfg.out_dir);
    }
    return rep.failed ? 1 : 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const RefusalError& e) {
    err << "refused: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "computation error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace zerodisc
