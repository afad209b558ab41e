#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zerodisc/zerodisc.hpp"

namespace {

struct Flags {
  std::string sequence;
  std::string lattice;
  std::vector<double> p;
  double rmax = 0.99;
  int grid_radial = 8;
  int grid_angular = 64;
  double tol = zerodisc::kDefaultOdeTolerance;
  std::string out;
  std::string format = "csv";
  unsigned long long seed = 1;
  bool force = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  auto* seq = cmd->add_option("--sequence", f.sequence, "sequence JSON file (a bundle manifest also works)");
  auto* lat = cmd->add_option("--lattice", f.lattice, "a,b[,jmin,jmax,kmin,kmax]; a and b accept exp(x)");
  seq->excludes(lat);
  cmd->add_option("--p", f.p, "Carleson exponent in (0,1], repeatable");
  cmd->add_option("--rmax", f.rmax, "outer radius for density sweeps, truncations and grids");
  cmd->add_option("--grid-radial", f.grid_radial, "radial grid levels");
  cmd->add_option("--grid-angular", f.grid_angular, "angular grid points per level");
  cmd->add_option("--tol", f.tol, "ODE local error tolerance");
  cmd->add_option("--out", f.out, "output directory (stdout when omitted)");
  cmd->add_option("--format", f.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "seed for random test points");
  cmd->add_flag("--force", f.force, "proceed past hypothesis guards");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero sequences of f'' + A f = 0 in the unit disc"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, zerodisc::Command> commands[] = {
      {"sequence", zerodisc::Command::sequence},
      {"build", zerodisc::Command::build},
      {"corollary1", zerodisc::Command::corollary1},
      {"normal", zerodisc::Command::normal},
  };
  const char* help[] = {
      "separation, Blaschke sum, densities and boundary log-distance of a sequence",
      "build a coefficient with the given zeros, verify it and measure it",
      "nested truncations of a lattice with density below one",
      "second solution, normality diagnostic and Schwarzian identity",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < 4; ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, help[i]));
    add_flags(subs.back(), flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  zerodisc::RunConfig cfg;
  for (std::size_t i = 0; i < 4; ++i) {
    if (subs[i]->parsed()) cfg.command = commands[i].second;
  }
  try {
    if (!flags.sequence.empty()) cfg.sequence_file = flags.sequence;
    if (!flags.lattice.empty()) cfg.lattice = zerodisc::parse_lattice(flags.lattice);
  } catch (const zerodisc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  cfg.p_values = flags.p;
  cfg.rmax = flags.rmax;
  cfg.grid_radial = flags.grid_radial;
  cfg.grid_angular = flags.grid_angular;
  cfg.tol = flags.tol;
  cfg.out_dir = flags.out;
  cfg.format = flags.format == "json" ? zerodisc::Format::json : zerodisc::Format::csv;
  cfg.seed = flags.seed;
  cfg.force = flags.force;
  return zerodisc::run_command(cfg, std::cout, std::cerr);
}
