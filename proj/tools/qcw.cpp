#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcw/pipeline.hpp"

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const std::vector<Flag> kCommon = {
    {"--n", "n", "dimension (2 or 3)"},
    {"--out", "out", "output directory"},
};
const std::vector<Flag> kDomain = {
    {"--domain", "domain", "catalog domain name"},
    {"--box", "box", "box domain lo...,hi... (overrides --domain)"},
    {"--shift", "shift", "translation applied to the domain"},
    {"--max-level", "max_level", "finest dyadic level"},
    {"--subdivisions", "subdivisions", "samples per cell edge"},
    {"--probe-tolerance", "probe_tolerance", "allowed uncovered probe fraction"},
    {"--rough-C", "rough_C", "comparability constant for the family check"},
    {"--rough-K", "rough_K", "interior dilatation bound for the family check"},
};
const std::vector<Flag> kMap = {
    {"--map", "map", "catalog map name"},
    {"--map-params", "map_params", "map parameters a=2.0,..."},
    {"--Cn", "Cn", "sphere constant C(n)"},
};
const std::vector<Flag> kSolver = {
    {"--condenser", "condenser", "ring | overlap | continua"},
    {"--r", "ring_r", "inner radius"},
    {"--R", "ring_R", "outer radius"},
    {"--p", "p", "capacity exponent (default n)"},
    {"--h", "h", "grid size"},
    {"--tol", "tol", "relative energy decrease tolerance"},
    {"--max-iter", "max_iter", "iteration cap"},
    {"--Cn", "Cn", "sphere constant C(n)"},
};
const std::vector<Flag> kBounds = {
    {"--Q", "Q", "map dilatation"},
    {"--Cr", "Cr", "embedding coefficient"},
    {"--Cn", "Cn", "sphere constant C(n)"},
};

struct Command {
  CLI::App* app = nullptr;
  std::string config;
  std::map<std::string, std::string> values;
};

void add_flags(Command& cmd, const std::vector<Flag>& flags) {
  for (const Flag& f : flags) {
    if (cmd.app->get_option_no_throw(f.name)) continue;
    cmd.app->add_option(f.name, cmd.values[f.key], f.help);
  }
}

qcw::ExperimentConfig resolve(const Command& cmd, const std::vector<std::vector<Flag>>& groups) {
  qcw::ExperimentConfig cfg;
  if (!cmd.config.empty()) cfg = qcw::load_config(cmd.config);
  for (const auto& group : groups) {
    for (const Flag& f : group) {
      if (cmd.app->count(f.name) > 0) qcw::apply_setting(cfg, f.key, cmd.values.at(f.key));
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whitney families, quasiconformal images and condenser capacities"};
  app.require_subcommand(0, 1);
  bool list_maps_flag = false;
  app.add_flag("--list-maps", list_maps_flag, "print the map catalog");

  const std::vector<std::vector<Flag>> decompose_groups{kCommon, kDomain};
  const std::vector<std::vector<Flag>> verify_groups{kCommon, kDomain, kMap};
  const std::vector<std::vector<Flag>> capacity_groups{kCommon, kSolver};
  const std::vector<std::vector<Flag>> bounds_groups{kCommon, kBounds};

  Command decompose_cmd, verify_cmd, capacity_cmd, bounds_cmd, maps_cmd;
  decompose_cmd.app = app.add_subcommand("decompose", "Whitney decomposition and family metrics");
  verify_cmd.app = app.add_subcommand("verify", "map a Whitney family and check the distortion bounds");
  capacity_cmd.app = app.add_subcommand("capacity", "condenser capacity");
  capacity_cmd.app->set_help_flag("--help", "print this help message and exit");
  bounds_cmd.app = app.add_subcommand("bounds", "evaluate the distortion constants");
  maps_cmd.app = app.add_subcommand("list-maps", "print the map catalog");
  CLI::App* domains_app = app.add_subcommand("list-domains", "print the domain catalog");

  const std::vector<std::pair<Command*, const std::vector<std::vector<Flag>>*>> commands{
      {&decompose_cmd, &decompose_groups}, {&verify_cmd, &verify_groups},
      {&capacity_cmd, &capacity_groups},   {&bounds_cmd, &bounds_groups}};
  for (auto& [cmd, groups] : commands) {
    cmd->app->add_option("--config", cmd->config, "key=value config file")->check(CLI::ExistingFile);
    for (const auto& g : *groups) add_flags(*cmd, g);
  }
  int list_n = 2;
  maps_cmd.app->add_option("--n", list_n, "dimension")->check(CLI::IsMember({2, 3}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qcw::exit_code::usage;
  }

  try {
    if (list_maps_flag || *maps_cmd.app) return qcw::run_list_maps(list_n, std::cout);
    if (*domains_app) return qcw::run_list_domains(std::cout);
    if (*decompose_cmd.app) return qcw::run_decompose(resolve(decompose_cmd, decompose_groups), std::cerr);
    if (*verify_cmd.app) return qcw::run_verify(resolve(verify_cmd, verify_groups), std::cerr);
    if (*capacity_cmd.app) return qcw::run_capacity(resolve(capacity_cmd, capacity_groups), std::cerr);
    if (*bounds_cmd.app) return qcw::run_bounds(resolve(bounds_cmd, bounds_groups), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qcw::exit_code::usage;
  }
  std::cerr << app.help();
  return qcw::exit_code::usage;
}
