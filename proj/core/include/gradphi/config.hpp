#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradphi/fields.hpp"
#include "gradphi/geometry.hpp"
#include "gradphi/gibbs.hpp"
#include "gradphi/potential.hpp"

namespace gradphi {

struct PotentialConfig {
  std::string kind = "gaussian";   ///< gaussian | cosine | split-cosine
  double amplitude = 0.2;          ///< a in a cos(kappa eta)
  double frequency = 1.0;          ///< kappa
  double threshold = 3.0;          ///< M for split-cosine

  bool operator==(const PotentialConfig&) const = default;
};

struct LatticeConfig {
  int dim = 2;
  int side = 16;
  std::vector<double> tilt;        ///< empty = zero tilt

  bool operator==(const LatticeConfig&) const = default;
};

struct FunctionConfig {
  std::string kind = "zero";       ///< zero | constant | linear | bump
  double value = 0.0;              ///< constant value, linear offset
  std::vector<double> slope;       ///< linear
  std::vector<double> center;      ///< bump
  double radius = 0.25;            ///< bump
  double amplitude = 1.0;          ///< bump

  bool operator==(const FunctionConfig&) const = default;
};

struct DomainConfig {
  std::string kind = "box";        ///< box | ball
  std::vector<double> lower{-0.5};
  std::vector<double> upper{0.5};
  std::vector<double> center;
  double radius = 0.5;

  bool operator==(const DomainConfig&) const = default;
};

struct SamplerConfig {
  std::string kind = "mala";
  double step = 0.0;
  std::uint64_t burn_in = 0;
  std::uint64_t thinning = 1;
  std::uint64_t sweeps = 20000;
  int batches = 32;

  bool operator==(const SamplerConfig&) const = default;
};

struct SurfaceConfig {
  int nodes = 8;
  bool quadrature_check = true;
  double grid_lower = -2.0;
  double grid_upper = 2.0;
  double grid_step = 0.25;
  int pairs = 20;
  double pair_lower = -1.5;
  double pair_upper = 1.5;

  bool operator==(const SurfaceConfig&) const = default;
};

struct PdeConfig {
  int cells_per_unit = 64;
  double horizon = 0.05;
  double dt = 0.0;
  std::string flux = "closed-form";  ///< closed-form | table
  std::string table;                 ///< table CSV path when flux = table
  FunctionConfig initial{"bump", 0.0, {}, {0.0}, 0.25, 1.0};
  FunctionConfig boundary;

  bool operator==(const PdeConfig&) const = default;
};

struct ExperimentConfig {
  std::vector<int> scales{8, 16, 32};
  std::vector<double> times{0.05};
  int realizations = 32;
  double dt = 0.0;
  int pde_cells_per_unit = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

struct DlrConfig {
  int box = 1;
  std::uint64_t samples = 100000;
  std::uint64_t thinning = 10;
  int bins = 40;
  double tolerance = 0.05;

  bool operator==(const DlrConfig&) const = default;
};

/// Everything a subcommand needs, one section per module.
struct RunConfig {
  PotentialConfig potential;
  LatticeConfig lattice;
  DomainConfig domain;
  SamplerConfig sampler;
  SurfaceConfig surface;
  PdeConfig pde;
  ExperimentConfig experiment;
  DlrConfig dlr;
  std::uint64_t seed = 1;
  std::string output_dir = "runs";
  unsigned threads = 0;            ///< 0 = all cores
  bool serial = false;

  bool operator==(const RunConfig&) const = default;
};

/// Strict JSON parse: unknown keys and wrong types throw ConfigError with the
/// offending path. Missing keys keep their defaults.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
/// Canonical JSON (sorted keys, every field present).
std::string dump_config(const RunConfig& config, int indent = 2);
/// FNV-1a 64 of the compact canonical dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Set one leaf, e.g. ("lattice.side", "8") or ("lattice.tilt", "[1,0]").
/// The value is read as JSON when it parses, otherwise as a string.
void apply_override(RunConfig& config, const std::string& path, const std::string& value);

Potential make_potential(const PotentialConfig& spec);
DomainSpec make_domain(const DomainConfig& spec, int dim);
ScalarFunction make_function(const FunctionConfig& spec, int dim);
SamplerSettings make_sampler(const SamplerConfig& spec);

}  // namespace gradphi
