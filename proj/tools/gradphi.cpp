// gradphi: command-line front end for the library.
//
// Every subcommand reads an optional JSON config, applies `--set key=value`
// overrides and the shorthand flags, and writes its artifacts to
// $GRADPHI_OUTPUT_ROOT (or config.output_dir) / <command>-<config hash>.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradphi/config.hpp"
#include "gradphi/csv.hpp"
#include "gradphi/dynamics.hpp"
#include "gradphi/errors.hpp"
#include "gradphi/gibbs.hpp"
#include "gradphi/hydro.hpp"
#include "gradphi/parallel.hpp"
#include "gradphi/pde.hpp"
#include "gradphi/potential.hpp"
#include "gradphi/surface.hpp"

namespace fs = std::filesystem;
using namespace gradphi;

namespace {

struct Flags {
  std::string config;
  std::vector<std::string> sets;
  std::string pot;
  std::string u;
  int side = 0;
  std::optional<std::uint64_t> seed;
  bool serial = false;
  bool table = false;
};

/// Failed numerical check; reported like an error but after artifacts are written.
class CheckFailed : public Error {
 public:
  explicit CheckFailed(const std::string& what) : Error("CheckFailed", what) {}
};

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + text + "' as a comma-separated vector");
    }
  }
  if (out.empty()) throw ConfigError("empty vector '" + text + "'");
  return out;
}

RunConfig build_config(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_override(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!f.pot.empty()) c.potential.kind = f.pot;
  if (!f.u.empty()) {
    c.lattice.tilt = parse_vector(f.u);
    c.lattice.dim = static_cast<int>(c.lattice.tilt.size());
  }
  if (f.side > 0) c.lattice.side = f.side;
  if (f.seed) c.seed = *f.seed;
  if (f.serial) c.serial = true;
  return c;
}

std::vector<double> tilt_of(const RunConfig& c) {
  if (c.lattice.tilt.empty()) return std::vector<double>(c.lattice.dim, 0.0);
  if (static_cast<int>(c.lattice.tilt.size()) != c.lattice.dim) {
    throw ConfigError("lattice.tilt needs lattice.dim = " + std::to_string(c.lattice.dim) +
                      " components");
  }
  return c.lattice.tilt;
}

/// Vector cells in CSV files use ';' so they stay a single column.
std::string join(const std::vector<double>& v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + format_double(v[i]);
  return s;
}

/// Per-run output directory and artifact headers.
class Run {
 public:
  Run(std::string command, RunConfig config)
      : command_(std::move(command)), config_(std::move(config)), hash_(config_hash(config_)) {
    const char* root = std::getenv("GRADPHI_OUTPUT_ROOT");
    dir_ = fs::path(root && *root ? root : config_.output_dir) / (command_ + "-" + hash_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "config.json") << dump_config(config_) << '\n';
    if (config_.serial) {
      set_default_workers(1);
    } else if (config_.threads > 0) {
      set_default_workers(config_.threads);
    }
    std::cout << "command=" << command_ << "\nconfig_hash=" << hash_ << "\nseed=" << config_.seed
              << "\noutput=" << dir_.string() << '\n';
  }

  const RunConfig& config() const noexcept { return config_; }
  const std::string& hash() const noexcept { return hash_; }
  std::uint64_t seed() const noexcept { return config_.seed; }
  unsigned workers() const noexcept { return config_.serial ? 1 : config_.threads; }

  ArtifactHeader header(const std::string& kind) const {
    return {kind, hash_, config_.seed, {{"command", command_}, {"potential", config_.potential.kind}}};
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream out(dir_ / name);
    if (!out) throw InvalidArgument("cannot write " + (dir_ / name).string());
    return out;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string dir() const { return dir_.string(); }

 private:
  std::string command_;
  RunConfig config_;
  std::string hash_;
  fs::path dir_;
};

template <class T>
void print(const std::string& key, const T& value) {
  std::cout << key << '=' << value << '\n';
}

void print(const std::string& key, double value) { std::cout << key << '=' << format_double(value) << '\n'; }

// ---------------------------------------------------------------- subcommands

int certify_potential(const Run& run) {
  const Potential p = make_potential(run.config().potential);
  const CertificationReport r = certify(p);
  auto out = run.open("certify.csv");
  CsvWriter w(out, run.header("certify"), {"quantity", "value"});
  const std::pair<const char*, double> rows[] = {
      {"c_minus", r.declared.c_minus},         {"c_plus", r.declared.c_plus},
      {"c_g", r.declared.c_g},                 {"min_v0_second", r.min_v0_second},
      {"max_v0_second", r.max_v0_second},      {"max_g_bound", r.max_g_bound},
      {"max_symmetry_defect", r.max_symmetry_defect}, {"max_split_defect", r.max_split_defect},
  };
  print("potential", p.name());
  for (const auto& [k, v] : rows) {
    w.cell(k).cell(v).end_row();
    print(k, v);
  }
  w.cell("passed").cell(r.passed ? 1 : 0).end_row();
  print("passed", r.passed ? "true" : "false");
  for (const auto& f : r.failures) print("failure", f);
  if (!r.passed) throw CheckFailed("potential failed certification");
  return 0;
}

int sample_gibbs(const Run& run) {
  const RunConfig& c = run.config();
  const auto lattice = std::make_shared<const TorusLattice>(c.lattice.side, c.lattice.dim);
  GibbsSampler s(lattice, make_potential(c.potential), tilt_of(c), make_sampler(c.sampler),
                 run.seed());
  auto out = run.open("estimates.csv");
  CsvWriter w(out, run.header("gibbs-estimates"),
              {"observable", "axis", "estimate", "std_error", "ess", "samples"});
  auto row = [&](const char* name, int axis, const EstimatorReport& r) {
    w.cell(name).cell(axis).cell(r.estimate).cell(r.std_error).cell(r.ess).cell(r.samples).end_row();
    std::cout << name << '[' << axis << "]=" << format_double(r.estimate) << " se="
              << format_double(r.std_error) << '\n';
  };
  for (int i = 0; i < c.lattice.dim; ++i) row("vprime_mean", i, estimate_vprime_mean(s, i));
  const auto var = estimate_bond_variance(s);
  for (int i = 0; i < c.lattice.dim; ++i) row("bond_variance", i, var[i]);
  row("identity2", -1, estimate_identity2(s));
  print("step", s.step_size());
  print("acceptance", s.acceptance_rate());
  return 0;
}

SurfaceSettings surface_settings(const RunConfig& c) {
  SurfaceSettings s;
  s.side = c.lattice.side;
  s.sampler = make_sampler(c.sampler);
  s.nodes = c.surface.nodes;
  s.quadrature_check = c.surface.quadrature_check;
  return s;
}

int surface_tension(const Run& run, bool table) {
  const RunConfig& c = run.config();
  const Potential p = make_potential(c.potential);
  const SurfaceSettings ss = surface_settings(c);
  if (table) {
    const TableGrid grid{c.lattice.dim, c.surface.grid_lower, c.surface.grid_upper, c.surface.grid_step};
    SurfaceTensionTable t = build_table(p, c.lattice.side, grid, ss.sampler, run.seed());
    t.provenance().config_hash = run.hash();
    auto out = run.open("sigma_table.csv");
    write_table_csv(out, t);
    print("table", run.path("sigma_table.csv"));
    print("nodes", t.num_nodes());
    print("lipschitz", t.lipschitz_estimate());
    const ConvexityReport cr = t.convexity();
    print("c1", cr.c1);
    print("c2", cr.c2);
    return 0;
  }
  const std::vector<double> u = tilt_of(c);
  const SigmaEstimate s = sigma(p, u, ss, run.seed());
  const VectorEstimate g = grad_sigma(p, c.lattice.side, u, ss.sampler, run.seed() + 1);
  auto out = run.open("sigma.csv");
  std::vector<std::string> cols{"u", "sigma", "error", "mc_error", "quadrature_error"};
  for (int i = 0; i < c.lattice.dim; ++i) {
    cols.push_back("dsigma" + std::to_string(i + 1));
    cols.push_back("dsigma" + std::to_string(i + 1) + "_err");
  }
  CsvWriter w(out, run.header("sigma"), cols);
  w.cell(join(u, ";")).cell(s.value).cell(s.error).cell(s.mc_error).cell(s.quadrature_error);
  for (int i = 0; i < c.lattice.dim; ++i) w.cell(g.value[i]).cell(g.error[i]);
  w.end_row();
  std::cout << "sigma=" << format_double(s.value) << " +- " << format_double(s.error) << '\n';
  print("u", join(u));
  print("grad_sigma", join(g.value));
  print("grad_sigma_err", join(g.error));
  return 0;
}

int convexity(const Run& run) {
  const RunConfig& c = run.config();
  const auto pairs = random_pairs(c.lattice.dim, c.surface.pair_lower, c.surface.pair_upper,
                                  static_cast<std::size_t>(c.surface.pairs), run.seed());
  const GradientOracle oracle = direct_oracle(make_potential(c.potential), c.lattice.side,
                                              make_sampler(c.sampler), run.seed() + 1);
  const ConvexityReport r = convexity_probe(pairs, oracle);
  auto out = run.open("convexity.csv");
  CsvWriter w(out, run.header("convexity"), {"pair", "u", "v", "quotient", "error"});
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    w.cell(k).cell(join(pairs[k].u, ";")).cell(join(pairs[k].v, ";")).cell(r.quotients[k]).cell(r.errors[k]);
    w.end_row();
  }
  print("c1", r.c1);
  print("c1_error", r.c1_error);
  print("c2", r.c2);
  print("c2_error", r.c2_error);
  print("non_positive", r.non_positive);
  print("strictly_convex", r.strictly_convex() ? "true" : "false");
  return 0;
}

int decompose(const Run& run) {
  const RunConfig& c = run.config();
  const Potential p = make_potential(c.potential);
  const FluxDecomposition fd =
      decompose_flux(p, c.lattice.side, tilt_of(c), make_sampler(c.sampler), run.seed());
  auto out = run.open("decomposition.csv");
  CsvWriter w(out, run.header("flux-decomposition"),
              {"axis", "a_diag", "a_diag_se", "a_vec", "a_vec_se", "flux", "flux_se",
               "reconstructed", "reconstructed_se"});
  for (std::size_t i = 0; i < fd.a_diag.size(); ++i) {
    w.cell(i).cell(fd.a_diag[i].estimate).cell(fd.a_diag[i].std_error);
    w.cell(fd.a_vec[i].estimate).cell(fd.a_vec[i].std_error);
    w.cell(fd.flux[i].estimate).cell(fd.flux[i].std_error);
    w.cell(fd.reconstructed[i].estimate).cell(fd.reconstructed[i].std_error);
    w.end_row();
    std::cout << "A[" << i << "]=" << format_double(fd.a_diag[i].estimate) << " a[" << i
              << "]=" << format_double(fd.a_vec[i].estimate) << " flux[" << i
              << "]=" << format_double(fd.flux[i].estimate) << '\n';
  }
  print("min_sample_diag", fd.min_sample_diag);
  print("max_sample_diag", fd.max_sample_diag);
  print("c_minus", p.constants().c_minus);
  print("c_plus", p.constants().c_plus);
  return 0;
}

int simulate(const Run& run) {
  const RunConfig& c = run.config();
  const int dim = c.lattice.dim;
  const DomainSpec spec = make_domain(c.domain, dim);
  const auto domain = std::make_shared<const DiscretizedDomain>(spec, c.lattice.side);
  const ScalarFunction f = make_function(c.pde.boundary, dim);
  DirichletSystem sys(domain, make_potential(c.potential), f, make_function(c.pde.initial, dim),
                      run.seed());
  const double dt = c.experiment.dt > 0.0 ? c.experiment.dt : sys.max_step();
  const double n2 = static_cast<double>(c.lattice.side) * c.lattice.side;

  auto traj_out = run.open("trajectory.csv");
  CsvWriter traj(traj_out, run.header("trajectory"), {"t", "h_l2_squared", "dirichlet_density"});
  auto snap_out = run.open("snapshots.csv");
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < dim; ++i) cols.push_back("theta" + std::to_string(i + 1));
  cols.push_back("h");
  CsvWriter snap(snap_out, run.header("macro-height"), cols);

  for (double t : c.experiment.times) {
    sys.advance_to(n2 * t, dt);
    const MacroscopicField m = macro_height(sys, t);
    const double norm = l2_norm_squared(m.cells, spec);
    traj.cell(t).cell(norm).cell(sys.dirichlet_energy_density()).end_row();
    for (std::size_t k = 0; k < m.cells.size(); ++k) {
      const Point x = m.cells.center(k);
      if (!spec.contains(x)) continue;
      snap.cell(t);
      for (int i = 0; i < dim; ++i) snap.cell(x[i]);
      snap.cell(m.cells.values()[k]).end_row();
    }
    std::cout << "t=" << format_double(t) << " h_l2_squared=" << format_double(norm) << '\n';
  }
  print("sites", domain->num_sites());
  print("interior", domain->interior().size());
  print("dt", dt);
  return 0;
}

std::unique_ptr<FluxProvider> make_flux(const RunConfig& c) {
  if (c.pde.flux == "closed-form") {
    if (c.potential.kind != "gaussian") {
      throw ConfigError("closed-form flux is only known for the gaussian potential; set "
                        "pde.flux=table and pde.table=<sigma_table.csv>");
    }
    return std::make_unique<LinearFlux>(1.0);
  }
  if (c.pde.flux == "table") {
    std::ifstream in(c.pde.table);
    if (!in) throw ConfigError("cannot open surface tension table '" + c.pde.table + "'");
    return std::make_unique<TableFlux>(std::make_shared<const SurfaceTensionTable>(read_table_csv(in)));
  }
  throw ConfigError("unknown pde.flux '" + c.pde.flux + "' (expected closed-form or table)");
}

int pde_solve(const Run& run) {
  const RunConfig& c = run.config();
  const int dim = c.lattice.dim;
  const PdeGrid grid(make_domain(c.domain, dim), c.pde.cells_per_unit,
                     make_function(c.pde.boundary, dim));
  const auto flux = make_flux(c);
  std::vector<double> snaps;
  for (double t : c.experiment.times) {
    if (t < c.pde.horizon) snaps.push_back(t);
  }
  const PdeSolution sol = solve(grid, make_function(c.pde.initial, dim), *flux, c.pde.horizon,
                                c.pde.dt, snaps);
  auto out = run.open("pde.csv");
  std::vector<std::string> cols{"t", "cell"};
  for (int i = 0; i < dim; ++i) cols.push_back("theta" + std::to_string(i + 1));
  cols.push_back("h");
  CsvWriter w(out, run.header("pde"), cols);
  auto dump = [&](double t, const CellField& h) {
    for (std::size_t cell : grid.interior_cells()) {
      const Point x = h.center(cell);
      w.cell(t).cell(cell);
      for (int i = 0; i < dim; ++i) w.cell(x[i]);
      w.cell(h.values()[cell]).end_row();
    }
  };
  for (const auto& s : sol.snapshots) dump(s.time, s.h);
  dump(sol.time, sol.h);
  print("flux", sol.flux_source);
  print("steps", sol.steps);
  print("dt", sol.dt);
  print("bound", sol.bound);
  print("max_abs", sol.max_abs);
  print("linf_violations", sol.linf_violations);
  print("h_l2_squared", l2_norm_squared(sol.h, grid.domain()));
  return 0;
}

int hydro(const Run& run) {
  const RunConfig& c = run.config();
  const int dim = c.lattice.dim;
  HydroExperiment e;
  e.potential = make_potential(c.potential);
  e.domain = make_domain(c.domain, dim);
  e.boundary = make_function(c.pde.boundary, dim);
  e.initial = make_function(c.pde.initial, dim);
  e.scales = c.experiment.scales;
  e.times = c.experiment.times;
  e.realizations = c.experiment.realizations;
  e.flux = make_flux(c);
  e.seed = run.seed();
  e.dt = c.experiment.dt;
  e.pde_cells_per_unit = c.experiment.pde_cells_per_unit;
  e.workers = run.workers();
  const ConvergenceTable t = gradphi::run(e);
  const std::string tag = "config_hash=" + run.hash() + " seed=" + std::to_string(run.seed());
  const ReportFiles files = report(t, run.dir(), "hydro", {"gradphi hydro", tag});
  for (const auto& r : t.rows) {
    std::cout << "N=" << r.scale << " t=" << format_double(r.time) << " gap="
              << format_double(r.gap) << " se=" << format_double(r.error) << '\n';
  }
  for (double time : e.times) {
    std::cout << "decreasing[t=" << format_double(time) << "]="
              << (t.decreasing(time) ? "true" : "false") << '\n';
  }
  print("plot", files.script);
  return 0;
}

int dlr(const Run& run) {
  const RunConfig& c = run.config();
  DlrSettings s;
  s.side = c.lattice.side;
  s.dim = c.lattice.dim;
  s.tilt = tilt_of(c);
  s.box = c.dlr.box;
  s.samples = c.dlr.samples;
  s.thinning = c.dlr.thinning;
  s.bins = c.dlr.bins;
  s.exterior = make_sampler(c.sampler);
  const DlrReport r = dlr_check(make_potential(c.potential), s, run.seed(), c.dlr.tolerance);
  auto out = run.open("dlr.csv");
  CsvWriter w(out, run.header("dlr-histogram"), {"bin_lower", "bin_upper", "chain", "reference"});
  for (std::size_t k = 0; k < r.histogram.size(); ++k) {
    w.cell(r.bin_edges[k]).cell(r.bin_edges[k + 1]).cell(r.histogram[k]).cell(r.reference_density[k]);
    w.end_row();
  }
  print("reference", r.reference);
  print("sites", r.sites);
  print("samples", r.samples);
  print("sup_distance", r.sup_distance);
  print("mean_discrepancy", r.mean_discrepancy);
  print("acceptance", r.acceptance);
  print("passed", r.passed ? "true" : "false");
  if (!r.passed) throw CheckFailed("conditional law differs from the finite-volume reference");
  return 0;
}

void error_line(const std::string& kind, std::string message) {
  for (char& ch : message) {
    if (ch == '\n') ch = ' ';
  }
  std::cerr << "error kind=" << kind << " message=" << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradphi: gradient interface models, surface tension and hydrodynamic limits"};
  app.require_subcommand(1);
  Flags flags;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"certify-potential", "check the convex split V = V0 + g of a potential"},
      {"sample-gibbs", "sample the tilted periodic Gibbs measure and report estimates"},
      {"surface-tension", "estimate sigma(u) and grad sigma(u), or tabulate them with --table"},
      {"convexity-probe", "monotonicity quotients of grad sigma on random pairs"},
      {"decompose-flux", "split grad sigma(u) into A(u) u + a(u)"},
      {"simulate", "run the Dirichlet Langevin dynamics and record h^N"},
      {"pde-solve", "solve the macroscopic equation"},
      {"hydro", "compare h^N with the PDE solution across N"},
      {"dlr-check", "compare a conditional Gibbs law with the finite-volume formula"},
  };
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--set", flags.sets, "override a config leaf, e.g. lattice.side=8")
        ->take_all();
    sub->add_option("--pot", flags.pot, "potential kind: gaussian, cosine, split-cosine");
    sub->add_option("--u", flags.u, "tilt, comma separated (sets lattice.dim)");
    sub->add_option("--N", flags.side, "lattice side or scale N");
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_flag("--serial", flags.serial, "single thread, for bit-reproducible output");
    if (std::string(cmd.name) == "surface-tension") {
      sub->add_flag("--table", flags.table, "tabulate sigma on the surface.grid_* box");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    error_line("UsageError", e.what());
    return 64;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const Run r(name, build_config(flags));
    if (name == "certify-potential") return certify_potential(r);
    if (name == "sample-gibbs") return sample_gibbs(r);
    if (name == "surface-tension") return surface_tension(r, flags.table);
    if (name == "convexity-probe") return convexity(r);
    if (name == "decompose-flux") return decompose(r);
    if (name == "simulate") return simulate(r);
    if (name == "pde-solve") return pde_solve(r);
    if (name == "hydro") return hydro(r);
    if (name == "dlr-check") return dlr(r);
  } catch (const CheckFailed& e) {
    error_line(e.kind(), e.what());
    return 1;
  } catch (const Error& e) {
    error_line(e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    error_line("Internal", e.what());
    return 3;
  }
  return 0;
}
