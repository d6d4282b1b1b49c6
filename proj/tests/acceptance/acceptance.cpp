// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset, e.g. `gradphi_acceptance 3 6`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradphi/csv.hpp"
#include "gradphi/dynamics.hpp"
#include "gradphi/fields.hpp"
#include "gradphi/gibbs.hpp"
#include "gradphi/hydro.hpp"
#include "gradphi/parallel.hpp"
#include "gradphi/pde.hpp"
#include "gradphi/rng.hpp"
#include "gradphi/stats.hpp"
#include "gradphi/surface.hpp"

using namespace gradphi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 = no runtime limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Potential kCosine02 = Potential::cosine_perturbed(0.2, 1.0);

Outcome gaussian_sigma() {
  SurfaceSettings s;  // N = 16 and sampler defaults
  const SigmaEstimate est = sigma(Potential::gaussian(), {1.0, 0.0}, s, 101);
  const double tol = std::max(3.0 * est.error, 1e-12);
  const bool pass = std::abs(est.value - 0.5) <= tol && est.error <= 0.02;
  return {pass, fmt("sigma=%.6f err=%.2e target=0.5", est.value, est.error)};
}

Outcome identity1_cross_check() {
  SurfaceSettings s;
  const double h = 0.1;
  const VectorEstimate g = grad_sigma(kCosine02, 16, {0.5, 0.0}, s.sampler, 201);
  const SigmaEstimate plus = sigma(kCosine02, {0.5 + h, 0.0}, s, 202);
  const SigmaEstimate minus = sigma(kCosine02, {0.5 - h, 0.0}, s, 203);
  const double fd = (plus.value - minus.value) / (2.0 * h);
  const double fd_err = combined_error(plus.error, minus.error) / (2.0 * h);
  const double se = combined_error(g.error[0], fd_err);
  const double diff = std::abs(g.value[0] - fd);
  return {diff <= 3.0 * se, fmt("grad=%.5f+-%.5f fd=%.5f+-%.5f |diff|/se=%.2f", g.value[0],
                                g.error[0], fd, fd_err, diff / se)};
}

Outcome identity2_gaussian() {
  auto lattice = std::make_shared<const TorusLattice>(16, 2);
  GibbsSampler sampler(lattice, Potential::gaussian(), {1.0, 0.0}, SamplerSettings{}, 301);
  const EstimatorReport r = estimate_identity2(sampler);
  const double z = std::abs(r.estimate - 2.0) / r.std_error;
  return {z <= 3.0, fmt("estimate=%.5f se=%.5f |est-2|/se=%.2f (finite-N mean %.5f)", r.estimate,
                        r.std_error, z, 2.0 - 1.0 / 256.0)};
}

Outcome variance_uniformity() {
  const auto tilts = tilt_grid(2, -3.0, 3.0, 1.0);
  const VarianceSweep sw =
      variance_sweep(Potential::cosine_perturbed(0.5, 1.0), 8, 2, tilts, SamplerSettings{}, 401);
  const bool pass = sw.ratio <= 3.0 && !sw.edge_growth;
  return {pass, fmt("tilts=%zu max/min=%.4f edge excess=%.2f SE", tilts.size(), sw.ratio,
                    sw.edge_excess_sigma)};
}

Outcome flux_decomposition() {
  const std::vector<double> u{1.0, 0.0};
  const SamplerSettings s;
  const FluxDecomposition fd = decompose_flux(kCosine02, 16, u, s, 501);
  const VectorEstimate g = grad_sigma(kCosine02, 16, u, s, 502);
  const auto& c = kCosine02.constants();
  const bool bounded =
      fd.min_sample_diag >= c.c_minus - 1e-12 && fd.max_sample_diag <= c.c_plus + 1e-12;
  double norm2 = 0.0, var = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = fd.reconstructed[i].estimate - g.value[i];
    norm2 += d * d;
    var += fd.reconstructed[i].std_error * fd.reconstructed[i].std_error + g.error[i] * g.error[i];
  }
  const double norm = std::sqrt(norm2);
  const double se = std::sqrt(var);
  return {bounded && norm <= 3.0 * se,
          fmt("A11 in [%.6f, %.6f] vs [%.3g, %.3g]; |Au+a-grad|=%.2e se=%.2e", fd.min_sample_diag,
              fd.max_sample_diag, c.c_minus, c.c_plus, norm, se)};
}

Outcome pde_order() {
  const DomainSpec domain = DomainSpec::box(1, {-0.5}, {0.5});
  const ScalarFunction zero = [](const Point&) { return 0.0; };
  const ScalarFunction h0 = bump(1, {0.0}, 0.25);
  const double horizon = 0.05;
  const HeatSeries exact([&](double x) { return h0({x}); }, -0.5, 0.5, 400, -0.25, 0.25);
  const ScalarFunction at_t = [&](const Point& p) { return exact(horizon, p[0]); };
  std::vector<double> err;
  for (int m : {16, 32, 64}) {
    const PdeGrid grid(domain, m, zero);
    const PdeSolution sol = solve(grid, h0, LinearFlux(1.0), horizon);
    err.push_back(std::sqrt(grid_l2_error_squared(grid, sol.h, at_t)));
  }
  const double p1 = std::log2(err[0] / err[1]);
  const double p2 = std::log2(err[1] / err[2]);
  return {std::min(p1, p2) >= 1.8,
          fmt("L2 errors %.3e %.3e %.3e, orders %.3f %.3f", err[0], err[1], err[2], p1, p2)};
}

Outcome hydro_convergence() {
  HydroExperiment exp;
  exp.domain = DomainSpec::box(1, {-0.5}, {0.5});
  exp.boundary = [](const Point&) { return 0.0; };
  exp.initial = bump(1, {0.0}, 0.25);
  exp.scales = {8, 16, 32};
  exp.times = {0.05};
  exp.realizations = 32;
  exp.seed = 701;
  const ConvergenceTable table = run(exp);
  std::string detail;
  for (const auto& r : table.at_time(0.05)) {
    detail += fmt("N=%d gap=%.3e+-%.1e  ", r.scale, r.gap, r.error);
  }
  return {table.decreasing(0.05, 2.0), detail};
}

std::vector<std::vector<EnergyCheckpoint>> energy_runs(std::uint64_t base, int count) {
  const auto domain =
      std::make_shared<const DiscretizedDomain>(DomainSpec::box(1, {-0.5}, {0.5}), 16);
  const ScalarFunction zero = [](const Point&) { return 0.0; };
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(0.01 * k);
  std::vector<std::vector<EnergyCheckpoint>> runs(count);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t r) {
    DirichletSystem sys(domain, Potential::gaussian(), zero, zero, derive_seed(base, r));
    runs[r] = energy_trajectory(sys, times, sys.max_step());
  });
  return runs;
}

Outcome energy_bound() {
  const double c_minus = Potential::gaussian().constants().c_minus;
  const double k = fit_energy_constant(energy_runs(801, 32), c_minus);
  const EnergyTrace trace = energy_diagnostic(energy_runs(802, 32), c_minus, k);
  double worst = -INFINITY;
  for (std::size_t i = 0; i < trace.lhs.size(); ++i) {
    worst = std::max(worst, trace.lhs[i] - trace.rhs[i]);
  }
  return {trace.satisfied && trace.violations == 0 && trace.monotone_energy,
          fmt("K=%.4f (calibration seeds) violations=%zu max(lhs-rhs)=%.4f lhs(0.1)=%.4f", k,
              trace.violations, worst, trace.lhs.back())};
}

Outcome dlr_spot_check() {
  DlrSettings s;
  s.side = 8;
  s.dim = 1;
  s.box = 1;
  s.samples = 100000;
  const DlrReport rep = dlr_check(Potential::cosine_perturbed(2.0, 1.0), s, 901, 0.05);
  return {rep.passed, fmt("sup distance=%.4f (%s) chain mean=%.4f ref=%.4f acceptance=%.3f",
                          rep.sup_distance, rep.reference.c_str(), rep.chain_mean,
                          rep.reference_mean, rep.acceptance)};
}

std::string serial_run_csv(std::uint64_t seed, unsigned workers) {
  HydroExperiment exp;
  exp.domain = DomainSpec::box(1, {-0.5}, {0.5});
  exp.boundary = [](const Point&) { return 0.0; };
  exp.initial = bump(1, {0.0}, 0.25);
  exp.scales = {8, 16};
  exp.times = {0.01, 0.02};
  exp.realizations = 4;
  exp.seed = seed;
  exp.workers = workers;
  const ConvergenceTable table = run(exp);
  std::ostringstream out;
  CsvWriter w(out, {"hydro", "structural", seed, {}}, {"N", "t", "gap", "gap_se"});
  for (const auto& r : table.rows) {
    w.cell(r.scale).cell(r.time).cell(r.gap).cell(r.error);
    w.end_row();
  }

  auto lattice = std::make_shared<const TorusLattice>(6, 2);
  SamplerSettings s;
  s.burn_in = 50;
  GibbsSampler sampler(lattice, kCosine02, {0.3, -0.2}, s, seed);
  sampler.sample(200, [&](const TiltedPeriodicSystem& sys) {
    w.cell(0).cell(sys.time()).cell(mean_vprime(sys, 0)).cell(mean_vprime(sys, 1));
    w.end_row();
  });
  return out.str();
}

Outcome structural() {
  std::vector<std::string> failures;
  const CounterRng rng(1001);

  double round_trip = 0.0, plaquette = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const TorusLattice lat(d == 3 ? 4 : 6, d);
    HeightField phi(lat.num_sites());
    for (std::size_t x = 0; x < phi.size(); ++x) phi[x] = 3.0 * rng.normal(d, x);
    const GradientField eta = gradient(lat, phi);
    for (double p : plaquette_sums(lat, eta)) plaquette = std::max(plaquette, std::abs(p));
    const HeightField back = integrate_gradient(lat, eta, phi[0]);
    const GradientField eta2 = gradient(lat, back);
    for (std::size_t x = 0; x < phi.size(); ++x) {
      round_trip = std::max(round_trip, std::abs(back[x] - phi[x]));
    }
    for (std::size_t b = 0; b < eta.size(); ++b) {
      round_trip = std::max(round_trip, std::abs(eta2[b] - eta[b]));
    }
  }
  if (round_trip > 1e-12) failures.push_back(fmt("round trip %.2e", round_trip));
  if (plaquette > 1e-12) failures.push_back(fmt("plaquette %.2e", plaquette));

  // boundary layer bit-exact after many steps
  const auto domain =
      std::make_shared<const DiscretizedDomain>(DomainSpec::ball(2, {0.0, 0.0}, 0.5), 16);
  const ScalarFunction f = [](const Point& p) { return 0.3 * p[0] - 0.7 * p[1] + 0.1; };
  DirichletSystem sys(domain, kCosine02, f, bump(2, {0.0, 0.0}, 0.25), 1002);
  for (int k = 0; k < 500; ++k) sys.step(sys.max_step());
  std::size_t moved = 0;
  for (std::size_t x : domain->boundary()) {
    if (sys.heights()[x] != sys.boundary_heights()[x]) ++moved;
  }
  if (moved) failures.push_back(fmt("%zu boundary sites changed", moved));

  const std::string a = serial_run_csv(1003, 1);
  const std::string b = serial_run_csv(1003, 1);
  const std::string c = serial_run_csv(1003, 4);
  if (a != b) failures.push_back("serial reruns differ");
  if (a != c) failures.push_back("threaded run differs from serial");

  std::string detail = fmt("round trip %.1e, plaquette %.1e, boundary sites %zu, csv %zu bytes",
                           round_trip, plaquette, domain->boundary().size(), a.size());
  for (const auto& s : failures) detail += "; FAIL " + s;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "gaussian surface tension", 120, gaussian_sigma},
      {2, "grad sigma vs finite difference of sigma", 600, identity1_cross_check},
      {3, "second thermodynamic identity (gaussian)", 0, identity2_gaussian},
      {4, "bond variance uniform in tilt", 1200, variance_uniformity},
      {5, "flux decomposition", 0, flux_decomposition},
      {6, "pde order of accuracy", 60, pde_order},
      {7, "hydrodynamic convergence", 1800, hydro_convergence},
      {8, "a priori energy bound", 0, energy_bound},
      {9, "DLR conditional law", 0, dlr_spot_check},
      {10, "structural suites", 60, structural},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = c.budget_seconds <= 0.0 || secs <= c.budget_seconds;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failed;
    std::printf("[%s] %2d %-42s %7.1fs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str(), in_budget ? "" : " (over runtime budget)");
    std::fflush(stdout);
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
