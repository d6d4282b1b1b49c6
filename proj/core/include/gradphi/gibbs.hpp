#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gradphi/dynamics.hpp"
#include "gradphi/stats.hpp"

namespace gradphi {

enum class SamplerKind { kMala, kUla };

std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

struct SamplerSettings {
  SamplerKind kind = SamplerKind::kMala;
  double step = 0.0;            ///< Langevin step; 0 selects default_step()
  std::size_t burn_in = 0;      ///< 0 = automatic: max(1000, 10 tau_int)
  std::size_t thinning = 1;     ///< record every k-th sweep
  std::size_t sweeps = 20000;   ///< measured sweeps per estimate
  int batches = kDefaultBatches;
};

/// Default step for a chain with `sites` coordinates: n^{-1/3} / L with
/// L = 2d (c_+ + C_g). ULA is held below the Euler-Maruyama cap 0.1 / L; MALA
/// is exact at any step and only capped at 1 / L.
double default_step(const Potential& potential, int dim, std::size_t sites,
                    SamplerKind kind = SamplerKind::kMala);

/// Markov chain on the zero-winding representative phi~ of the tilted
/// periodic Gibbs measure exp(-sum_{x,i} V(phi~(x+e_i) - phi~(x) + u_i)).
/// One sweep is one global Langevin proposal; MALA accepts it with the
/// Metropolis-Hastings ratio, ULA always keeps it. The site mean is reset to
/// zero after each sweep since the target does not see it.
class GibbsSampler {
 public:
  GibbsSampler(std::shared_ptr<const TorusLattice> lattice, Potential potential,
               std::vector<double> tilt, SamplerSettings settings, std::uint64_t seed);

  const TiltedPeriodicSystem& system() const noexcept { return system_; }
  const SamplerSettings& settings() const noexcept { return settings_; }
  const TorusLattice& lattice() const noexcept { return system_.lattice(); }
  const Potential& potential() const noexcept { return system_.potential(); }
  const std::vector<double>& tilt() const noexcept { return system_.tilt(); }
  double step_size() const noexcept { return step_; }

  /// sum_{x,i} V(eta(x + e_i, x)) of the current state.
  double energy() const;

  void sweep();
  /// Burn-in per the settings; returns the number of sweeps spent.
  std::size_t burn_in();
  bool burned_in() const noexcept { return burned_in_; }

  std::size_t sweeps_done() const noexcept { return sweeps_; }
  std::size_t proposals() const noexcept { return proposals_; }
  std::size_t accepted() const noexcept { return accepted_; }
  double acceptance_rate() const noexcept {
    return proposals_ == 0 ? 0.0 : static_cast<double>(accepted_) / proposals_;
  }

  /// Run `sweeps` sweeps (burning in first if needed) and call `visit` on
  /// every thinned state. Returns the number of visits.
  std::size_t sample(std::size_t sweeps,
                     const std::function<void(const TiltedPeriodicSystem&)>& visit);

 private:
  void drifts(const std::vector<double>& phi, std::vector<double>& out) const;
  double energy_of(const std::vector<double>& phi) const;

  TiltedPeriodicSystem system_;
  SamplerSettings settings_;
  CounterRng rng_;
  double step_ = 0.0;
  bool burned_in_ = false;
  std::size_t sweeps_ = 0;
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
  std::vector<double> drift_now_, drift_new_, proposal_;
  double energy_now_ = 0.0;
};

/// Observable evaluated on a chain state, one value per component.
using Observable = std::function<void(const TiltedPeriodicSystem&, std::vector<double>&)>;

/// Run settings().sweeps sweeps and batch-mean every component.
std::vector<EstimatorReport> estimate(GibbsSampler& sampler, std::size_t components,
                                      const Observable& observable);

/// Spatial averages over all sites x of per-bond quantities along axis i.
double mean_vprime(const TiltedPeriodicSystem& sys, int axis);
double mean_eta_vprime(const TiltedPeriodicSystem& sys, int axis);
double mean_bond_square(const TiltedPeriodicSystem& sys, int axis);  ///< (eta - u_i)^2

/// E[V'(eta(e_i))] estimated by the spatial average over all bonds of axis i.
EstimatorReport estimate_vprime_mean(GibbsSampler& sampler, int axis);
/// E[sum_i eta(e_i) V'(eta(e_i))] by spatial averaging.
EstimatorReport estimate_identity2(GibbsSampler& sampler);
/// Var[eta(e_i)] per axis; the periodic part has mean zero so this is E[(eta - u_i)^2].
std::vector<EstimatorReport> estimate_bond_variance(GibbsSampler& sampler);

/// Gaussian free field on the torus by Fourier diagonalization:
/// per-axis Var[eta(e_i)] = (1 - N^{-d}) / d.
double gaussian_bond_variance(int side, int dim);
/// Same quantity by direct summation over the nonzero Fourier modes.
double gaussian_bond_variance_fourier(int side, int dim, int axis);

struct VarianceSweep {
  std::vector<std::vector<double>> tilts;
  std::vector<std::vector<EstimatorReport>> variance;  ///< [tilt][axis]
  double max_variance = 0.0;
  double min_variance = 0.0;
  double ratio = 0.0;
  /// Largest edge-ring variance minus the largest interior variance, in units
  /// of their combined standard error (positive means the edge is larger).
  double edge_excess_sigma = 0.0;
  bool edge_growth = false;
};

/// Tensor grid {lower, lower + step, ..., upper}^d.
std::vector<std::vector<double>> tilt_grid(int dim, double lower, double upper, double step);

VarianceSweep variance_sweep(const Potential& potential, int side, int dim,
                             const std::vector<std::vector<double>>& tilts,
                             const SamplerSettings& settings, std::uint64_t seed);

// ---------------------------------------------------------------- DLR spot check

struct DlrSettings {
  int side = 8;
  int dim = 1;
  std::vector<double> tilt;
  int box = 1;                        ///< Lambda = {0, ..., box-1}^d
  std::size_t samples = 100000;       ///< thinned conditional samples
  std::size_t thinning = 10;
  int bins = 40;
  SamplerSettings exterior;           ///< chain producing the frozen exterior
};

struct DlrReport {
  std::size_t sites = 0;
  std::size_t samples = 0;
  double sup_distance = 0.0;          ///< max over sites and bins of |density difference|
  double mean_discrepancy = 0.0;      ///< max |chain mean - reference mean| / combined SE
  double chain_mean = 0.0;            ///< first site
  double chain_mean_se = 0.0;
  double reference_mean = 0.0;
  double second_start_mean = 0.0;     ///< chain from a different start, first site
  double second_start_se = 0.0;
  double acceptance = 0.0;
  std::string reference;              ///< "quadrature" or "rejection"
  std::vector<double> bin_edges;      ///< first site
  std::vector<double> histogram;      ///< first site, chain density
  std::vector<double> reference_density;
  bool passed = false;
};

/// Freeze the exterior of Lambda at a Gibbs sample, run a MALA chain on the
/// heights inside Lambda and compare with the exact finite-volume law: 1-d
/// quadrature when |Lambda| = 1, rejection sampling from the Gaussian part
/// when V0 = eta^2 / 2 and g is bounded otherwise.
DlrReport dlr_check(const Potential& potential, const DlrSettings& settings,
                    std::uint64_t seed, double tolerance = 0.05);

}  // namespace gradphi
