#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gradphi/cell_field.hpp"
#include "gradphi/fields.hpp"
#include "gradphi/geometry.hpp"
#include "gradphi/potential.hpp"
#include "gradphi/rng.hpp"

namespace gradphi {

/// Interaction graph of a Langevin system in compressed row form. Site x
/// feels sum_k V'(phi(x) - phi(y_k) + shift_k) over its neighbours y_k.
/// Only mobile sites move; the rest are frozen boundary values.
struct SiteGraph {
  std::size_t num_sites = 0;
  int max_degree = 0;
  std::vector<char> mobile;
  std::vector<std::size_t> mobile_sites;
  std::vector<std::uint32_t> offsets;    ///< size num_sites + 1
  std::vector<std::uint32_t> neighbors;  ///< y_k
  std::vector<double> shifts;            ///< added to phi(x) - phi(y_k)
};

/// Periodic graph with tilt u: the neighbour x - e_i enters with +u_i and
/// x + e_i with -u_i, so eta(x, y) = phi(x) - phi(y) + u_b.
SiteGraph torus_graph(const TorusLattice& lattice, std::span<const double> tilt);
/// Interior sites of D_N are mobile; the boundary layer is frozen.
SiteGraph domain_graph(const DiscretizedDomain& domain);
/// Sites without bonds, used to check the pure noise part of the integrator.
SiteGraph isolated_sites(std::size_t count);

/// U_x(phi) = sum_y V'(phi(x) - phi(y) [+ u_b]).
double drift(const SiteGraph& graph, const Potential& potential, std::span<const double> phi,
             std::size_t site);

/// H(phi): half the directed-bond sum between mobile sites plus the full sum
/// over bonds from a mobile site to a frozen one.
double hamiltonian(const SiteGraph& graph, const Potential& potential,
                   std::span<const double> phi);

enum class NoiseMode { kStochastic, kNone };

/// Euler-Maruyama integrator for d phi = -U(phi) dt + sqrt(2) dw on the mobile
/// sites of a graph. Noise is drawn from a counter-based stream indexed by
/// (step, site), so trajectories depend only on the seed.
class LangevinSystem {
 public:
  LangevinSystem(SiteGraph graph, Potential potential, HeightField phi, std::uint64_t seed);

  const SiteGraph& graph() const noexcept { return graph_; }
  const Potential& potential() const noexcept { return potential_; }
  const HeightField& heights() const noexcept { return phi_; }
  double time() const noexcept { return time_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t seed() const noexcept { return rng_.seed(); }

  /// 0.1 / (2d (c_+ + C_g)), from the Lipschitz constant of the drift.
  double max_step() const noexcept;

  /// phi(x) <- phi(x) - U_x(phi) dt + sqrt(2 dt) xi_x on mobile sites, all
  /// drifts from the pre-step state. dt = 0 is a no-op. Throws StepTooLarge
  /// above max_step() and NonFinite if a value blows up.
  void step(double dt, NoiseMode noise = NoiseMode::kStochastic);

  /// Take ceil((target - t) / max_dt) equal steps landing exactly on target.
  void advance_to(double target, double max_dt, NoiseMode noise = NoiseMode::kStochastic);

  /// Overwrite the heights (size must match); time is unchanged.
  void set_heights(HeightField phi);
  /// Subtract a constant from every site (zero mode of the periodic system).
  void shift_heights(double offset);

 private:
  SiteGraph graph_;
  Potential potential_;
  HeightField phi_;
  CounterRng rng_;
  double time_ = 0.0;
  std::uint64_t steps_ = 0;
  std::vector<double> update_;
};

/// Microscopic dynamics on D_N with heights frozen to psi^N outside D_N.
class DirichletSystem {
 public:
  /// Boundary layer set to psi^N from f; interior set to N * cell average of h0.
  DirichletSystem(std::shared_ptr<const DiscretizedDomain> domain, Potential potential,
                  ScalarFunction boundary, const ScalarFunction& initial, std::uint64_t seed);
  /// Explicit heights on every domain site; boundary values are overwritten by psi^N.
  DirichletSystem(std::shared_ptr<const DiscretizedDomain> domain, Potential potential,
                  ScalarFunction boundary, HeightField phi, std::uint64_t seed);

  const DiscretizedDomain& domain() const noexcept { return *domain_; }
  std::shared_ptr<const DiscretizedDomain> domain_ptr() const noexcept { return domain_; }
  const HeightField& heights() const noexcept { return system_.heights(); }
  const HeightField& boundary_heights() const noexcept { return psi_; }
  const ScalarFunction& boundary_function() const noexcept { return boundary_; }
  double time() const noexcept { return system_.time(); }
  double max_step() const noexcept { return system_.max_step(); }
  LangevinSystem& langevin() noexcept { return system_; }

  void step(double dt, NoiseMode noise = NoiseMode::kStochastic) { system_.step(dt, noise); }
  void advance_to(double target, double max_dt, NoiseMode noise = NoiseMode::kStochastic) {
    system_.advance_to(target, max_dt, noise);
  }

  /// N^{-d} sum over the closure bonds of (grad phi)^2.
  double dirichlet_energy_density() const;

  const CellField& background() const noexcept { return *background_; }

 private:
  std::shared_ptr<const DiscretizedDomain> domain_;
  ScalarFunction boundary_;
  HeightField psi_;
  std::shared_ptr<const CellField> background_;
  LangevinSystem system_;
};

/// Periodic system on the torus with tilt u; the represented gradient field
/// is eta(b) = grad phi~(b) + u_b.
class TiltedPeriodicSystem {
 public:
  TiltedPeriodicSystem(std::shared_ptr<const TorusLattice> lattice, Potential potential,
                       std::vector<double> tilt, std::uint64_t seed);

  const TorusLattice& lattice() const noexcept { return *lattice_; }
  const std::vector<double>& tilt() const noexcept { return tilt_; }
  const Potential& potential() const noexcept { return system_.potential(); }
  const HeightField& heights() const noexcept { return system_.heights(); }
  double time() const noexcept { return system_.time(); }
  double max_step() const noexcept { return system_.max_step(); }
  LangevinSystem& langevin() noexcept { return system_; }
  const LangevinSystem& langevin() const noexcept { return system_; }

  void step(double dt, NoiseMode noise = NoiseMode::kStochastic) { system_.step(dt, noise); }

  /// eta on every torus bond, tilt included.
  GradientField gradient_field() const;
  /// (1/N^d) sum_x eta((x + e_i, x)).
  double mean_gradient(int axis) const;

 private:
  std::shared_ptr<const TorusLattice> lattice_;
  std::vector<double> tilt_;
  LangevinSystem system_;
};

/// h^N(t, theta) = N^{-1} phi(x) on B(x/N, 1/N): a cell field with spacing
/// 1/N over the bounding box of D plus a margin, using psi^N / N (the cell
/// average of f) on cells outside the simulated sites.
struct MacroscopicField {
  int scale = 1;
  CellField cells;
};

/// Cells of side 1/N centred at x/N covering the bounding box of D with one
/// cell of margin, each holding the cell average of f.
CellField macro_background(const DiscretizedDomain& domain, const ScalarFunction& boundary);

/// Throws TimeMismatch unless the system time equals N^2 t_macro.
MacroscopicField macro_height(const DirichletSystem& system, double t_macro);
/// Build the field from arbitrary heights on the domain sites.
MacroscopicField macro_height(const DiscretizedDomain& domain, const HeightField& phi,
                              const CellField& background);
MacroscopicField macro_height(const DiscretizedDomain& domain, const HeightField& phi,
                              const ScalarFunction& boundary);

// ---------------------------------------------------------------- energy diagnostic

struct EnergyCheckpoint {
  double t = 0.0;          ///< macroscopic time
  double h_norm2 = 0.0;    ///< ||h^N(t)||^2_{L^2(D)}
  double dirichlet = 0.0;  ///< N^{-d} int_0^t sum_b (grad phi_s(b))^2 ds
};

/// One realization: integrate to each macroscopic checkpoint time (ascending)
/// while accumulating the Dirichlet-energy integral with a left Riemann sum.
std::vector<EnergyCheckpoint> energy_trajectory(DirichletSystem system,
                                                std::span<const double> times, double dt);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> mean_h_norm2;
  std::vector<double> mean_dirichlet;
  std::vector<double> lhs;  ///< E||h||^2 + c_- E(energy)
  std::vector<double> rhs;  ///< 2 E||h(0)||^2 + K (1 + t)
  double c_minus = 1.0;
  double constant = 0.0;    ///< K
  std::size_t realizations = 0;
  std::size_t violations = 0;
  bool monotone_energy = true;
  bool satisfied = false;
};

/// Average realizations and test the a priori bound with a frozen K.
EnergyTrace energy_diagnostic(const std::vector<std::vector<EnergyCheckpoint>>& runs,
                              double c_minus, double constant);

/// Smallest K for which the bound holds on a calibration run, times `margin`.
double fit_energy_constant(const std::vector<std::vector<EnergyCheckpoint>>& runs,
                           double c_minus, double margin = 1.5);

}  // namespace gradphi
