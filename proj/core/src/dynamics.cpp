#include "gradphi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gradphi/errors.hpp"

namespace gradphi {

// ---------------------------------------------------------------- graphs

namespace {

void finish_graph(SiteGraph& g) {
  g.mobile_sites.clear();
  for (std::size_t x = 0; x < g.num_sites; ++x) {
    if (g.mobile[x]) g.mobile_sites.push_back(x);
    g.max_degree = std::max<int>(g.max_degree, static_cast<int>(g.offsets[x + 1] - g.offsets[x]));
  }
}

}  // namespace

SiteGraph torus_graph(const TorusLattice& lattice, std::span<const double> tilt) {
  const int d = lattice.dim();
  if (!tilt.empty() && static_cast<int>(tilt.size()) != d) {
    throw InvalidArgument("tilt has " + std::to_string(tilt.size()) + " components, expected " +
                          std::to_string(d));
  }
  SiteGraph g;
  g.num_sites = lattice.num_sites();
  g.mobile.assign(g.num_sites, 1);
  g.offsets.reserve(g.num_sites + 1);
  g.offsets.push_back(0);
  for (std::size_t x = 0; x < g.num_sites; ++x) {
    for (int i = 0; i < d; ++i) {
      const double u = tilt.empty() ? 0.0 : tilt[i];
      g.neighbors.push_back(static_cast<std::uint32_t>(lattice.neighbor(x, i, -1)));
      g.shifts.push_back(u);
      g.neighbors.push_back(static_cast<std::uint32_t>(lattice.neighbor(x, i, +1)));
      g.shifts.push_back(-u);
    }
    g.offsets.push_back(static_cast<std::uint32_t>(g.neighbors.size()));
  }
  finish_graph(g);
  return g;
}

SiteGraph domain_graph(const DiscretizedDomain& domain) {
  SiteGraph g;
  g.num_sites = domain.num_sites();
  g.mobile.assign(g.num_sites, 0);
  g.offsets.push_back(0);
  for (std::size_t x = 0; x < g.num_sites; ++x) {
    if (domain.is_interior(x)) {
      g.mobile[x] = 1;
      for (int i = 0; i < domain.dim(); ++i) {
        for (int s : {-1, +1}) {
          g.neighbors.push_back(static_cast<std::uint32_t>(domain.neighbor(x, i, s)));
          g.shifts.push_back(0.0);
        }
      }
    }
    g.offsets.push_back(static_cast<std::uint32_t>(g.neighbors.size()));
  }
  finish_graph(g);
  return g;
}

SiteGraph isolated_sites(std::size_t count) {
  SiteGraph g;
  g.num_sites = count;
  g.mobile.assign(count, 1);
  g.offsets.assign(count + 1, 0);
  finish_graph(g);
  return g;
}

double drift(const SiteGraph& graph, const Potential& potential, std::span<const double> phi,
             std::size_t site) {
  double u = 0.0;
  const double px = phi[site];
  for (std::uint32_t k = graph.offsets[site]; k < graph.offsets[site + 1]; ++k) {
    u += potential.first(px - phi[graph.neighbors[k]] + graph.shifts[k]);
  }
  return u;
}

double hamiltonian(const SiteGraph& graph, const Potential& potential,
                   std::span<const double> phi) {
  double h = 0.0;
  for (std::size_t x : graph.mobile_sites) {
    for (std::uint32_t k = graph.offsets[x]; k < graph.offsets[x + 1]; ++k) {
      const std::uint32_t y = graph.neighbors[k];
      const double v = potential.value(phi[x] - phi[y] + graph.shifts[k]);
      h += graph.mobile[y] ? 0.5 * v : v;
    }
  }
  return h;
}

// ---------------------------------------------------------------- Langevin

LangevinSystem::LangevinSystem(SiteGraph graph, Potential potential, HeightField phi,
                               std::uint64_t seed)
    : graph_(std::move(graph)), potential_(std::move(potential)), phi_(std::move(phi)),
      rng_(seed) {
  if (phi_.size() != graph_.num_sites) {
    throw InvalidArgument("height field size does not match the site graph");
  }
  update_.resize(graph_.mobile_sites.size());
}

double LangevinSystem::max_step() const noexcept {
  if (graph_.max_degree == 0) return std::numeric_limits<double>::infinity();
  const auto& c = potential_.constants();
  return 0.1 / (graph_.max_degree * (c.c_plus + c.c_g));
}

void LangevinSystem::step(double dt, NoiseMode noise) {
  if (!(dt >= 0.0)) throw InvalidArgument("time step must be non-negative");
  if (dt == 0.0) return;
  const double cap = max_step();
  if (dt > cap * (1.0 + 1e-12)) {
    throw StepTooLarge("time step " + std::to_string(dt) + " exceeds the stability cap " +
                       std::to_string(cap));
  }
  const double amp = std::sqrt(2.0 * dt);
  const auto& sites = graph_.mobile_sites;
  const std::span<const double> phi(phi_.values);
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const std::size_t x = sites[k];
    double delta = -drift(graph_, potential_, phi, x) * dt;
    if (noise == NoiseMode::kStochastic) {
      delta += amp * rng_.normal(steps_, CounterRng::slot(x, CounterRng::Lane::kNoise));
    }
    update_[k] = delta;
  }
  bool finite = true;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    double& v = phi_.values[sites[k]];
    v += update_[k];
    finite = finite && std::isfinite(v);
  }
  ++steps_;
  time_ += dt;
  if (!finite) {
    throw NonFinite("non-finite height after step " + std::to_string(steps_));
  }
}

void LangevinSystem::advance_to(double target, double max_dt, NoiseMode noise) {
  const double span = target - time_;
  if (span < -1e-12 * std::max(1.0, std::abs(target))) {
    throw TimeMismatch("cannot integrate backwards in time");
  }
  if (span <= 0.0) return;
  if (!(max_dt > 0.0)) throw InvalidArgument("maximum step must be positive");
  const auto n = static_cast<std::uint64_t>(std::ceil(span / max_dt - 1e-12));
  const double dt = span / static_cast<double>(std::max<std::uint64_t>(n, 1));
  const double start = time_;
  for (std::uint64_t k = 0; k < n; ++k) step(dt, noise);
  time_ = start + span;
}

void LangevinSystem::set_heights(HeightField phi) {
  if (phi.size() != graph_.num_sites) {
    throw InvalidArgument("height field size does not match the site graph");
  }
  phi_ = std::move(phi);
}

void LangevinSystem::shift_heights(double offset) {
  for (double& v : phi_.values) v -= offset;
}

// ---------------------------------------------------------------- Dirichlet

namespace {

HeightField initial_heights(const DiscretizedDomain& domain, const ScalarFunction& initial) {
  HeightField phi(domain.num_sites());
  for (std::size_t x : domain.interior()) {
    phi[x] = domain.scale() * cell_average(initial, domain.coord(x), domain.scale(), domain.dim());
  }
  return phi;
}

}  // namespace

DirichletSystem::DirichletSystem(std::shared_ptr<const DiscretizedDomain> domain,
                                 Potential potential, ScalarFunction boundary,
                                 const ScalarFunction& initial, std::uint64_t seed)
    : DirichletSystem(domain, std::move(potential), boundary,
                      initial_heights(*domain, initial), seed) {}

DirichletSystem::DirichletSystem(std::shared_ptr<const DiscretizedDomain> domain,
                                 Potential potential, ScalarFunction boundary, HeightField phi,
                                 std::uint64_t seed)
    : domain_(std::move(domain)),
      boundary_(std::move(boundary)),
      psi_(boundary_height(boundary_, *domain_)),
      background_(std::make_shared<CellField>(macro_background(*domain_, boundary_))),
      system_(domain_graph(*domain_), std::move(potential),
              [&] {
                if (phi.size() != domain_->num_sites()) {
                  throw InvalidArgument("initial heights do not match the domain");
                }
                for (std::size_t x : domain_->boundary()) phi[x] = psi_[x];
                return std::move(phi);
              }(),
              seed) {}

double DirichletSystem::dirichlet_energy_density() const {
  const auto& phi = heights();
  double acc = 0.0;
  for (const Bond& b : domain_->closure_bonds()) {
    const double g = phi[b.x] - phi[b.y];
    acc += g * g;
  }
  return acc / std::pow(static_cast<double>(domain_->scale()), domain_->dim());
}

// ---------------------------------------------------------------- periodic

TiltedPeriodicSystem::TiltedPeriodicSystem(std::shared_ptr<const TorusLattice> lattice,
                                           Potential potential, std::vector<double> tilt,
                                           std::uint64_t seed)
    : lattice_(std::move(lattice)),
      tilt_(std::move(tilt)),
      system_(torus_graph(*lattice_, tilt_), std::move(potential),
              HeightField(lattice_->num_sites()), seed) {}

GradientField TiltedPeriodicSystem::gradient_field() const {
  GradientField eta = gradient(*lattice_, heights());
  const auto bonds = lattice_->bonds();
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    eta[k] += bonds[k].sign * tilt_[bonds[k].axis];
  }
  return eta;
}

double TiltedPeriodicSystem::mean_gradient(int axis) const {
  const auto& phi = heights();
  double acc = 0.0;
  for (std::size_t x = 0; x < lattice_->num_sites(); ++x) {
    acc += phi[lattice_->neighbor(x, axis, +1)] - phi[x];
  }
  return acc / static_cast<double>(lattice_->num_sites()) + tilt_[axis];
}

// ---------------------------------------------------------------- macroscopic field

CellField macro_background(const DiscretizedDomain& domain, const ScalarFunction& boundary) {
  const int d = domain.dim();
  const int n = domain.scale();
  const BoxShape bb = domain.spec().bounding_box();
  Point lower{};
  std::array<int, kMaxDim> counts{1, 1, 1};
  for (int i = 0; i < d; ++i) {
    const int lo = static_cast<int>(std::floor(bb.lower[i] * n)) - 1;
    const int hi = static_cast<int>(std::ceil(bb.upper[i] * n)) + 1;
    lower[i] = (lo - 0.5) / n;
    counts[i] = hi - lo + 1;
  }
  CellField cells(d, lower, 1.0 / n, counts);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto j = cells.multi(k);
    Coord c{};
    for (int i = 0; i < d; ++i) c[i] = static_cast<int>(std::lround(lower[i] * n + 0.5)) + j[i];
    cells.values()[k] = cell_average(boundary, c, n, d);
  }
  return cells;
}

MacroscopicField macro_height(const DiscretizedDomain& domain, const HeightField& phi,
                              const CellField& background) {
  if (phi.size() != domain.num_sites()) {
    throw InvalidArgument("height field does not match the domain");
  }
  MacroscopicField h{domain.scale(), background};
  const double inv = 1.0 / domain.scale();
  std::array<int, kMaxDim> j;
  for (std::size_t x = 0; x < domain.num_sites(); ++x) {
    if (h.cells.locate(domain.position(x), j)) h.cells.values()[h.cells.flat(j)] = phi[x] * inv;
  }
  return h;
}

MacroscopicField macro_height(const DiscretizedDomain& domain, const HeightField& phi,
                              const ScalarFunction& boundary) {
  return macro_height(domain, phi, macro_background(domain, boundary));
}

MacroscopicField macro_height(const DirichletSystem& system, double t_macro) {
  const double n2 = static_cast<double>(system.domain().scale()) * system.domain().scale();
  const double target = n2 * t_macro;
  if (std::abs(system.time() - target) > 1e-9 * std::max(1.0, target)) {
    throw TimeMismatch("system is at microscopic time " + std::to_string(system.time()) +
                       ", expected N^2 t = " + std::to_string(target));
  }
  return macro_height(system.domain(), system.heights(), system.background());
}

// ---------------------------------------------------------------- energy diagnostic

std::vector<EnergyCheckpoint> energy_trajectory(DirichletSystem system,
                                                std::span<const double> times, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("energy trajectory needs a positive step");
  const double n2 = static_cast<double>(system.domain().scale()) * system.domain().scale();
  const DomainSpec& spec = system.domain().spec();
  std::vector<EnergyCheckpoint> out;
  out.reserve(times.size());
  double energy = 0.0;
  double prev = 0.0;
  for (double t : times) {
    if (t < prev) throw InvalidArgument("checkpoint times must be ascending");
    prev = t;
    const double span = n2 * t - system.time();
    if (span > 0.0) {
      const auto steps = static_cast<std::uint64_t>(std::ceil(span / dt - 1e-12));
      const double h = span / static_cast<double>(steps);
      for (std::uint64_t k = 0; k < steps; ++k) {
        energy += system.dirichlet_energy_density() * h / n2;
        system.step(h);
      }
    }
    const MacroscopicField field =
        macro_height(system.domain(), system.heights(), system.background());
    out.push_back({t, l2_norm_squared(field.cells, spec), energy});
  }
  return out;
}

namespace {

struct TraceMeans {
  std::vector<double> times, h2, energy;
};

TraceMeans average_runs(const std::vector<std::vector<EnergyCheckpoint>>& runs) {
  if (runs.empty()) throw InvalidArgument("energy diagnostic needs at least one run");
  TraceMeans m;
  const std::size_t n = runs.front().size();
  if (n == 0) throw InvalidArgument("energy diagnostic needs at least one checkpoint");
  m.times.resize(n);
  m.h2.assign(n, 0.0);
  m.energy.assign(n, 0.0);
  for (const auto& run : runs) {
    if (run.size() != n) throw InvalidArgument("runs have different checkpoint counts");
    for (std::size_t k = 0; k < n; ++k) {
      m.times[k] = run[k].t;
      m.h2[k] += run[k].h_norm2;
      m.energy[k] += run[k].dirichlet;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    m.h2[k] /= static_cast<double>(runs.size());
    m.energy[k] /= static_cast<double>(runs.size());
  }
  return m;
}

}  // namespace

EnergyTrace energy_diagnostic(const std::vector<std::vector<EnergyCheckpoint>>& runs,
                              double c_minus, double constant) {
  const TraceMeans m = average_runs(runs);
  EnergyTrace tr;
  tr.times = m.times;
  tr.mean_h_norm2 = m.h2;
  tr.mean_dirichlet = m.energy;
  tr.c_minus = c_minus;
  tr.constant = constant;
  tr.realizations = runs.size();
  for (const auto& run : runs) {
    for (std::size_t k = 1; k < run.size(); ++k) {
      if (run[k].dirichlet < run[k - 1].dirichlet) tr.monotone_energy = false;
    }
  }
  const double h0 = m.h2.front();
  for (std::size_t k = 0; k < m.times.size(); ++k) {
    tr.lhs.push_back(m.h2[k] + c_minus * m.energy[k]);
    tr.rhs.push_back(2.0 * h0 + constant * (1.0 + m.times[k]));
    if (!std::isfinite(tr.lhs.back()) || tr.lhs.back() > tr.rhs.back()) ++tr.violations;
  }
  tr.satisfied = tr.violations == 0 && tr.monotone_energy;
  return tr;
}

double fit_energy_constant(const std::vector<std::vector<EnergyCheckpoint>>& runs,
                           double c_minus, double margin) {
  const TraceMeans m = average_runs(runs);
  double k_min = 0.0;
  for (std::size_t k = 0; k < m.times.size(); ++k) {
    const double excess = m.h2[k] + c_minus * m.energy[k] - 2.0 * m.h2.front();
    k_min = std::max(k_min, excess / (1.0 + m.times[k]));
  }
  return std::max(k_min, 0.0) * margin;
}

}  // namespace gradphi
