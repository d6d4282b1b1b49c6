#include "gradphi/gibbs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "gradphi/errors.hpp"
#include "gradphi/parallel.hpp"
#include "gradphi/quadrature.hpp"

namespace gradphi {

std::string to_string(SamplerKind kind) { return kind == SamplerKind::kMala ? "mala" : "ula"; }

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "mala") return SamplerKind::kMala;
  if (name == "ula") return SamplerKind::kUla;
  throw InvalidArgument("unknown sampler '" + name + "' (expected mala or ula)");
}

double default_step(const Potential& potential, int dim, std::size_t sites, SamplerKind kind) {
  const auto& c = potential.constants();
  const double lip = 2.0 * dim * (c.c_plus + c.c_g);
  const double scaled = 1.0 * std::pow(static_cast<double>(std::max<std::size_t>(sites, 1)),
                                       -1.0 / 3.0) / lip;
  return std::min(scaled, (kind == SamplerKind::kUla ? 0.1 : 1.0) / lip);
}

// ---------------------------------------------------------------- sampler

GibbsSampler::GibbsSampler(std::shared_ptr<const TorusLattice> lattice, Potential potential,
                           std::vector<double> tilt, SamplerSettings settings,
                           std::uint64_t seed)
    : system_(std::move(lattice), std::move(potential), std::move(tilt), seed),
      settings_(settings),
      rng_(derive_seed(seed, 0x6769626273ull)) {
  const auto& lat = system_.lattice();
  if (static_cast<int>(system_.tilt().size()) != lat.dim()) {
    throw InvalidArgument("tilt dimension does not match the lattice");
  }
  if (settings_.thinning == 0) throw InvalidArgument("thinning must be at least 1");
  step_ = settings_.step > 0.0 ? settings_.step
                               : default_step(system_.potential(), lat.dim(), lat.num_sites(),
                                             settings_.kind);
  if (settings_.kind == SamplerKind::kUla && step_ > system_.max_step() * (1.0 + 1e-12)) {
    throw StepTooLarge("ULA step exceeds the stability cap " + std::to_string(system_.max_step()));
  }
  const std::size_t n = lat.num_sites();
  drift_now_.assign(n, 0.0);
  drift_new_.assign(n, 0.0);
  proposal_.assign(n, 0.0);
  drifts(system_.heights().values, drift_now_);
  energy_now_ = energy_of(system_.heights().values);
}

double GibbsSampler::energy_of(const std::vector<double>& phi) const {
  const auto& lat = system_.lattice();
  const auto& u = system_.tilt();
  const auto& v = system_.potential();
  double e = 0.0;
  for (std::size_t x = 0; x < lat.num_sites(); ++x) {
    for (int i = 0; i < lat.dim(); ++i) {
      e += v.value(phi[lat.neighbor(x, i, +1)] - phi[x] + u[i]);
    }
  }
  return e;
}

double GibbsSampler::energy() const { return energy_of(system_.heights().values); }

void GibbsSampler::drifts(const std::vector<double>& phi, std::vector<double>& out) const {
  const auto& lat = system_.lattice();
  const auto& u = system_.tilt();
  const auto& v = system_.potential();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t x = 0; x < lat.num_sites(); ++x) {
    for (int i = 0; i < lat.dim(); ++i) {
      const std::size_t y = lat.neighbor(x, i, +1);
      const double b = v.first(phi[y] - phi[x] + u[i]);
      out[x] -= b;
      out[y] += b;
    }
  }
}

void GibbsSampler::sweep() {
  const std::vector<double>& phi = system_.heights().values;
  const std::size_t n = phi.size();
  const double eps = step_;
  const double amp = std::sqrt(2.0 * eps);
  for (std::size_t x = 0; x < n; x += 2) {
    const auto [z0, z1] = rng_.normal2(sweeps_, CounterRng::slot(x, CounterRng::Lane::kNoise));
    proposal_[x] = phi[x] - eps * drift_now_[x] + amp * z0;
    if (x + 1 < n) proposal_[x + 1] = phi[x + 1] - eps * drift_now_[x + 1] + amp * z1;
  }
  drifts(proposal_, drift_new_);
  const double energy_new = energy_of(proposal_);
  if (!std::isfinite(energy_new)) {
    if (settings_.kind == SamplerKind::kUla) throw NonFinite("ULA state became non-finite");
  }

  bool accept = true;
  if (settings_.kind == SamplerKind::kMala) {
    double fwd = 0.0;
    double bwd = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      const double a = proposal_[x] - phi[x] + eps * drift_now_[x];
      const double b = phi[x] - proposal_[x] + eps * drift_new_[x];
      fwd += a * a;
      bwd += b * b;
    }
    const double log_ratio = energy_now_ - energy_new + (fwd - bwd) / (4.0 * eps);
    const double w = rng_.uniform(sweeps_, CounterRng::slot(0, CounterRng::Lane::kAccept));
    accept = std::isfinite(log_ratio) && std::log(w) < log_ratio;
    ++proposals_;
    if (accept) ++accepted_;
  }
  if (accept) {
    double m = 0.0;
    for (double p : proposal_) m += p;
    m /= static_cast<double>(n);
    for (double& p : proposal_) p -= m;
    system_.langevin().set_heights(HeightField(proposal_));
    std::swap(drift_now_, drift_new_);
    energy_now_ = energy_new;
  }
  ++sweeps_;
}

std::size_t GibbsSampler::burn_in() {
  if (burned_in_) return 0;
  std::size_t spent = 0;
  if (settings_.burn_in > 0) {
    for (; spent < settings_.burn_in; ++spent) sweep();
  } else {
    constexpr std::size_t kChunk = 1000;
    constexpr std::size_t kMax = 64 * kChunk;
    const double scale = 1.0 / static_cast<double>(lattice().num_sites());
    std::vector<double> trace;
    while (true) {
      for (std::size_t k = 0; k < kChunk; ++k, ++spent) {
        sweep();
        trace.push_back(energy_now_ * scale);
      }
      // judge on the second half so the transient does not inflate tau
      const std::span<const double> tail(trace.data() + trace.size() / 2,
                                         trace.size() - trace.size() / 2);
      const double tau = integrated_autocorrelation_time(tail);
      if (static_cast<double>(spent) >= std::max<double>(kChunk, 10.0 * tau)) break;
      if (spent >= kMax) break;
    }
  }
  burned_in_ = true;
  return spent;
}

std::size_t GibbsSampler::sample(std::size_t sweeps,
                                 const std::function<void(const TiltedPeriodicSystem&)>& visit) {
  burn_in();
  std::size_t visits = 0;
  for (std::size_t k = 1; k <= sweeps; ++k) {
    sweep();
    if (k % settings_.thinning == 0) {
      visit(system_);
      ++visits;
    }
  }
  return visits;
}

// ---------------------------------------------------------------- estimators

std::vector<EstimatorReport> estimate(GibbsSampler& sampler, std::size_t components,
                                      const Observable& observable) {
  std::vector<std::vector<double>> series(components);
  std::vector<double> value(components);
  const std::size_t sweeps = sampler.settings().sweeps;
  for (auto& s : series) s.reserve(sweeps / sampler.settings().thinning + 1);
  sampler.sample(sweeps, [&](const TiltedPeriodicSystem& sys) {
    observable(sys, value);
    for (std::size_t c = 0; c < components; ++c) {
      if (!std::isfinite(value[c])) throw NonFinite("observable became non-finite");
      series[c].push_back(value[c]);
    }
  });
  std::vector<EstimatorReport> out;
  out.reserve(components);
  for (const auto& s : series) {
    EstimatorReport r = batch_means(s, sampler.settings().batches);
    r.sweeps = sweeps;
    out.push_back(r);
  }
  return out;
}

double mean_vprime(const TiltedPeriodicSystem& sys, int axis) {
  const auto& lat = sys.lattice();
  const auto& phi = sys.heights();
  const double u = sys.tilt()[axis];
  double acc = 0.0;
  for (std::size_t x = 0; x < lat.num_sites(); ++x) {
    acc += sys.potential().first(phi[lat.neighbor(x, axis, +1)] - phi[x] + u);
  }
  return acc / static_cast<double>(lat.num_sites());
}

double mean_eta_vprime(const TiltedPeriodicSystem& sys, int axis) {
  const auto& lat = sys.lattice();
  const auto& phi = sys.heights();
  const double u = sys.tilt()[axis];
  double acc = 0.0;
  for (std::size_t x = 0; x < lat.num_sites(); ++x) {
    const double eta = phi[lat.neighbor(x, axis, +1)] - phi[x] + u;
    acc += eta * sys.potential().first(eta);
  }
  return acc / static_cast<double>(lat.num_sites());
}

double mean_bond_square(const TiltedPeriodicSystem& sys, int axis) {
  const auto& lat = sys.lattice();
  const auto& phi = sys.heights();
  double acc = 0.0;
  for (std::size_t x = 0; x < lat.num_sites(); ++x) {
    const double g = phi[lat.neighbor(x, axis, +1)] - phi[x];
    acc += g * g;
  }
  return acc / static_cast<double>(lat.num_sites());
}

EstimatorReport estimate_vprime_mean(GibbsSampler& sampler, int axis) {
  if (axis < 0 || axis >= sampler.lattice().dim()) throw InvalidArgument("axis out of range");
  return estimate(sampler, 1, [axis](const TiltedPeriodicSystem& s, std::vector<double>& v) {
    v[0] = mean_vprime(s, axis);
  }).front();
}

EstimatorReport estimate_identity2(GibbsSampler& sampler) {
  return estimate(sampler, 1, [](const TiltedPeriodicSystem& s, std::vector<double>& v) {
    double acc = 0.0;
    for (int i = 0; i < s.lattice().dim(); ++i) acc += mean_eta_vprime(s, i);
    v[0] = acc;
  }).front();
}

std::vector<EstimatorReport> estimate_bond_variance(GibbsSampler& sampler) {
  const int d = sampler.lattice().dim();
  return estimate(sampler, static_cast<std::size_t>(d),
                  [d](const TiltedPeriodicSystem& s, std::vector<double>& v) {
                    for (int i = 0; i < d; ++i) v[i] = mean_bond_square(s, i);
                  });
}

double gaussian_bond_variance(int side, int dim) {
  return (1.0 - std::pow(static_cast<double>(side), -dim)) / dim;
}

double gaussian_bond_variance_fourier(int side, int dim, int axis) {
  const TorusLattice lat(side, dim);
  double acc = 0.0;
  for (std::size_t k = 1; k < lat.num_sites(); ++k) {
    const Coord c = lat.coord(k);
    double lambda = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double s = std::sin(std::numbers::pi * c[j] / side);
      lambda += 4.0 * s * s;
    }
    const double si = std::sin(std::numbers::pi * c[axis] / side);
    acc += 4.0 * si * si / lambda;
  }
  return acc / static_cast<double>(lat.num_sites());
}

std::vector<std::vector<double>> tilt_grid(int dim, double lower, double upper, double step) {
  if (!(step > 0.0) || upper < lower) throw InvalidArgument("invalid tilt grid");
  const int n = static_cast<int>(std::floor((upper - lower) / step + 1e-9)) + 1;
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
  std::vector<std::vector<double>> out;
  out.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<double> u(dim);
    std::size_t rest = k;
    for (int i = dim - 1; i >= 0; --i) {
      u[i] = lower + static_cast<double>(rest % n) * step;
      rest /= n;
    }
    out.push_back(std::move(u));
  }
  return out;
}

VarianceSweep variance_sweep(const Potential& potential, int side, int dim,
                             const std::vector<std::vector<double>>& tilts,
                             const SamplerSettings& settings, std::uint64_t seed) {
  if (tilts.empty()) throw InvalidArgument("variance sweep needs at least one tilt");
  auto lattice = std::make_shared<const TorusLattice>(side, dim);
  VarianceSweep out;
  out.tilts = tilts;
  out.variance.resize(tilts.size());
  parallel_for(tilts.size(), [&](std::size_t k) {
    GibbsSampler s(lattice, potential, tilts[k], settings, derive_seed(seed, k));
    out.variance[k] = estimate_bond_variance(s);
  });

  double edge_radius = 0.0;
  for (const auto& u : tilts) {
    for (double c : u) edge_radius = std::max(edge_radius, std::abs(c));
  }
  out.max_variance = -1.0;
  out.min_variance = std::numeric_limits<double>::infinity();
  const EstimatorReport* edge_max = nullptr;
  const EstimatorReport* inner_max = nullptr;
  for (std::size_t k = 0; k < tilts.size(); ++k) {
    double r = 0.0;
    for (double c : tilts[k]) r = std::max(r, std::abs(c));
    const bool edge = r >= edge_radius - 1e-12;
    for (const auto& v : out.variance[k]) {
      out.max_variance = std::max(out.max_variance, v.estimate);
      out.min_variance = std::min(out.min_variance, v.estimate);
      auto*& slot = edge ? edge_max : inner_max;
      if (!slot || v.estimate > slot->estimate) slot = &v;
    }
  }
  out.ratio = out.max_variance / out.min_variance;
  if (edge_max && inner_max) {
    const double se = combined_error(edge_max->std_error, inner_max->std_error);
    const double diff = edge_max->estimate - inner_max->estimate;
    out.edge_excess_sigma = se > 0.0 ? diff / se : (diff > 1e-12 ? INFINITY : 0.0);
    out.edge_growth = out.edge_excess_sigma > 3.0;
  }
  return out;
}

// ---------------------------------------------------------------- DLR

namespace {

/// MALA restricted to the mobile sites of a graph; the rest stay frozen.
class LocalChain {
 public:
  LocalChain(const SiteGraph& graph, const Potential& potential, std::vector<double> phi,
             double step, std::uint64_t seed)
      : graph_(graph), potential_(potential), phi_(std::move(phi)), rng_(seed), step_(step) {
    energy_ = hamiltonian(graph_, potential_, phi_);
    grad_ = gradients(phi_);
  }

  void sweep() {
    const auto& sites = graph_.mobile_sites;
    std::vector<double> next = phi_;
    const double amp = std::sqrt(2.0 * step_);
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const double z = rng_.normal(sweeps_, CounterRng::slot(k, CounterRng::Lane::kNoise));
      next[sites[k]] = phi_[sites[k]] - step_ * grad_[k] + amp * z;
    }
    const double e_new = hamiltonian(graph_, potential_, next);
    const std::vector<double> g_new = gradients(next);
    double fwd = 0.0;
    double bwd = 0.0;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const double a = next[sites[k]] - phi_[sites[k]] + step_ * grad_[k];
      const double b = phi_[sites[k]] - next[sites[k]] + step_ * g_new[k];
      fwd += a * a;
      bwd += b * b;
    }
    const double log_ratio = energy_ - e_new + (fwd - bwd) / (4.0 * step_);
    const double w = rng_.uniform(sweeps_, CounterRng::slot(0, CounterRng::Lane::kAccept));
    ++sweeps_;
    if (std::isfinite(log_ratio) && std::log(w) < log_ratio) {
      phi_ = std::move(next);
      grad_ = g_new;
      energy_ = e_new;
      ++accepted_;
    }
  }

  double value(std::size_t k) const { return phi_[graph_.mobile_sites[k]]; }
  double acceptance() const { return sweeps_ ? static_cast<double>(accepted_) / sweeps_ : 0.0; }

 private:
  std::vector<double> gradients(const std::vector<double>& phi) const {
    std::vector<double> g(graph_.mobile_sites.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      g[k] = drift(graph_, potential_, phi, graph_.mobile_sites[k]);
    }
    return g;
  }

  const SiteGraph& graph_;
  const Potential& potential_;
  std::vector<double> phi_;
  CounterRng rng_;
  double step_;
  double energy_ = 0.0;
  std::vector<double> grad_;
  std::size_t sweeps_ = 0;
  std::size_t accepted_ = 0;
};

struct Histogram {
  double lower = 0.0;
  double width = 1.0;
  std::vector<double> density;
};

Histogram histogram(const std::vector<double>& xs, double lower, double upper, int bins) {
  Histogram h{lower, (upper - lower) / bins, std::vector<double>(bins, 0.0)};
  for (double x : xs) {
    const double s = (x - lower) / h.width;
    if (s >= 0.0 && s < bins) h.density[static_cast<std::size_t>(s)] += 1.0;
  }
  for (double& c : h.density) c /= static_cast<double>(xs.size()) * h.width;
  return h;
}

}  // namespace

DlrReport dlr_check(const Potential& potential, const DlrSettings& settings, std::uint64_t seed,
                    double tolerance) {
  const int d = settings.dim;
  if (settings.box < 1 || settings.box >= settings.side) {
    throw InvalidArgument("DLR box must have side between 1 and N - 1");
  }
  if (settings.box > 3) throw InvalidArgument("DLR box is limited to |Lambda| <= 3^d");
  if (settings.samples < static_cast<std::size_t>(kDefaultBatches)) {
    throw InvalidArgument("DLR check needs at least 32 samples");
  }
  std::vector<double> tilt = settings.tilt;
  if (tilt.empty()) tilt.assign(d, 0.0);
  auto lattice = std::make_shared<const TorusLattice>(settings.side, d);

  // frozen exterior drawn from the periodic Gibbs measure
  GibbsSampler outer(lattice, potential, tilt, settings.exterior, derive_seed(seed, 1));
  outer.burn_in();
  for (int k = 0; k < 100; ++k) outer.sweep();
  const std::vector<double> frozen = outer.system().heights().values;

  SiteGraph graph = torus_graph(*lattice, tilt);
  std::fill(graph.mobile.begin(), graph.mobile.end(), 0);
  graph.mobile_sites.clear();
  for (std::size_t x = 0; x < lattice->num_sites(); ++x) {
    const Coord c = lattice->coord(x);
    bool inside = true;
    for (int i = 0; i < d; ++i) inside = inside && c[i] < settings.box;
    if (inside) {
      graph.mobile[x] = 1;
      graph.mobile_sites.push_back(x);
    }
  }
  const std::size_t m = graph.mobile_sites.size();

  DlrReport rep;
  rep.sites = m;
  rep.samples = settings.samples;

  // reference law
  std::vector<std::vector<double>> reference(m);
  std::vector<double> ref_mean(m, 0.0), ref_sd(m, 1.0);
  std::function<double(double)> density1;  // |Lambda| = 1
  if (m == 1) {
    rep.reference = "quadrature";
    const std::size_t x = graph.mobile_sites[0];
    auto log_w = [&, x](double z) {
      double e = 0.0;
      for (std::uint32_t k = graph.offsets[x]; k < graph.offsets[x + 1]; ++k) {
        e += potential.value(z - frozen[graph.neighbors[k]] + graph.shifts[k]);
      }
      return -e;
    };
    double centre = 0.0;
    for (std::uint32_t k = graph.offsets[x]; k < graph.offsets[x + 1]; ++k) {
      centre += frozen[graph.neighbors[k]] - graph.shifts[k];
    }
    centre /= graph.offsets[x + 1] - graph.offsets[x];
    const double lo = centre - 15.0;
    const double hi = centre + 15.0;
    const double shift = log_w(centre);
    const auto& rule = gauss_legendre(16);
    const int panels = 3000;
    double z0 = 0.0, z1 = 0.0, z2 = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + (hi - lo) * p / panels;
      const double b = lo + (hi - lo) * (p + 1) / panels;
      z0 += rule.integrate([&](double z) { return std::exp(log_w(z) - shift); }, a, b);
      z1 += rule.integrate([&](double z) { return z * std::exp(log_w(z) - shift); }, a, b);
      z2 += rule.integrate([&](double z) { return z * z * std::exp(log_w(z) - shift); }, a, b);
    }
    ref_mean[0] = z1 / z0;
    ref_sd[0] = std::sqrt(std::max(z2 / z0 - ref_mean[0] * ref_mean[0], 1e-12));
    density1 = [log_w, shift, z0](double z) { return std::exp(log_w(z) - shift) / z0; };
  } else {
    if (!potential.has_unit_quadratic_v0() ||
        potential.kind() == Potential::Kind::kSplit) {
      throw InvalidArgument("DLR check with |Lambda| > 1 needs V0 = eta^2/2 and bounded g");
    }
    rep.reference = "rejection";
    std::vector<std::int64_t> pos(lattice->num_sites(), -1);
    for (std::size_t k = 0; k < m; ++k) pos[graph.mobile_sites[k]] = static_cast<std::int64_t>(k);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    double weight = 0.0;  // number of bond terms, inner bonds counted once
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t x = graph.mobile_sites[k];
      for (std::uint32_t e = graph.offsets[x]; e < graph.offsets[x + 1]; ++e) {
        const std::uint32_t y = graph.neighbors[e];
        q(k, k) += 1.0;
        b(k) -= graph.shifts[e];
        if (pos[y] >= 0) {
          q(k, pos[y]) -= 1.0;
          weight += 0.5;
        } else {
          b(k) += frozen[y];
          weight += 1.0;
        }
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(q);
    const Eigen::VectorXd mu = llt.solve(b);
    const Eigen::MatrixXd l = llt.matrixL();
    const double g_bound = std::abs(potential.amplitude()) * weight;
    const CounterRng rng(derive_seed(seed, 3));
    std::vector<double> phi = frozen;
    std::uint64_t draw = 0;
    for (auto& r : reference) r.reserve(settings.samples);
    while (reference[0].size() < settings.samples) {
      Eigen::VectorXd z(m);
      for (std::size_t k = 0; k < m; ++k) {
        z(k) = rng.normal(draw, CounterRng::slot(k, CounterRng::Lane::kNoise));
      }
      // x = mu + L^{-T} z has covariance Q^{-1}
      const Eigen::VectorXd xs = mu + l.transpose().triangularView<Eigen::Upper>().solve(z);
      for (std::size_t k = 0; k < m; ++k) phi[graph.mobile_sites[k]] = xs(k);
      double g_sum = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t x = graph.mobile_sites[k];
        for (std::uint32_t e = graph.offsets[x]; e < graph.offsets[x + 1]; ++e) {
          const std::uint32_t y = graph.neighbors[e];
          const double gv = potential.g(phi[x] - phi[y] + graph.shifts[e]);
          g_sum += pos[y] >= 0 ? 0.5 * gv : gv;
        }
      }
      const double w = rng.uniform(draw, CounterRng::slot(0, CounterRng::Lane::kAccept));
      ++draw;
      if (std::log(w) < -(g_sum + g_bound)) {
        for (std::size_t k = 0; k < m; ++k) reference[k].push_back(xs(k));
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      ref_mean[k] = mean(reference[k]);
      ref_sd[k] = std::sqrt(sample_variance(reference[k]));
    }
  }

  // conditional chain inside Lambda
  const auto& c = potential.constants();
  const double step = (m == 1 ? 1.0 : 0.5) / (2.0 * d * (c.c_plus + c.c_g));
  auto run_chain = [&](std::vector<double> start, std::uint64_t chain_seed, double* acceptance) {
    LocalChain chain(graph, potential, std::move(start), step, chain_seed);
    for (int k = 0; k < 2000; ++k) chain.sweep();
    std::vector<std::vector<double>> out(m);
    for (auto& o : out) o.reserve(settings.samples);
    for (std::size_t s = 0; s < settings.samples; ++s) {
      for (std::size_t t = 0; t < settings.thinning; ++t) chain.sweep();
      for (std::size_t k = 0; k < m; ++k) out[k].push_back(chain.value(k));
    }
    if (acceptance) *acceptance = chain.acceptance();
    return out;
  };
  const auto samples = run_chain(frozen, derive_seed(seed, 2), &rep.acceptance);
  std::vector<double> start2 = frozen;
  for (std::size_t k = 0; k < m; ++k) {
    start2[graph.mobile_sites[k]] = ref_mean[k] + 4.0 * ref_sd[k];
  }
  const auto samples2 = run_chain(start2, derive_seed(seed, 4), nullptr);

  for (std::size_t k = 0; k < m; ++k) {
    const double lo = ref_mean[k] - 5.0 * ref_sd[k];
    const double hi = ref_mean[k] + 5.0 * ref_sd[k];
    const Histogram h = histogram(samples[k], lo, hi, settings.bins);
    std::vector<double> ref_density(settings.bins);
    if (m == 1) {
      const auto& rule = gauss_legendre(8);
      for (int j = 0; j < settings.bins; ++j) {
        const double a = lo + j * h.width;
        ref_density[j] = rule.integrate(density1, a, a + h.width) / h.width;
      }
    } else {
      ref_density = histogram(reference[k], lo, hi, settings.bins).density;
    }
    for (int j = 0; j < settings.bins; ++j) {
      rep.sup_distance = std::max(rep.sup_distance, std::abs(h.density[j] - ref_density[j]));
    }
    const EstimatorReport chain_mean = batch_means(samples[k]);
    double ref_se = 0.0;
    if (m > 1) ref_se = ref_sd[k] / std::sqrt(static_cast<double>(reference[k].size()));
    const double se = combined_error(chain_mean.std_error, ref_se);
    rep.mean_discrepancy =
        std::max(rep.mean_discrepancy, std::abs(chain_mean.estimate - ref_mean[k]) / se);
    if (k == 0) {
      rep.chain_mean = chain_mean.estimate;
      rep.chain_mean_se = chain_mean.std_error;
      rep.reference_mean = ref_mean[0];
      const EstimatorReport second = batch_means(samples2[0]);
      rep.second_start_mean = second.estimate;
      rep.second_start_se = second.std_error;
      rep.bin_edges.resize(settings.bins + 1);
      for (int j = 0; j <= settings.bins; ++j) rep.bin_edges[j] = lo + j * h.width;
      rep.histogram = h.density;
      rep.reference_density = ref_density;
    }
  }
  rep.passed = rep.sup_distance <= tolerance;
  return rep;
}

}  // namespace gradphi
