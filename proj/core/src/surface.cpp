#include "gradphi/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "gradphi/errors.hpp"
#include "gradphi/parallel.hpp"
#include "gradphi/quadrature.hpp"

namespace gradphi {

VectorEstimate grad_sigma(const Potential& potential, int side, const std::vector<double>& u,
                          const SamplerSettings& settings, std::uint64_t seed) {
  const int d = static_cast<int>(u.size());
  auto lattice = std::make_shared<const TorusLattice>(side, d);
  GibbsSampler sampler(lattice, potential, u, settings, seed);
  const auto reports = estimate(sampler, static_cast<std::size_t>(d),
                                [d](const TiltedPeriodicSystem& s, std::vector<double>& v) {
                                  for (int i = 0; i < d; ++i) v[i] = mean_vprime(s, i);
                                });
  VectorEstimate out;
  for (const auto& r : reports) {
    out.value.push_back(r.estimate);
    out.error.push_back(r.std_error);
  }
  return out;
}

// ---------------------------------------------------------------- thermodynamic integration

namespace {

/// Straight piece start + s * direction, s in [0, 1].
struct Segment {
  std::vector<double> start;
  std::vector<double> direction;
};

struct RuleResult {
  double value = 0.0;
  double error = 0.0;
};

RuleResult integrate_path(const Potential& potential, const std::vector<Segment>& path,
                          int nodes, const SurfaceSettings& settings, std::uint64_t seed) {
  const auto& rule = gauss_legendre(nodes);
  const std::size_t runs = path.size() * rule.nodes.size();
  std::vector<double> f(runs), se(runs), w(runs);
  parallel_for(runs, [&](std::size_t r) {
    const Segment& seg = path[r / rule.nodes.size()];
    const std::size_t k = r % rule.nodes.size();
    const double s = 0.5 * (rule.nodes[k] + 1.0);
    std::vector<double> at(seg.start);
    for (std::size_t i = 0; i < at.size(); ++i) at[i] += s * seg.direction[i];
    const VectorEstimate g =
        grad_sigma(potential, settings.side, at, settings.sampler, derive_seed(seed, r));
    double val = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < at.size(); ++i) {
      val += seg.direction[i] * g.value[i];
      var += seg.direction[i] * seg.direction[i] * g.error[i] * g.error[i];
    }
    f[r] = val;
    se[r] = std::sqrt(var);
    w[r] = 0.5 * rule.weights[k];
  });
  RuleResult out;
  double var = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    out.value += w[r] * f[r];
    var += w[r] * w[r] * se[r] * se[r];
  }
  out.error = std::sqrt(var);
  return out;
}

SigmaEstimate integrate_sigma(const Potential& potential, const std::vector<Segment>& path,
                              const SurfaceSettings& settings, std::uint64_t seed) {
  SigmaEstimate est;
  if (path.empty()) return est;
  if (settings.nodes < 1) throw InvalidArgument("quadrature needs at least one node");
  const RuleResult full = integrate_path(potential, path, settings.nodes, settings,
                                         derive_seed(seed, 1));
  est.value = full.value;
  est.mc_error = full.error;
  est.runs = path.size() * settings.nodes;
  if (settings.quadrature_check && settings.nodes >= 2) {
    const int half = settings.nodes / 2;
    const RuleResult coarse =
        integrate_path(potential, path, half, settings, derive_seed(seed, 2));
    est.runs += path.size() * half;
    est.quadrature_error = std::max(0.0, std::abs(full.value - coarse.value) -
                                             3.0 * combined_error(full.error, coarse.error));
  }
  est.error = est.mc_error + est.quadrature_error;
  return est;
}

bool is_zero(const std::vector<double>& u) {
  return std::all_of(u.begin(), u.end(), [](double c) { return c == 0.0; });
}

}  // namespace

SigmaEstimate sigma(const Potential& potential, const std::vector<double>& u,
                    const SurfaceSettings& settings, std::uint64_t seed) {
  if (u.empty()) throw InvalidArgument("tilt must have at least one component");
  for (double c : u) {
    if (!std::isfinite(c)) throw InvalidArgument("tilt must be finite");
  }
  if (is_zero(u)) return {};
  return integrate_sigma(potential, {Segment{std::vector<double>(u.size(), 0.0), u}}, settings,
                         seed);
}

SigmaEstimate sigma_staircase(const Potential& potential, const std::vector<double>& u,
                              const SurfaceSettings& settings, std::uint64_t seed) {
  if (u.empty()) throw InvalidArgument("tilt must have at least one component");
  std::vector<Segment> path;
  std::vector<double> at(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) continue;
    Segment seg{at, std::vector<double>(u.size(), 0.0)};
    seg.direction[i] = u[i];
    path.push_back(seg);
    at[i] = u[i];
  }
  return integrate_sigma(potential, path, settings, seed);
}

// ---------------------------------------------------------------- convexity

ConvexityReport convexity_probe(const std::vector<ConvexityPair>& pairs,
                                const GradientOracle& oracle) {
  if (pairs.size() < 20) throw InvalidArgument("convexity probe needs at least 20 pairs");
  ConvexityReport rep;
  rep.pairs = pairs;
  rep.c1 = std::numeric_limits<double>::infinity();
  rep.c2 = -std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    if (p.u.size() != p.v.size() || p.u.empty()) {
      throw InvalidArgument("convexity pair has mismatched dimensions");
    }
    double dist2 = 0.0;
    for (std::size_t i = 0; i < p.u.size(); ++i) dist2 += (p.u[i] - p.v[i]) * (p.u[i] - p.v[i]);
    if (dist2 == 0.0) throw InvalidArgument("convexity pair with u == v");
  }
  for (const auto& p : pairs) {
    const VectorEstimate gu = oracle(p.u);
    const VectorEstimate gv = oracle(p.v);
    double dist2 = 0.0, dot = 0.0, var = 0.0;
    for (std::size_t i = 0; i < p.u.size(); ++i) {
      const double du = p.u[i] - p.v[i];
      dist2 += du * du;
      dot += du * (gu.value[i] - gv.value[i]);
      var += du * du * (gu.error[i] * gu.error[i] + gv.error[i] * gv.error[i]);
    }
    const double q = dot / dist2;
    const double e = std::sqrt(var) / dist2;
    rep.quotients.push_back(q);
    rep.errors.push_back(e);
    if (!std::isfinite(q)) {
      rep.all_finite = false;
      continue;
    }
    if (q <= 0.0) ++rep.non_positive;
    if (q < rep.c1) {
      rep.c1 = q;
      rep.c1_error = e;
    }
    if (q > rep.c2) {
      rep.c2 = q;
      rep.c2_error = e;
    }
  }
  return rep;
}

std::vector<ConvexityPair> random_pairs(int dim, double lower, double upper, std::size_t count,
                                        std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<ConvexityPair> out;
  std::uint64_t draw = 0;
  while (out.size() < count) {
    ConvexityPair p{std::vector<double>(dim), std::vector<double>(dim)};
    for (int i = 0; i < dim; ++i) {
      const auto [a, b] = rng.uniform2(draw, CounterRng::slot(i, CounterRng::Lane::kAux));
      p.u[i] = lower + (upper - lower) * a;
      p.v[i] = lower + (upper - lower) * b;
    }
    ++draw;
    if (p.u != p.v) out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::uint64_t point_hash(const std::vector<double>& u) {
  std::uint64_t h = 1469598103934665603ull;
  for (double c : u) {
    std::uint64_t bits;
    std::memcpy(&bits, &c, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace

GradientOracle direct_oracle(const Potential& potential, int side,
                             const SamplerSettings& settings, std::uint64_t seed) {
  auto cache = std::make_shared<std::map<std::vector<double>, VectorEstimate>>();
  auto mutex = std::make_shared<std::mutex>();
  return [=](const std::vector<double>& u) {
    {
      std::lock_guard lock(*mutex);
      const auto it = cache->find(u);
      if (it != cache->end()) return it->second;
    }
    VectorEstimate g = grad_sigma(potential, side, u, settings, derive_seed(seed, point_hash(u)));
    std::lock_guard lock(*mutex);
    return cache->emplace(u, std::move(g)).first->second;
  };
}

// ---------------------------------------------------------------- flux decomposition

FluxDecomposition decompose_flux(const Potential& potential, int side,
                                 const std::vector<double>& u, const SamplerSettings& settings,
                                 std::uint64_t seed) {
  const int d = static_cast<int>(u.size());
  auto lattice = std::make_shared<const TorusLattice>(side, d);
  GibbsSampler sampler(lattice, potential, u, settings, seed);
  const auto& rule = gauss_legendre(8);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const auto reports = estimate(
      sampler, static_cast<std::size_t>(4 * d),
      [&](const TiltedPeriodicSystem& s, std::vector<double>& v) {
        const auto& lat = s.lattice();
        const auto& phi = s.heights();
        const double inv = 1.0 / static_cast<double>(lat.num_sites());
        for (int i = 0; i < d; ++i) {
          double a_ii = 0.0, a_i = 0.0, flux = 0.0;
          for (std::size_t x = 0; x < lat.num_sites(); ++x) {
            const double eta = phi[lat.neighbor(x, i, +1)] - phi[x] + u[i];
            double inner = 0.0;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
              const double lambda = 0.5 * (rule.nodes[k] + 1.0);
              inner += 0.5 * rule.weights[k] * potential.v0_second(eta - lambda * u[i]);
            }
            lo = std::min(lo, inner);
            hi = std::max(hi, inner);
            a_ii += inner;
            a_i += potential.v0_first(eta - u[i]) + potential.g_first(eta);
            flux += potential.first(eta);
          }
          v[4 * i + 0] = a_ii * inv;
          v[4 * i + 1] = a_i * inv;
          v[4 * i + 2] = flux * inv;
          v[4 * i + 3] = (a_ii * u[i] + a_i) * inv;
        }
      });
  FluxDecomposition out;
  out.tilt = u;
  for (int i = 0; i < d; ++i) {
    out.a_diag.push_back(reports[4 * i + 0]);
    out.a_vec.push_back(reports[4 * i + 1]);
    out.flux.push_back(reports[4 * i + 2]);
    out.reconstructed.push_back(reports[4 * i + 3]);
  }
  out.min_sample_diag = lo;
  out.max_sample_diag = hi;
  return out;
}

// ---------------------------------------------------------------- tables

SurfaceTensionTable::SurfaceTensionTable(int dim, double lower, double step, int count)
    : dim_(dim), lower_(lower), step_(step), count_(count) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("table dimension out of range");
  if (!(step > 0.0) || count < 2) throw InvalidArgument("table needs a positive step and two nodes");
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(count);
  sigma_.assign(n, 0.0);
  sigma_err_.assign(n, 0.0);
  grad_.assign(n * dim, 0.0);
  grad_err_.assign(n * dim, 0.0);
}

SurfaceTensionTable::SurfaceTensionTable(const SurfaceTensionTable& o)
    : dim_(o.dim_), lower_(o.lower_), step_(o.step_), count_(o.count_), sigma_(o.sigma_),
      sigma_err_(o.sigma_err_), grad_(o.grad_), grad_err_(o.grad_err_),
      provenance_(o.provenance_) {}

SurfaceTensionTable& SurfaceTensionTable::operator=(const SurfaceTensionTable& o) {
  if (this != &o) {
    dim_ = o.dim_;
    lower_ = o.lower_;
    step_ = o.step_;
    count_ = o.count_;
    sigma_ = o.sigma_;
    sigma_err_ = o.sigma_err_;
    grad_ = o.grad_;
    grad_err_ = o.grad_err_;
    provenance_ = o.provenance_;
    reset_counters();
  }
  return *this;
}

std::vector<int> SurfaceTensionTable::node_multi(std::size_t k) const {
  std::vector<int> j(dim_);
  for (int i = dim_ - 1; i >= 0; --i) {
    j[i] = static_cast<int>(k % count_);
    k /= count_;
  }
  return j;
}

std::size_t SurfaceTensionTable::node_index(const std::vector<int>& j) const {
  std::size_t k = 0;
  for (int i = 0; i < dim_; ++i) k = k * count_ + static_cast<std::size_t>(j[i]);
  return k;
}

std::vector<double> SurfaceTensionTable::node(std::size_t k) const {
  const auto j = node_multi(k);
  std::vector<double> u(dim_);
  for (int i = 0; i < dim_; ++i) u[i] = lower_ + j[i] * step_;
  return u;
}

bool SurfaceTensionTable::interpolate(const double* u, double* out) const {
  bool clamped = false;
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int i = 0; i < dim_; ++i) {
    double s = (u[i] - lower_) / step_;
    if (!(s >= 0.0)) {
      clamped = clamped || s < -1e-12 || std::isnan(s);
      s = 0.0;
    } else if (s > count_ - 1) {
      clamped = clamped || s > count_ - 1 + 1e-12;
      s = count_ - 1;
    }
    base[i] = std::min(static_cast<int>(s), count_ - 2);
    frac[i] = s - base[i];
  }
  for (int c = 0; c < dim_; ++c) out[c] = 0.0;
  std::vector<int> j(dim_);
  for (int corner = 0; corner < (1 << dim_); ++corner) {
    double w = 1.0;
    for (int i = 0; i < dim_; ++i) {
      const int bit = (corner >> i) & 1;
      j[i] = base[i] + bit;
      w *= bit ? frac[i] : 1.0 - frac[i];
    }
    if (w == 0.0) continue;
    const std::size_t k = node_index(j);
    for (int c = 0; c < dim_; ++c) out[c] += w * grad_[k * dim_ + c];
  }
  ++queries_;
  if (clamped) ++clamps_;
  return clamped;
}

VectorEstimate SurfaceTensionTable::interpolate(const std::vector<double>& u) const {
  if (static_cast<int>(u.size()) != dim_) throw InvalidArgument("query dimension mismatch");
  VectorEstimate out{std::vector<double>(dim_), std::vector<double>(dim_, 0.0)};
  interpolate(u.data(), out.value.data());
  // error of the nearest node as a representative bar
  std::vector<int> j(dim_);
  for (int i = 0; i < dim_; ++i) {
    j[i] = std::clamp(static_cast<int>(std::lround((u[i] - lower_) / step_)), 0, count_ - 1);
  }
  const std::size_t k = node_index(j);
  for (int c = 0; c < dim_; ++c) out.error[c] = grad_err_[k * dim_ + c];
  return out;
}

double SurfaceTensionTable::lipschitz_estimate() const {
  double lip = 0.0;
  for (std::size_t k = 0; k < num_nodes(); ++k) {
    auto j = node_multi(k);
    for (int i = 0; i < dim_; ++i) {
      if (j[i] + 1 >= count_) continue;
      ++j[i];
      const std::size_t n = node_index(j);
      --j[i];
      double diff = 0.0;
      for (int c = 0; c < dim_; ++c) {
        const double g = grad(n, c) - grad(k, c);
        diff += g * g;
      }
      lip = std::max(lip, std::sqrt(diff) / step_);
    }
  }
  return lip;
}

ConvexityReport SurfaceTensionTable::convexity() const {
  ConvexityReport rep;
  rep.c1 = std::numeric_limits<double>::infinity();
  rep.c2 = -std::numeric_limits<double>::infinity();
  auto add = [&](std::size_t a, std::size_t b) {
    const auto u = node(a);
    const auto v = node(b);
    double dist2 = 0.0, dot = 0.0, var = 0.0;
    for (int i = 0; i < dim_; ++i) {
      const double du = u[i] - v[i];
      dist2 += du * du;
      dot += du * (grad(a, i) - grad(b, i));
      var += du * du * (grad_error(a, i) * grad_error(a, i) + grad_error(b, i) * grad_error(b, i));
    }
    const double q = dot / dist2;
    const double e = std::sqrt(var) / dist2;
    rep.pairs.push_back({u, v});
    rep.quotients.push_back(q);
    rep.errors.push_back(e);
    if (!std::isfinite(q)) {
      rep.all_finite = false;
      return;
    }
    if (q <= 0.0) ++rep.non_positive;
    if (q < rep.c1) {
      rep.c1 = q;
      rep.c1_error = e;
    }
    if (q > rep.c2) {
      rep.c2 = q;
      rep.c2_error = e;
    }
  };
  for (std::size_t k = 0; k < num_nodes(); ++k) {
    auto j = node_multi(k);
    for (int i = 0; i < dim_; ++i) {
      if (j[i] + 1 >= count_) continue;
      ++j[i];
      add(node_index(j), k);
      --j[i];
    }
    // diagonal neighbour couples the components
    bool inside = true;
    for (int i = 0; i < dim_; ++i) inside = inside && j[i] + 1 < count_;
    if (dim_ >= 2 && inside) {
      for (int i = 0; i < dim_; ++i) ++j[i];
      add(node_index(j), k);
    }
  }
  return rep;
}

namespace {

struct GridShape {
  int count = 0;
  int origin = 0;
};

GridShape check_grid(const TableGrid& grid) {
  if (grid.dim < 1 || grid.dim > kMaxDim) throw InvalidArgument("table dimension out of range");
  if (!(grid.step > 0.0) || !(grid.upper > grid.lower)) {
    throw InvalidArgument("table grid needs lower < upper and a positive step");
  }
  const double n = (grid.upper - grid.lower) / grid.step;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
    throw InvalidArgument("table step must divide the grid range");
  }
  const double o = -grid.lower / grid.step;
  if (grid.lower > 0.0 || grid.upper < 0.0 ||
      std::abs(o - std::round(o)) > 1e-9 * std::max(1.0, std::abs(o))) {
    throw InvalidArgument("the origin must be a node of the table grid");
  }
  return {static_cast<int>(std::lround(n)) + 1, static_cast<int>(std::lround(o))};
}

/// sigma at every node by trapezoid sums of grad sigma along grid lines,
/// axis 0 first, starting at the origin node.
void integrate_table(SurfaceTensionTable& t, int origin) {
  const int d = t.dim();
  const double h = t.step();
  for (std::size_t k = 0; k < t.num_nodes(); ++k) {
    const auto target = t.node_multi(k);
    std::vector<int> at(d, origin);
    double value = 0.0;
    double var = 0.0;
    for (int i = 0; i < d; ++i) {
      const int dir = target[i] >= origin ? 1 : -1;
      while (at[i] != target[i]) {
        const std::size_t a = t.node_index(at);
        at[i] += dir;
        const std::size_t b = t.node_index(at);
        value += dir * 0.5 * h * (t.grad(a, i) + t.grad(b, i));
        var += 0.25 * h * h * (t.grad_error(a, i) * t.grad_error(a, i) +
                               t.grad_error(b, i) * t.grad_error(b, i));
      }
    }
    t.sigma(k) = value;
    t.sigma_error(k) = std::sqrt(var);
  }
}

}  // namespace

SurfaceTensionTable build_table(const Potential& potential, int side, const TableGrid& grid,
                                const SamplerSettings& settings, std::uint64_t seed) {
  const GridShape shape = check_grid(grid);
  SurfaceTensionTable t(grid.dim, grid.lower, grid.step, shape.count);
  parallel_for(t.num_nodes(), [&](std::size_t k) {
    const VectorEstimate g =
        grad_sigma(potential, side, t.node(k), settings, derive_seed(seed, k));
    for (int i = 0; i < grid.dim; ++i) {
      t.grad(k, i) = g.value[i];
      t.grad_error(k, i) = g.error[i];
    }
  });
  integrate_table(t, shape.origin);
  t.provenance().potential = potential.name();
  t.provenance().side = side;
  t.provenance().sweeps = settings.sweeps;
  t.provenance().seed = seed;
  return t;
}

SurfaceTensionTable gaussian_table(const TableGrid& grid) {
  const GridShape shape = check_grid(grid);
  SurfaceTensionTable t(grid.dim, grid.lower, grid.step, shape.count);
  for (std::size_t k = 0; k < t.num_nodes(); ++k) {
    const auto u = t.node(k);
    double s = 0.0;
    for (int i = 0; i < grid.dim; ++i) {
      t.grad(k, i) = u[i];
      s += u[i] * u[i];
    }
    t.sigma(k) = 0.5 * s;
  }
  t.provenance().potential = "gaussian";
  return t;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw FormatError("trailing characters in number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("malformed number '" + s + "'");
  }
}

}  // namespace

void write_table_csv(std::ostream& out, const SurfaceTensionTable& t) {
  const auto& p = t.provenance();
  out << "# gradphi sigma-table v1\n";
  out << "# potential=" << p.potential << " side=" << p.side << " sweeps=" << p.sweeps
      << " seed=" << p.seed << " config_hash=" << (p.config_hash.empty() ? "-" : p.config_hash)
      << '\n';
  out << "dim,lower,step,count\n";
  out << t.dim() << ',' << fmt(t.lower()) << ',' << fmt(t.step()) << ',' << t.count() << '\n';
  for (int i = 0; i < t.dim(); ++i) out << 'u' << i + 1 << ',';
  out << "sigma,sigma_err";
  for (int i = 0; i < t.dim(); ++i) out << ",dsigma" << i + 1;
  for (int i = 0; i < t.dim(); ++i) out << ",dsigma" << i + 1 << "_err";
  out << '\n';
  for (std::size_t k = 0; k < t.num_nodes(); ++k) {
    for (double c : t.node(k)) out << fmt(c) << ',';
    out << fmt(t.sigma(k)) << ',' << fmt(t.sigma_error(k));
    for (int i = 0; i < t.dim(); ++i) out << ',' << fmt(t.grad(k, i));
    for (int i = 0; i < t.dim(); ++i) out << ',' << fmt(t.grad_error(k, i));
    out << '\n';
  }
}

SurfaceTensionTable read_table_csv(std::istream& in) {
  std::string line;
  TableProvenance prov;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::stringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "potential") prov.potential = val;
        else if (key == "side") prov.side = std::stoi(val);
        else if (key == "sweeps") prov.sweeps = std::stoull(val);
        else if (key == "seed") prov.seed = std::stoull(val);
        else if (key == "config_hash" && val != "-") prov.config_hash = val;
      }
      continue;
    }
    rows.push_back(line);
  }
  if (rows.size() < 3 || rows[0] != "dim,lower,step,count") {
    throw FormatError("sigma table: missing 'dim,lower,step,count' header");
  }
  const auto shape = split_csv(rows[1]);
  if (shape.size() != 4) throw FormatError("sigma table: malformed shape row");
  const int dim = static_cast<int>(parse_double(shape[0]));
  const int count = static_cast<int>(parse_double(shape[3]));
  SurfaceTensionTable t(dim, parse_double(shape[1]), parse_double(shape[2]), count);
  t.provenance() = prov;
  const std::size_t width = static_cast<std::size_t>(dim) * 3 + 2;
  if (split_csv(rows[2]).size() != width) throw FormatError("sigma table: wrong column header");
  if (rows.size() - 3 != t.num_nodes()) {
    throw FormatError("sigma table: expected " + std::to_string(t.num_nodes()) + " rows, found " +
                      std::to_string(rows.size() - 3));
  }
  for (std::size_t k = 0; k < t.num_nodes(); ++k) {
    const auto cells = split_csv(rows[k + 3]);
    if (cells.size() != width) throw FormatError("sigma table: wrong number of columns");
    const auto u = t.node(k);
    for (int i = 0; i < dim; ++i) {
      if (std::abs(parse_double(cells[i]) - u[i]) > 1e-9 * std::max(1.0, std::abs(u[i]))) {
        throw FormatError("sigma table: rows are not in grid order");
      }
    }
    t.sigma(k) = parse_double(cells[dim]);
    t.sigma_error(k) = parse_double(cells[dim + 1]);
    for (int i = 0; i < dim; ++i) {
      t.grad(k, i) = parse_double(cells[dim + 2 + i]);
      t.grad_error(k, i) = parse_double(cells[2 * dim + 2 + i]);
    }
  }
  return t;
}

}  // namespace gradphi
