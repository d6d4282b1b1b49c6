#include "gradphi/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "gradphi/errors.hpp"
#include "gradphi/quadrature.hpp"

namespace gradphi {

PdeGrid::PdeGrid(DomainSpec domain, int cells_per_unit, ScalarFunction boundary, int margin)
    : domain_(std::move(domain)), m_(cells_per_unit), boundary_(std::move(boundary)) {
  if (m_ < 2) throw InvalidArgument("PDE grid needs at least 2 cells per unit length");
  if (margin < 2) throw InvalidArgument("PDE grid margin must be at least 2 cells");
  const int d = domain_.dim();
  const BoxShape bb = domain_.bounding_box();
  Point lower{};
  std::array<int, kMaxDim> counts{1, 1, 1};
  for (int i = 0; i < d; ++i) {
    const int lo = static_cast<int>(std::floor(bb.lower[i] * m_)) - margin;
    const int hi = static_cast<int>(std::ceil(bb.upper[i] * m_)) + margin;
    lower[i] = (lo - 0.5) / m_;
    counts[i] = hi - lo + 1;
  }
  base_ = CellField(d, lower, 1.0 / m_, counts);
  stride_ = {1, 1, 1};
  for (int i = d - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * counts[i + 1];
  interior_.assign(base_.size(), 0);
  for (std::size_t k = 0; k < base_.size(); ++k) {
    const Point c = base_.center(k);
    base_.values()[k] = boundary_(c);
    if (domain_.contains(c)) {
      interior_[k] = 1;
      interior_list_.push_back(k);
    }
  }
  if (interior_list_.empty()) throw EmptyInterior("no PDE cell centre lies inside the domain");
}

std::size_t PdeGrid::neighbor(std::size_t cell, int axis, int sign) const noexcept {
  return sign > 0 ? cell + stride_[axis] : cell - stride_[axis];
}

// ---------------------------------------------------------------- fluxes

LinearFlux::LinearFlux(double slope) : slope_(slope) {
  if (!(slope > 0.0)) throw InvalidArgument("linear flux needs a positive slope");
}

void LinearFlux::flux(const double* p, int dim, double* out) const {
  for (int i = 0; i < dim; ++i) out[i] = slope_ * p[i];
}

std::string LinearFlux::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "linear(%g)", slope_);
  return buf;
}

TableFlux::TableFlux(std::shared_ptr<const SurfaceTensionTable> table) : table_(std::move(table)) {
  const ConvexityReport rep = table_->convexity();
  if (!rep.all_finite || !(rep.c1 > 0.0)) {
    throw InvalidArgument("surface tension table is not strictly convex (C1 = " +
                          std::to_string(rep.c1) + ")");
  }
  c1_ = rep.c1;
  c2_ = rep.c2;
}

void TableFlux::flux(const double* p, int dim, double* out) const {
  if (dim != table_->dim()) throw InvalidArgument("table dimension does not match the PDE");
  table_->interpolate(p, out);
}

std::string TableFlux::describe() const {
  return "table(" + table_->provenance().potential + ", N=" +
         std::to_string(table_->provenance().side) + ")";
}

// ---------------------------------------------------------------- solver

namespace {

class Stepper {
 public:
  Stepper(const PdeGrid& grid, const FluxProvider& flux) : grid_(grid), flux_(flux) {}

  /// Flux component `axis` across the face between a and b = a + e_axis.
  double face_flux(const std::vector<double>& h, std::size_t a, int axis) const {
    const int d = grid_.dim();
    const double dx = grid_.spacing();
    const std::size_t b = grid_.neighbor(a, axis, +1);
    double p[kMaxDim] = {0.0, 0.0, 0.0};
    double f[kMaxDim];
    p[axis] = (h[b] - h[a]) / dx;
    if (!flux_.diagonal()) {
      for (int j = 0; j < d; ++j) {
        if (j == axis) continue;
        const double ga = h[grid_.neighbor(a, j, +1)] - h[grid_.neighbor(a, j, -1)];
        const double gb = h[grid_.neighbor(b, j, +1)] - h[grid_.neighbor(b, j, -1)];
        p[j] = 0.25 * (ga + gb) / dx;
      }
    }
    flux_.flux(p, d, f);
    return f[axis];
  }

  void step(std::vector<double>& h, std::vector<double>& scratch, double dt) const {
    const int d = grid_.dim();
    const double ratio = dt / grid_.spacing();
    scratch = h;
    for (std::size_t c : grid_.interior_cells()) {
      double div = 0.0;
      for (int i = 0; i < d; ++i) {
        div += face_flux(h, c, i) - face_flux(h, grid_.neighbor(c, i, -1), i);
      }
      scratch[c] = h[c] + ratio * div;
    }
    h.swap(scratch);
  }

 private:
  const PdeGrid& grid_;
  const FluxProvider& flux_;
};

}  // namespace

PdeSolution solve(const PdeGrid& grid, const ScalarFunction& initial, const FluxProvider& flux,
                  double horizon, double dt, std::vector<double> snapshot_times) {
  if (!(horizon >= 0.0)) throw InvalidArgument("PDE horizon must be non-negative");
  const int d = grid.dim();
  const double dx = grid.spacing();
  const double cap = dx * dx / (2.0 * d * flux.c2());
  if (dt <= 0.0) {
    dt = cap;
  } else if (dt > cap * (1.0 + 1e-12)) {
    throw CflViolation("PDE step " + std::to_string(dt) + " exceeds the CFL bound " +
                       std::to_string(cap));
  }
  std::sort(snapshot_times.begin(), snapshot_times.end());
  for (double t : snapshot_times) {
    if (t < 0.0 || t > horizon * (1.0 + 1e-12)) {
      throw InvalidArgument("snapshot time outside [0, horizon]");
    }
  }

  PdeSolution sol;
  sol.dt = dt;
  sol.flux_source = flux.describe();
  sol.h = grid.boundary_field();
  std::vector<double>& h = sol.h.values();
  for (double v : h) sol.bound = std::max(sol.bound, std::abs(v));
  for (std::size_t c : grid.interior_cells()) {
    h[c] = initial(sol.h.center(c));
    sol.bound = std::max(sol.bound, std::abs(h[c]));
  }
  sol.max_abs = sol.bound;

  flux.reset_counters();
  const Stepper stepper(grid, flux);
  std::vector<double> scratch;
  std::vector<double> targets = snapshot_times;
  targets.push_back(horizon);
  double t = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double target = targets[k];
    while (target - t > 1e-13 * std::max(1.0, target)) {
      const double step = std::min(dt, target - t);
      stepper.step(h, scratch, step);
      ++sol.steps;
      t = (step == target - t) ? target : t + step;
      double m = 0.0;
      for (std::size_t c : grid.interior_cells()) {
        if (!std::isfinite(h[c])) throw NonFinite("PDE solution became non-finite");
        m = std::max(m, std::abs(h[c]));
      }
      sol.max_abs = std::max(sol.max_abs, m);
      if (m > sol.bound * (1.0 + 1e-12) + 1e-300) ++sol.linf_violations;
    }
    t = target;
    if (k + 1 < targets.size()) sol.snapshots.push_back({target, sol.h});
  }
  sol.time = horizon;
  if (flux.queries() > 0 && static_cast<double>(flux.clamps()) > 1e-3 * flux.queries()) {
    throw FluxRangeExceeded("table clamped " + std::to_string(flux.clamps()) + " of " +
                            std::to_string(flux.queries()) +
                            " flux queries; widen the surface tension grid");
  }
  return sol;
}

double l2_compare(const CellField& a, const CellField& b, const DomainSpec& domain) {
  return l2_distance_squared(a, b, domain);
}

double grid_l2_error_squared(const PdeGrid& grid, const CellField& h,
                             const ScalarFunction& exact) {
  const double vol = std::pow(grid.spacing(), grid.dim());
  double acc = 0.0;
  for (std::size_t c : grid.interior_cells()) {
    const double e = h.values()[c] - exact(h.center(c));
    acc += vol * e * e;
  }
  return acc;
}

// ---------------------------------------------------------------- oracles and data

HeatSeries::HeatSeries(const std::function<double(double)>& initial, double lo, double hi,
                       int modes, double support_lo, double support_hi)
    : lo_(lo), hi_(hi), coeff_(modes) {
  if (!(hi > lo) || modes < 1) throw InvalidArgument("invalid heat series interval");
  if (!(support_hi > support_lo)) {
    support_lo = lo;
    support_hi = hi;
  }
  const double len = hi - lo;
  const auto& rule = gauss_legendre(16);
  const int panels = 400;
  for (int k = 1; k <= modes; ++k) {
    const double w = k * std::numbers::pi / len;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = support_lo + (support_hi - support_lo) * p / panels;
      const double b = support_lo + (support_hi - support_lo) * (p + 1) / panels;
      acc += rule.integrate([&](double x) { return initial(x) * std::sin(w * (x - lo)); }, a, b);
    }
    coeff_[k - 1] = 2.0 / len * acc;
  }
}

double HeatSeries::operator()(double t, double theta) const {
  const double len = hi_ - lo_;
  double acc = 0.0;
  for (std::size_t k = 1; k <= coeff_.size(); ++k) {
    const double w = static_cast<double>(k) * std::numbers::pi / len;
    acc += coeff_[k - 1] * std::sin(w * (theta - lo_)) * std::exp(-w * w * t);
  }
  return acc;
}

ScalarFunction bump(int dim, Point center, double radius, double amplitude) {
  if (!(radius > 0.0)) throw InvalidArgument("bump radius must be positive");
  return [=](const Point& p) {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += (p[i] - center[i]) * (p[i] - center[i]);
    const double s = r2 / (radius * radius);
    if (s >= 1.0) return 0.0;
    const double q = 1.0 - s;
    return amplitude * q * q * q;
  };
}

void write_snapshot_csv(std::ostream& out, const PdeGrid& grid, const CellField& h, double t) {
  char buf[40];
  out << "t,cell";
  for (int i = 0; i < grid.dim(); ++i) out << ",theta" << i + 1;
  out << ",value\n";
  for (std::size_t c : grid.interior_cells()) {
    std::snprintf(buf, sizeof buf, "%.17g", t);
    out << buf << ',' << c;
    const Point p = h.center(c);
    for (int i = 0; i < grid.dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", h.values()[c]);
    out << ',' << buf << '\n';
  }
}

}  // namespace gradphi
