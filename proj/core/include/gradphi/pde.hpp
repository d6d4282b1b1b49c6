#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gradphi/cell_field.hpp"
#include "gradphi/fields.hpp"
#include "gradphi/surface.hpp"

namespace gradphi {

/// Cell-centred grid for the macroscopic problem: cell centres at j / M,
/// covering the bounding box of D with `margin` extra cells on every side.
/// Cells whose centre lies in open D are unknowns; all others hold f.
class PdeGrid {
 public:
  PdeGrid(DomainSpec domain, int cells_per_unit, ScalarFunction boundary, int margin = 2);

  const DomainSpec& domain() const noexcept { return domain_; }
  int cells_per_unit() const noexcept { return m_; }
  double spacing() const noexcept { return 1.0 / m_; }
  int dim() const noexcept { return domain_.dim(); }
  const ScalarFunction& boundary() const noexcept { return boundary_; }

  /// Layout with every cell at f(centre).
  const CellField& boundary_field() const noexcept { return base_; }
  bool is_interior(std::size_t cell) const noexcept { return interior_[cell] != 0; }
  std::span<const std::size_t> interior_cells() const noexcept { return interior_list_; }

  /// Neighbour in direction sign along axis; always inside the layout for
  /// interior cells and their neighbours.
  std::size_t neighbor(std::size_t cell, int axis, int sign) const noexcept;

 private:
  DomainSpec domain_;
  int m_;
  ScalarFunction boundary_;
  CellField base_;
  std::vector<char> interior_;
  std::vector<std::size_t> interior_list_;
  std::array<std::size_t, kMaxDim> stride_{};
};

/// Source of the macroscopic flux grad sigma(p).
class FluxProvider {
 public:
  virtual ~FluxProvider() = default;
  virtual void flux(const double* p, int dim, double* out) const = 0;
  /// Monotonicity bounds C1 <= (p - q).(F(p) - F(q)) / |p - q|^2 <= C2.
  virtual double c1() const = 0;
  virtual double c2() const = 0;
  virtual std::string describe() const = 0;
  /// Fraction of queries clamped into a table box (0 for closed forms).
  virtual std::size_t queries() const { return 0; }
  virtual std::size_t clamps() const { return 0; }
  virtual void reset_counters() const {}
  /// True when F(p) only depends on p_i in component i (skips transverse gradients).
  virtual bool diagonal() const { return false; }
};

/// grad sigma(p) = c p, the Gaussian model for c = 1.
class LinearFlux final : public FluxProvider {
 public:
  explicit LinearFlux(double slope = 1.0);
  void flux(const double* p, int dim, double* out) const override;
  double c1() const override { return slope_; }
  double c2() const override { return slope_; }
  std::string describe() const override;
  bool diagonal() const override { return true; }

 private:
  double slope_;
};

/// Multilinear interpolation in a surface tension table; C1 and C2 come from
/// the table's neighbour quotients and C1 must be positive.
class TableFlux final : public FluxProvider {
 public:
  explicit TableFlux(std::shared_ptr<const SurfaceTensionTable> table);
  void flux(const double* p, int dim, double* out) const override;
  double c1() const override { return c1_; }
  double c2() const override { return c2_; }
  std::string describe() const override;
  std::size_t queries() const override { return table_->queries(); }
  std::size_t clamps() const override { return table_->clamps(); }
  void reset_counters() const override { table_->reset_counters(); }

 private:
  std::shared_ptr<const SurfaceTensionTable> table_;
  double c1_ = 0.0;
  double c2_ = 0.0;
};

struct PdeSnapshot {
  double time = 0.0;
  CellField h;
};

struct PdeSolution {
  double time = 0.0;
  CellField h;
  std::size_t steps = 0;
  double dt = 0.0;
  std::string flux_source;
  double bound = 0.0;            ///< max(max|h0|, max|f|)
  double max_abs = 0.0;          ///< largest |h| seen on any step
  std::size_t linf_violations = 0;
  std::vector<PdeSnapshot> snapshots;
};

/// Explicit flux-form solver of dh/dt = div grad sigma(grad h). Face fluxes
/// use the two-point normal difference and averaged centred transverse
/// differences. dt <= 0 selects the largest CFL-stable step dx^2 / (2d C2);
/// a larger dt throws CflViolation. Snapshots are taken at each requested
/// time (ascending, <= horizon); the last step is shortened to land on it.
PdeSolution solve(const PdeGrid& grid, const ScalarFunction& initial, const FluxProvider& flux,
                  double horizon, double dt = 0.0, std::vector<double> snapshot_times = {});

/// Integral over D of (a - b)^2 on the common refinement of the two grids.
double l2_compare(const CellField& a, const CellField& b, const DomainSpec& domain);

/// sum over interior cells of dx^d (h - exact(centre))^2.
double grid_l2_error_squared(const PdeGrid& grid, const CellField& h,
                             const ScalarFunction& exact);

/// Heat equation on (lo, hi) with zero Dirichlet data, by sine series.
class HeatSeries {
 public:
  HeatSeries(const std::function<double(double)>& initial, double lo, double hi, int modes = 400,
             double support_lo = 0.0, double support_hi = 0.0);
  double operator()(double t, double theta) const;

 private:
  double lo_, hi_;
  std::vector<double> coeff_;
};

/// Smooth bump amplitude (1 - |theta - c|^2 / r^2)^3 inside the ball, 0 outside.
ScalarFunction bump(int dim, Point center, double radius, double amplitude = 1.0);

void write_snapshot_csv(std::ostream& out, const PdeGrid& grid, const CellField& h, double t);

}  // namespace gradphi
