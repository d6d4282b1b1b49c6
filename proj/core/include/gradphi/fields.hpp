#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gradphi/geometry.hpp"

namespace gradphi {

/// Heights phi(x), one per site of a lattice in that lattice's site order.
struct HeightField {
  std::vector<double> values;

  HeightField() = default;
  explicit HeightField(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit HeightField(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) noexcept { return values[i]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }
  bool operator==(const HeightField&) const = default;
};

/// Bond variables eta(b), one per directed bond of a bond list.
struct GradientField {
  std::vector<double> values;

  GradientField() = default;
  explicit GradientField(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit GradientField(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) noexcept { return values[i]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }
  bool operator==(const GradientField&) const = default;
};

/// Macroscopic scalar function on R^d.
using ScalarFunction = std::function<double(const Point&)>;

GradientField gradient(std::span<const Bond> bonds, const HeightField& phi);
GradientField gradient(const TorusLattice& lattice, const HeightField& phi);
/// Gradient on the closure bonds of the domain.
GradientField gradient(const DiscretizedDomain& domain, const HeightField& phi);

/// Signed loop sums around every elementary square (x, x+e_i, x+e_i+e_j, x+e_j),
/// ordered by base site then axis pair (i < j). Empty in d = 1.
std::vector<double> plaquette_sums(const TorusLattice& lattice, const GradientField& eta);
/// Sum of eta along the closed line through the origin in each axis direction.
std::vector<double> winding_sums(const TorusLattice& lattice, const GradientField& eta);
/// max_b |eta(b) + eta(reverse b)|.
double antisymmetry_defect(const TorusLattice& lattice, const GradientField& eta);

/// Recover phi with phi(origin) = base. Throws NotIntegrable when a plaquette
/// or winding sum exceeds 1e-9 * max(1, max|eta|).
HeightField integrate_gradient(const TorusLattice& lattice, const GradientField& eta,
                               double base);
/// Same on the closure bonds of a domain; the chain starts at the origin site.
HeightField integrate_gradient(const DiscretizedDomain& domain, const GradientField& eta,
                               double base);

/// psi^N(x) = N^{d+1} * integral of f over B(x/N, 1/N), i.e. N times the cell
/// average, by 5-point Gauss-Legendre per axis.
HeightField boundary_height(const ScalarFunction& f, int scale, int dim,
                            std::span<const Coord> sites);
HeightField boundary_height(const ScalarFunction& f, const DiscretizedDomain& domain);

/// Cell average of f over B(x/N, 1/N) (same quadrature, without the factor N).
double cell_average(const ScalarFunction& f, const Coord& site, int scale, int dim);

// ---------------------------------------------------------------- serialization

enum class FieldKind { kHeight, kGradient };

struct FieldHeader {
  int dim = 1;
  int side = 0;
  FieldKind kind = FieldKind::kHeight;
  std::size_t count = 0;
};

/// Field file contents: header plus per-row coordinates (sites or bond base
/// sites with axis/sign) and values, in file order.
struct FieldTable {
  FieldHeader header;
  std::vector<Coord> coords;
  std::vector<int> axes;
  std::vector<int> signs;
  std::vector<double> values;
};

void write_field_csv(std::ostream& out, const TorusLattice& lattice, const HeightField& phi);
void write_field_csv(std::ostream& out, const TorusLattice& lattice, const GradientField& eta);
void write_field_csv(std::ostream& out, const DiscretizedDomain& domain, const HeightField& phi);
FieldTable read_field_csv(std::istream& in);

/// Binary layout (little endian): "GPHF", u32 version=1, u32 dim, u32 side,
/// u32 kind (0 height, 1 gradient), u64 count, then count float64 values in
/// the lattice's site or bond order.
void write_field_binary(std::ostream& out, const TorusLattice& lattice, const HeightField& phi);
void write_field_binary(std::ostream& out, const TorusLattice& lattice, const GradientField& eta);
FieldTable read_field_binary(std::istream& in);

/// Validate a table against a torus and extract the values.
HeightField height_from_table(const FieldTable& table, const TorusLattice& lattice);
GradientField gradient_from_table(const FieldTable& table, const TorusLattice& lattice);

}  // namespace gradphi
