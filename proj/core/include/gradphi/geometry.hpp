#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gradphi {

inline constexpr int kMaxDim = 3;

/// Integer lattice coordinates; components beyond the dimension are zero.
using Coord = std::array<int, kMaxDim>;
/// Macroscopic point in R^d; components beyond the dimension are zero.
using Point = std::array<double, kMaxDim>;

/// Directed nearest-neighbour bond b = (x, y) with x = y + sign * e_axis.
/// Gradients are read as eta(b) = phi(x) - phi(y).
struct Bond {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::int8_t axis = 0;
  std::int8_t sign = 1;
};

/// Periodic lattice (Z/NZ)^d. Sites are numbered lexicographically with the
/// first coordinate most significant. Directed bonds are numbered by base
/// site y, then axis, then sign (+ before -): bond (y + s e_i, y).
class TorusLattice {
 public:
  TorusLattice(int side, int dim);

  int side() const noexcept { return side_; }
  int dim() const noexcept { return dim_; }
  std::size_t num_sites() const noexcept { return num_sites_; }
  std::size_t num_bonds() const noexcept { return bonds_.size(); }

  Coord coord(std::size_t site) const noexcept;
  /// Index of a coordinate, wrapping every component modulo N.
  std::size_t index(const Coord& c) const noexcept;
  std::size_t neighbor(std::size_t site, int axis, int sign) const noexcept {
    return neighbors_[(site * dim_ + axis) * 2 + (sign > 0 ? 0 : 1)];
  }

  std::span<const Bond> bonds() const noexcept { return bonds_; }
  std::size_t bond_index(std::size_t base, int axis, int sign) const noexcept {
    return (base * dim_ + axis) * 2 + (sign > 0 ? 0 : 1);
  }
  std::size_t reverse_bond(std::size_t bond) const noexcept;

 private:
  int side_;
  int dim_;
  std::size_t num_sites_;
  std::vector<std::uint32_t> neighbors_;
  std::vector<Bond> bonds_;
};

TorusLattice build_torus(int side, int dim);

/// Axis-aligned box [lower, upper] (closure).
struct BoxShape {
  Point lower{};
  Point upper{};
};

/// Euclidean ball.
struct BallShape {
  Point center{};
  double radius = 0.0;
};

/// Half-space { theta : normal . theta <= offset }.
struct HalfSpaceShape {
  Point normal{};
  double offset = 0.0;
};

using Shape = std::variant<BoxShape, BallShape, HalfSpaceShape>;

/// Macroscopic domain D as an intersection of boxes, balls and half-spaces.
/// Point membership is the open set; cube containment is tested on the
/// closure, which is exact for these convex shapes because a cube lies in a
/// convex set iff all of its corners do.
class DomainSpec {
 public:
  DomainSpec() = default;
  DomainSpec(int dim, std::vector<Shape> shapes);

  static DomainSpec box(int dim, Point lower, Point upper);
  static DomainSpec ball(int dim, Point center, double radius);

  DomainSpec& intersect(Shape shape);

  int dim() const noexcept { return dim_; }
  const std::vector<Shape>& shapes() const noexcept { return shapes_; }

  bool contains(const Point& theta) const noexcept;
  bool contains_closure(const Point& theta) const noexcept;
  /// Closed cube of the given side centred at `center` lies in the closure.
  bool contains_cube(const Point& center, double side) const noexcept;
  /// Bounding box of the bounded shapes; throws if every shape is unbounded.
  BoxShape bounding_box() const;
  /// Lebesgue measure estimated on a fine midpoint grid (used for reporting).
  double volume(int cells_per_axis = 512) const;

  std::string describe() const;

 private:
  int dim_ = 1;
  std::vector<Shape> shapes_;
};

/// D_N = { x in Z^d : B(x/N, 5/N) inside D } plus its boundary layer.
///
/// Sites (interior and boundary layer together) are stored in lexicographic
/// order; `interior()` and `boundary()` list their indices. `inner_bonds()`
/// holds D_N* (both ends interior) and `closure_bonds()` holds all directed
/// bonds touching D_N, each in (base site, axis, sign) order.
class DiscretizedDomain {
 public:
  DiscretizedDomain(const DomainSpec& spec, int scale);

  int scale() const noexcept { return scale_; }
  int dim() const noexcept { return spec_.dim(); }
  const DomainSpec& spec() const noexcept { return spec_; }

  std::size_t num_sites() const noexcept { return sites_.size(); }
  const Coord& coord(std::size_t site) const noexcept { return sites_[site]; }
  bool is_interior(std::size_t site) const noexcept { return interior_flag_[site] != 0; }
  std::span<const std::size_t> interior() const noexcept { return interior_; }
  std::span<const std::size_t> boundary() const noexcept { return boundary_; }

  std::span<const Bond> inner_bonds() const noexcept { return inner_bonds_; }
  std::span<const Bond> closure_bonds() const noexcept { return closure_bonds_; }

  std::optional<std::size_t> find(const Coord& c) const noexcept;
  /// Neighbour of an interior site (always present by construction).
  std::size_t neighbor(std::size_t site, int axis, int sign) const;

  /// Macroscopic centre x/N of a site.
  Point position(std::size_t site) const noexcept;

 private:
  DomainSpec spec_;
  int scale_;
  Coord scan_lower_{};
  Coord scan_extent_{1, 1, 1};
  std::vector<std::int64_t> lookup_;
  std::vector<Coord> sites_;
  std::vector<char> interior_flag_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<Bond> inner_bonds_;
  std::vector<Bond> closure_bonds_;
};

/// Throws EmptyInterior if no site qualifies.
DiscretizedDomain discretize_domain(const DomainSpec& spec, int scale);

}  // namespace gradphi
