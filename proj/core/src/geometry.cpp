#include "gradphi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gradphi/errors.hpp"

namespace gradphi {

// ---------------------------------------------------------------- torus

TorusLattice::TorusLattice(int side, int dim) : side_(side), dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidArgument("torus dimension must be 1, 2 or 3");
  }
  if (side < 2) {
    throw InvalidArgument("torus side length must be at least 2");
  }
  num_sites_ = 1;
  for (int i = 0; i < dim; ++i) num_sites_ *= static_cast<std::size_t>(side);
  if (num_sites_ > (std::size_t{1} << 31)) {
    throw InvalidArgument("torus too large");
  }

  neighbors_.resize(num_sites_ * dim * 2);
  bonds_.resize(num_sites_ * dim * 2);
  for (std::size_t site = 0; site < num_sites_; ++site) {
    const Coord c = coord(site);
    for (int axis = 0; axis < dim; ++axis) {
      for (int sign : {+1, -1}) {
        Coord n = c;
        n[axis] += sign;
        const auto nb = static_cast<std::uint32_t>(index(n));
        const std::size_t slot = bond_index(site, axis, sign);
        neighbors_[slot] = nb;
        bonds_[slot] = Bond{nb, static_cast<std::uint32_t>(site),
                            static_cast<std::int8_t>(axis),
                            static_cast<std::int8_t>(sign)};
      }
    }
  }
}

Coord TorusLattice::coord(std::size_t site) const noexcept {
  Coord c{};
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    c[axis] = static_cast<int>(site % side_);
    site /= side_;
  }
  return c;
}

std::size_t TorusLattice::index(const Coord& c) const noexcept {
  std::size_t idx = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    int v = c[axis] % side_;
    if (v < 0) v += side_;
    idx = idx * side_ + static_cast<std::size_t>(v);
  }
  return idx;
}

std::size_t TorusLattice::reverse_bond(std::size_t bond) const noexcept {
  const Bond& b = bonds_[bond];
  return bond_index(b.x, b.axis, -b.sign);
}

TorusLattice build_torus(int side, int dim) { return TorusLattice(side, dim); }

// ---------------------------------------------------------------- domain spec

namespace {

double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

struct OpenTest {
  int dim;
  const Point& p;
  bool operator()(const BoxShape& s) const {
    for (int i = 0; i < dim; ++i) {
      if (!(p[i] > s.lower[i] && p[i] < s.upper[i])) return false;
    }
    return true;
  }
  bool operator()(const BallShape& s) const {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += (p[i] - s.center[i]) * (p[i] - s.center[i]);
    return r2 < s.radius * s.radius;
  }
  bool operator()(const HalfSpaceShape& s) const { return dot(s.normal, p, dim) < s.offset; }
};

struct ClosedTest {
  int dim;
  const Point& p;
  bool operator()(const BoxShape& s) const {
    for (int i = 0; i < dim; ++i) {
      if (!(p[i] >= s.lower[i] && p[i] <= s.upper[i])) return false;
    }
    return true;
  }
  bool operator()(const BallShape& s) const {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += (p[i] - s.center[i]) * (p[i] - s.center[i]);
    return r2 <= s.radius * s.radius;
  }
  bool operator()(const HalfSpaceShape& s) const { return dot(s.normal, p, dim) <= s.offset; }
};

}  // namespace

DomainSpec::DomainSpec(int dim, std::vector<Shape> shapes)
    : dim_(dim), shapes_(std::move(shapes)) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidArgument("domain dimension must be 1, 2 or 3");
  }
  for (const auto& s : shapes_) {
    if (const auto* b = std::get_if<BallShape>(&s); b && !(b->radius >= 0.0)) {
      throw InvalidArgument("ball radius must be non-negative");
    }
    if (const auto* b = std::get_if<BoxShape>(&s)) {
      for (int i = 0; i < dim; ++i) {
        if (!(b->lower[i] <= b->upper[i])) {
          throw InvalidArgument("box lower corner exceeds upper corner");
        }
      }
    }
  }
}

DomainSpec DomainSpec::box(int dim, Point lower, Point upper) {
  return DomainSpec(dim, {BoxShape{lower, upper}});
}

DomainSpec DomainSpec::ball(int dim, Point center, double radius) {
  return DomainSpec(dim, {BallShape{center, radius}});
}

DomainSpec& DomainSpec::intersect(Shape shape) {
  shapes_.push_back(shape);
  return *this;
}

bool DomainSpec::contains(const Point& theta) const noexcept {
  return std::all_of(shapes_.begin(), shapes_.end(), [&](const Shape& s) {
    return std::visit(OpenTest{dim_, theta}, s);
  });
}

bool DomainSpec::contains_closure(const Point& theta) const noexcept {
  return std::all_of(shapes_.begin(), shapes_.end(), [&](const Shape& s) {
    return std::visit(ClosedTest{dim_, theta}, s);
  });
}

bool DomainSpec::contains_cube(const Point& center, double side) const noexcept {
  const double half = 0.5 * side;
  const int corners = 1 << dim_;
  for (int mask = 0; mask < corners; ++mask) {
    Point corner{};
    for (int i = 0; i < dim_; ++i) {
      corner[i] = center[i] + ((mask >> i) & 1 ? half : -half);
    }
    if (!contains_closure(corner)) return false;
  }
  return true;
}

BoxShape DomainSpec::bounding_box() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoxShape bb;
  for (int i = 0; i < dim_; ++i) {
    bb.lower[i] = -inf;
    bb.upper[i] = inf;
  }
  for (const auto& s : shapes_) {
    if (const auto* b = std::get_if<BoxShape>(&s)) {
      for (int i = 0; i < dim_; ++i) {
        bb.lower[i] = std::max(bb.lower[i], b->lower[i]);
        bb.upper[i] = std::min(bb.upper[i], b->upper[i]);
      }
    } else if (const auto* b = std::get_if<BallShape>(&s)) {
      for (int i = 0; i < dim_; ++i) {
        bb.lower[i] = std::max(bb.lower[i], b->center[i] - b->radius);
        bb.upper[i] = std::min(bb.upper[i], b->center[i] + b->radius);
      }
    }
  }
  for (int i = 0; i < dim_; ++i) {
    if (!std::isfinite(bb.lower[i]) || !std::isfinite(bb.upper[i])) {
      throw InvalidArgument("domain is unbounded; intersect with a box or ball");
    }
  }
  return bb;
}

double DomainSpec::volume(int cells_per_axis) const {
  const BoxShape bb = bounding_box();
  Point h{};
  double cell = 1.0;
  std::size_t total = 1;
  for (int i = 0; i < dim_; ++i) {
    h[i] = (bb.upper[i] - bb.lower[i]) / cells_per_axis;
    cell *= h[i];
    total *= static_cast<std::size_t>(cells_per_axis);
  }
  std::size_t inside = 0;
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    Point p{};
    for (int i = dim_ - 1; i >= 0; --i) {
      p[i] = bb.lower[i] + (static_cast<double>(rest % cells_per_axis) + 0.5) * h[i];
      rest /= cells_per_axis;
    }
    if (contains(p)) ++inside;
  }
  return cell * static_cast<double>(inside);
}

std::string DomainSpec::describe() const {
  std::ostringstream out;
  out << "d=" << dim_;
  for (const auto& s : shapes_) {
    if (const auto* b = std::get_if<BoxShape>(&s)) {
      out << " box[";
      for (int i = 0; i < dim_; ++i) out << (i ? "," : "") << b->lower[i] << ":" << b->upper[i];
      out << "]";
    } else if (const auto* b = std::get_if<BallShape>(&s)) {
      out << " ball(r=" << b->radius << ")";
    } else if (const auto* h = std::get_if<HalfSpaceShape>(&s)) {
      out << " halfspace(offset=" << h->offset << ")";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------- discretized domain

DiscretizedDomain::DiscretizedDomain(const DomainSpec& spec, int scale)
    : spec_(spec), scale_(scale) {
  if (scale < 1) throw InvalidArgument("scale N must be positive");
  const int dim = spec.dim();
  if (!spec.contains_closure(Point{})) {
    throw InvalidArgument("domain must contain the origin");
  }
  const BoxShape bb = spec.bounding_box();

  // Scan window with a margin of three sites so that the boundary layer of
  // every candidate interior site is inside the window.
  std::size_t window = 1;
  for (int i = 0; i < dim; ++i) {
    const int lo = static_cast<int>(std::floor(bb.lower[i] * scale)) - 3;
    const int hi = static_cast<int>(std::ceil(bb.upper[i] * scale)) + 3;
    scan_lower_[i] = lo;
    scan_extent_[i] = hi - lo + 1;
    window *= static_cast<std::size_t>(scan_extent_[i]);
  }

  const double cube_side = 5.0 / scale;
  auto coord_of = [&](std::size_t k) {
    Coord c{};
    for (int i = dim - 1; i >= 0; --i) {
      c[i] = scan_lower_[i] + static_cast<int>(k % scan_extent_[i]);
      k /= scan_extent_[i];
    }
    return c;
  };
  auto window_index = [&](const Coord& c) -> std::optional<std::size_t> {
    std::size_t k = 0;
    for (int i = 0; i < dim; ++i) {
      const int off = c[i] - scan_lower_[i];
      if (off < 0 || off >= scan_extent_[i]) return std::nullopt;
      k = k * scan_extent_[i] + static_cast<std::size_t>(off);
    }
    return k;
  };

  std::vector<char> in_interior(window, 0);
  std::size_t interior_count = 0;
  for (std::size_t k = 0; k < window; ++k) {
    const Coord c = coord_of(k);
    Point center{};
    for (int i = 0; i < dim; ++i) center[i] = static_cast<double>(c[i]) / scale;
    if (spec.contains_cube(center, cube_side)) {
      in_interior[k] = 1;
      ++interior_count;
    }
  }
  if (interior_count == 0) {
    throw EmptyInterior("no lattice site x satisfies B(x/N, 5/N) inside the domain at N=" +
                        std::to_string(scale));
  }

  std::vector<char> in_layer(window, 0);
  for (std::size_t k = 0; k < window; ++k) {
    if (!in_interior[k]) continue;
    const Coord c = coord_of(k);
    for (int axis = 0; axis < dim; ++axis) {
      for (int sign : {+1, -1}) {
        Coord n = c;
        n[axis] += sign;
        const auto nk = window_index(n);
        if (nk && !in_interior[*nk]) in_layer[*nk] = 1;
      }
    }
  }

  lookup_.assign(window, -1);
  for (std::size_t k = 0; k < window; ++k) {
    if (!in_interior[k] && !in_layer[k]) continue;
    lookup_[k] = static_cast<std::int64_t>(sites_.size());
    if (in_interior[k]) interior_.push_back(sites_.size());
    else boundary_.push_back(sites_.size());
    sites_.push_back(coord_of(k));
    interior_flag_.push_back(in_interior[k]);
  }

  for (std::size_t y = 0; y < sites_.size(); ++y) {
    for (int axis = 0; axis < dim; ++axis) {
      for (int sign : {+1, -1}) {
        Coord n = sites_[y];
        n[axis] += sign;
        const auto x = find(n);
        if (!x) continue;
        const bool x_in = interior_flag_[*x] != 0;
        const bool y_in = interior_flag_[y] != 0;
        if (!x_in && !y_in) continue;
        const Bond b{static_cast<std::uint32_t>(*x), static_cast<std::uint32_t>(y),
                     static_cast<std::int8_t>(axis), static_cast<std::int8_t>(sign)};
        closure_bonds_.push_back(b);
        if (x_in && y_in) inner_bonds_.push_back(b);
      }
    }
  }
}

std::optional<std::size_t> DiscretizedDomain::find(const Coord& c) const noexcept {
  std::size_t k = 0;
  for (int i = 0; i < dim(); ++i) {
    const int off = c[i] - scan_lower_[i];
    if (off < 0 || off >= scan_extent_[i]) return std::nullopt;
    k = k * scan_extent_[i] + static_cast<std::size_t>(off);
  }
  if (lookup_[k] < 0) return std::nullopt;
  return static_cast<std::size_t>(lookup_[k]);
}

std::size_t DiscretizedDomain::neighbor(std::size_t site, int axis, int sign) const {
  Coord n = sites_[site];
  n[axis] += sign;
  const auto idx = find(n);
  if (!idx) throw InvalidArgument("neighbor requested outside the site set");
  return *idx;
}

Point DiscretizedDomain::position(std::size_t site) const noexcept {
  Point p{};
  for (int i = 0; i < dim(); ++i) p[i] = static_cast<double>(sites_[site][i]) / scale_;
  return p;
}

DiscretizedDomain discretize_domain(const DomainSpec& spec, int scale) {
  return DiscretizedDomain(spec, scale);
}

}  // namespace gradphi
