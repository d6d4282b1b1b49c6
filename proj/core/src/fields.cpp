#include "gradphi/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gradphi/errors.hpp"
#include "gradphi/quadrature.hpp"

namespace gradphi {

GradientField gradient(std::span<const Bond> bonds, const HeightField& phi) {
  GradientField eta(bonds.size());
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    eta[k] = phi[bonds[k].x] - phi[bonds[k].y];
  }
  return eta;
}

GradientField gradient(const TorusLattice& lattice, const HeightField& phi) {
  if (phi.size() != lattice.num_sites()) {
    throw InvalidArgument("height field size does not match the torus");
  }
  return gradient(lattice.bonds(), phi);
}

GradientField gradient(const DiscretizedDomain& domain, const HeightField& phi) {
  if (phi.size() != domain.num_sites()) {
    throw InvalidArgument("height field size does not match the domain");
  }
  return gradient(domain.closure_bonds(), phi);
}

std::vector<double> plaquette_sums(const TorusLattice& lattice, const GradientField& eta) {
  std::vector<double> sums;
  const int d = lattice.dim();
  sums.reserve(lattice.num_sites() * d * (d - 1) / 2);
  for (std::size_t x = 0; x < lattice.num_sites(); ++x) {
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const std::size_t xi = lattice.neighbor(x, i, +1);
        const std::size_t xij = lattice.neighbor(xi, j, +1);
        const std::size_t xj = lattice.neighbor(x, j, +1);
        // x -> x+e_i -> x+e_i+e_j -> x+e_j -> x
        const double s = eta[lattice.bond_index(x, i, +1)] +
                         eta[lattice.bond_index(xi, j, +1)] +
                         eta[lattice.bond_index(xij, i, -1)] +
                         eta[lattice.bond_index(xj, j, -1)];
        sums.push_back(s);
      }
    }
  }
  return sums;
}

std::vector<double> winding_sums(const TorusLattice& lattice, const GradientField& eta) {
  std::vector<double> sums(lattice.dim(), 0.0);
  for (int axis = 0; axis < lattice.dim(); ++axis) {
    std::size_t site = 0;
    for (int step = 0; step < lattice.side(); ++step) {
      sums[axis] += eta[lattice.bond_index(site, axis, +1)];
      site = lattice.neighbor(site, axis, +1);
    }
  }
  return sums;
}

double antisymmetry_defect(const TorusLattice& lattice, const GradientField& eta) {
  double worst = 0.0;
  for (std::size_t b = 0; b < lattice.num_bonds(); ++b) {
    worst = std::max(worst, std::abs(eta[b] + eta[lattice.reverse_bond(b)]));
  }
  return worst;
}

namespace {

double integrability_tolerance(const GradientField& eta) {
  double scale = 1.0;
  for (double v : eta.values) scale = std::max(scale, std::abs(v));
  return 1e-9 * scale;
}

}  // namespace

HeightField integrate_gradient(const TorusLattice& lattice, const GradientField& eta,
                               double base) {
  if (eta.size() != lattice.num_bonds()) {
    throw InvalidArgument("gradient field size does not match the torus");
  }
  const double tol = integrability_tolerance(eta);
  if (antisymmetry_defect(lattice, eta) > tol) {
    throw NotIntegrable("gradient field is not antisymmetric");
  }
  const auto plaquettes = plaquette_sums(lattice, eta);
  for (std::size_t k = 0; k < plaquettes.size(); ++k) {
    if (std::abs(plaquettes[k]) > tol) {
      std::ostringstream msg;
      msg << "plaquette " << k << " has loop sum " << plaquettes[k];
      throw NotIntegrable(msg.str());
    }
  }
  const auto windings = winding_sums(lattice, eta);
  for (int axis = 0; axis < lattice.dim(); ++axis) {
    if (std::abs(windings[axis]) > tol) {
      std::ostringstream msg;
      msg << "winding sum along axis " << axis << " is " << windings[axis];
      throw NotIntegrable(msg.str());
    }
  }

  HeightField phi(lattice.num_sites());
  phi[0] = base;
  for (std::size_t x = 1; x < lattice.num_sites(); ++x) {
    const Coord c = lattice.coord(x);
    int axis = lattice.dim() - 1;
    while (c[axis] == 0) --axis;
    const std::size_t prev = lattice.neighbor(x, axis, -1);
    phi[x] = phi[prev] + eta[lattice.bond_index(prev, axis, +1)];
  }
  return phi;
}

HeightField integrate_gradient(const DiscretizedDomain& domain, const GradientField& eta,
                               double base) {
  const auto bonds = domain.closure_bonds();
  if (eta.size() != bonds.size()) {
    throw InvalidArgument("gradient field size does not match the domain closure bonds");
  }
  const auto root = domain.find(Coord{});
  if (!root) throw InvalidArgument("origin is not a site of the discretized domain");

  std::vector<std::vector<std::size_t>> out(domain.num_sites());
  for (std::size_t k = 0; k < bonds.size(); ++k) out[bonds[k].y].push_back(k);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  HeightField phi(domain.num_sites(), nan);
  std::vector<char> seen(domain.num_sites(), 0);
  std::deque<std::size_t> queue{*root};
  phi[*root] = base;
  seen[*root] = 1;
  while (!queue.empty()) {
    const std::size_t y = queue.front();
    queue.pop_front();
    for (std::size_t k : out[y]) {
      const std::size_t x = bonds[k].x;
      if (seen[x]) continue;
      seen[x] = 1;
      phi[x] = phi[y] + eta[k];
      queue.push_back(x);
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw InvalidArgument("domain bond graph is disconnected");
  }
  const double tol = integrability_tolerance(eta);
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    const double defect = eta[k] - (phi[bonds[k].x] - phi[bonds[k].y]);
    if (std::abs(defect) > tol) {
      std::ostringstream msg;
      msg << "closed-loop defect " << defect << " at bond " << k;
      throw NotIntegrable(msg.str());
    }
  }
  return phi;
}

double cell_average(const ScalarFunction& f, const Coord& site, int scale, int dim) {
  const auto& rule = gauss_legendre(5);
  const int q = static_cast<int>(rule.nodes.size());
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= q;
  const double half = 0.5 / scale;
  double acc = 0.0;
  for (int k = 0; k < total; ++k) {
    int rest = k;
    Point p{};
    double w = 1.0;
    for (int i = dim - 1; i >= 0; --i) {
      const int node = rest % q;
      rest /= q;
      p[i] = static_cast<double>(site[i]) / scale + half * rule.nodes[node];
      w *= 0.5 * rule.weights[node];
    }
    acc += w * f(p);
  }
  return acc;
}

HeightField boundary_height(const ScalarFunction& f, int scale, int dim,
                            std::span<const Coord> sites) {
  HeightField psi(sites.size());
  for (std::size_t k = 0; k < sites.size(); ++k) {
    psi[k] = scale * cell_average(f, sites[k], scale, dim);
  }
  return psi;
}

HeightField boundary_height(const ScalarFunction& f, const DiscretizedDomain& domain) {
  std::vector<Coord> sites(domain.num_sites());
  for (std::size_t k = 0; k < sites.size(); ++k) sites[k] = domain.coord(k);
  return boundary_height(f, domain.scale(), domain.dim(), sites);
}

// ---------------------------------------------------------------- serialization

namespace {

const char* kind_name(FieldKind kind) {
  return kind == FieldKind::kHeight ? "height" : "gradient";
}

void write_csv_header(std::ostream& out, const FieldHeader& h) {
  out << "# gradphi field v1\n";
  out << "dim,side,kind,count\n";
  out << h.dim << ',' << h.side << ',' << kind_name(h.kind) << ',' << h.count << '\n';
  for (int i = 0; i < h.dim; ++i) out << (h.kind == FieldKind::kHeight ? "x" : "y") << i + 1 << ',';
  if (h.kind == FieldKind::kGradient) out << "axis,sign,";
  out << "value\n";
}

void write_value(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf << '\n';
}

template <class T>
void put(std::ostream& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char bytes[sizeof(T)];
  in.read(bytes, sizeof(T));
  if (!in) throw FormatError("truncated binary field file");
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

void write_binary(std::ostream& out, const FieldHeader& h, const std::vector<double>& values) {
  out.write("GPHF", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.side));
  put<std::uint32_t>(out, h.kind == FieldKind::kHeight ? 0u : 1u);
  put<std::uint64_t>(out, h.count);
  for (double v : values) put<double>(out, v);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

void write_field_csv(std::ostream& out, const TorusLattice& lattice, const HeightField& phi) {
  const FieldHeader h{lattice.dim(), lattice.side(), FieldKind::kHeight, phi.size()};
  write_csv_header(out, h);
  for (std::size_t x = 0; x < phi.size(); ++x) {
    const Coord c = lattice.coord(x);
    for (int i = 0; i < h.dim; ++i) out << c[i] << ',';
    write_value(out, phi[x]);
  }
}

void write_field_csv(std::ostream& out, const TorusLattice& lattice, const GradientField& eta) {
  const FieldHeader h{lattice.dim(), lattice.side(), FieldKind::kGradient, eta.size()};
  write_csv_header(out, h);
  const auto bonds = lattice.bonds();
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const Coord c = lattice.coord(bonds[k].y);
    for (int i = 0; i < h.dim; ++i) out << c[i] << ',';
    out << int{bonds[k].axis} << ',' << int{bonds[k].sign} << ',';
    write_value(out, eta[k]);
  }
}

void write_field_csv(std::ostream& out, const DiscretizedDomain& domain, const HeightField& phi) {
  const FieldHeader h{domain.dim(), domain.scale(), FieldKind::kHeight, phi.size()};
  write_csv_header(out, h);
  for (std::size_t x = 0; x < phi.size(); ++x) {
    const Coord& c = domain.coord(x);
    for (int i = 0; i < h.dim; ++i) out << c[i] << ',';
    write_value(out, phi[x]);
  }
}

FieldTable read_field_csv(std::istream& in) {
  std::string line;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  if (!next_line() || line.rfind("dim,side,kind,count", 0) != 0) {
    throw FormatError("missing field CSV header");
  }
  if (!next_line()) throw FormatError("missing field CSV header values");
  const auto head = split_csv(line);
  if (head.size() != 4) throw FormatError("malformed field CSV header values");
  FieldTable table;
  try {
    table.header.dim = std::stoi(head[0]);
    table.header.side = std::stoi(head[1]);
    table.header.count = std::stoull(head[3]);
  } catch (const std::exception&) {
    throw FormatError("non-numeric field CSV header");
  }
  if (head[2] == "height") table.header.kind = FieldKind::kHeight;
  else if (head[2] == "gradient") table.header.kind = FieldKind::kGradient;
  else throw FormatError("unknown field kind '" + head[2] + "'");
  const int d = table.header.dim;
  if (d < 1 || d > kMaxDim) throw FormatError("field dimension out of range");
  if (!next_line()) throw FormatError("missing column header");

  const std::size_t columns = d + 1 + (table.header.kind == FieldKind::kGradient ? 2 : 0);
  while (next_line()) {
    const auto parts = split_csv(line);
    if (parts.size() != columns) throw FormatError("wrong number of columns: " + line);
    Coord c{};
    try {
      for (int i = 0; i < d; ++i) c[i] = std::stoi(parts[i]);
      if (table.header.kind == FieldKind::kGradient) {
        table.axes.push_back(std::stoi(parts[d]));
        table.signs.push_back(std::stoi(parts[d + 1]));
      }
      table.values.push_back(std::stod(parts.back()));
    } catch (const std::exception&) {
      throw FormatError("non-numeric field row: " + line);
    }
    table.coords.push_back(c);
  }
  if (table.values.size() != table.header.count) {
    throw FormatError("row count does not match header count");
  }
  return table;
}

void write_field_binary(std::ostream& out, const TorusLattice& lattice, const HeightField& phi) {
  write_binary(out, {lattice.dim(), lattice.side(), FieldKind::kHeight, phi.size()}, phi.values);
}

void write_field_binary(std::ostream& out, const TorusLattice& lattice, const GradientField& eta) {
  write_binary(out, {lattice.dim(), lattice.side(), FieldKind::kGradient, eta.size()},
               eta.values);
}

FieldTable read_field_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GPHF", 4) != 0) throw FormatError("bad field file magic");
  if (get<std::uint32_t>(in) != 1) throw FormatError("unsupported field file version");
  FieldTable table;
  table.header.dim = static_cast<int>(get<std::uint32_t>(in));
  table.header.side = static_cast<int>(get<std::uint32_t>(in));
  const auto kind = get<std::uint32_t>(in);
  if (kind > 1) throw FormatError("unknown field kind");
  table.header.kind = kind == 0 ? FieldKind::kHeight : FieldKind::kGradient;
  table.header.count = get<std::uint64_t>(in);
  if (table.header.count > (std::uint64_t{1} << 34)) throw FormatError("field count too large");
  table.values.resize(table.header.count);
  for (auto& v : table.values) v = get<double>(in);
  return table;
}

namespace {

void check_table(const FieldTable& table, const TorusLattice& lattice, FieldKind kind,
                 std::size_t count) {
  if (table.header.kind != kind) throw FormatError("field kind mismatch");
  if (table.header.dim != lattice.dim() || table.header.side != lattice.side()) {
    throw FormatError("field header does not match the lattice");
  }
  if (table.values.size() != count) throw FormatError("field value count mismatch");
}

}  // namespace

HeightField height_from_table(const FieldTable& table, const TorusLattice& lattice) {
  check_table(table, lattice, FieldKind::kHeight, lattice.num_sites());
  if (!table.coords.empty()) {
    for (std::size_t x = 0; x < table.coords.size(); ++x) {
      if (lattice.index(table.coords[x]) != x) throw FormatError("rows not in lattice order");
    }
  }
  return HeightField(table.values);
}

GradientField gradient_from_table(const FieldTable& table, const TorusLattice& lattice) {
  check_table(table, lattice, FieldKind::kGradient, lattice.num_bonds());
  if (!table.coords.empty()) {
    for (std::size_t k = 0; k < table.coords.size(); ++k) {
      const std::size_t expected =
          lattice.bond_index(lattice.index(table.coords[k]), table.axes[k], table.signs[k]);
      if (expected != k) throw FormatError("rows not in bond order");
    }
  }
  return GradientField(table.values);
}

}  // namespace gradphi
