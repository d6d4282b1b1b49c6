#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gradphi/errors.hpp"
#include "gradphi/fields.hpp"
#include "gradphi/geometry.hpp"

using namespace gradphi;

namespace {

HeightField random_field(std::size_t n, unsigned seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, scale);
  HeightField phi(n);
  for (auto& v : phi.values) v = normal(gen);
  return phi;
}

// Integrate along a randomized breadth-first tree instead of the library's chain.
HeightField integrate_random_chain(const TorusLattice& lat, const GradientField& eta, double base,
                                   unsigned seed) {
  std::mt19937_64 gen(seed);
  HeightField phi(lat.num_sites(), NAN);
  std::vector<char> seen(lat.num_sites(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  phi[0] = base;
  while (!queue.empty()) {
    const std::size_t y = queue.front();
    queue.pop_front();
    std::vector<std::pair<int, int>> moves;
    for (int i = 0; i < lat.dim(); ++i) moves.insert(moves.end(), {{i, 1}, {i, -1}});
    std::shuffle(moves.begin(), moves.end(), gen);
    for (auto [axis, sign] : moves) {
      const std::size_t x = lat.neighbor(y, axis, sign);
      if (seen[x]) continue;
      seen[x] = 1;
      phi[x] = phi[y] + eta[lat.bond_index(y, axis, sign)];
      queue.push_back(x);
    }
  }
  return phi;
}

}  // namespace

TEST_CASE("torus site and bond counts") {
  CHECK(build_torus(2, 1).num_sites() == 2);
  CHECK(build_torus(2, 1).num_bonds() == 4);
  CHECK(build_torus(4, 2).num_sites() == 16);
  CHECK(build_torus(4, 2).num_bonds() == 64);
  CHECK(build_torus(3, 3).num_sites() == 27);
  CHECK(build_torus(3, 3).num_bonds() == 162);
}

TEST_CASE("torus rejects bad sizes") {
  CHECK_THROWS_AS(build_torus(1, 2), InvalidArgument);
  CHECK_THROWS_AS(build_torus(4, 0), InvalidArgument);
  CHECK_THROWS_AS(build_torus(4, 4), InvalidArgument);
}

TEST_CASE("torus bonds are unit steps and come in reversed pairs") {
  for (int d = 1; d <= 3; ++d) {
    const TorusLattice lat(3, d);
    for (std::size_t b = 0; b < lat.num_bonds(); ++b) {
      const Bond bond = lat.bonds()[b];
      const Coord x = lat.coord(bond.x);
      const Coord y = lat.coord(bond.y);
      int dist = 0;
      for (int i = 0; i < d; ++i) {
        const int diff = ((x[i] - y[i]) % 3 + 3) % 3;
        dist += std::min(diff, 3 - diff);
      }
      CHECK(dist == 1);
      const Bond rev = lat.bonds()[lat.reverse_bond(b)];
      CHECK(rev.x == bond.y);
      CHECK(rev.y == bond.x);
    }
  }
}

TEST_CASE("discretized 1-d box matches a brute-force scan") {
  const int n = 40;
  const DomainSpec spec = DomainSpec::box(1, {-0.5}, {0.5});
  const DiscretizedDomain dom = discretize_domain(spec, n);
  std::size_t expected = 0;
  for (int x = -n; x <= n; ++x) {
    const double lo = x / double(n) - 2.5 / n;
    const double hi = x / double(n) + 2.5 / n;
    if (lo >= -0.5 && hi <= 0.5) ++expected;
  }
  CHECK(dom.interior().size() == expected);
  CHECK(expected == 35);
  // boundary layer is the two sites just outside
  CHECK(dom.boundary().size() == 2);
}

TEST_CASE("ball of radius zero has no interior") {
  CHECK_THROWS_AS(discretize_domain(DomainSpec::ball(2, {0.0, 0.0}, 0.0), 10), EmptyInterior);
  CHECK_THROWS_AS(discretize_domain(DomainSpec::box(1, {-0.5}, {0.5}), 4), EmptyInterior);
}

TEST_CASE("domain must contain the origin") {
  CHECK_THROWS_AS(discretize_domain(DomainSpec::box(1, {0.5}, {1.5}), 10), InvalidArgument);
}

TEST_CASE("centred square is symmetric under coordinate negation") {
  const DiscretizedDomain dom(DomainSpec::box(2, {-0.5, -0.5}, {0.5, 0.5}), 20);
  for (std::size_t s = 0; s < dom.num_sites(); ++s) {
    Coord c = dom.coord(s);
    for (int i = 0; i < 2; ++i) {
      Coord m = c;
      m[i] = -m[i];
      const auto k = dom.find(m);
      REQUIRE(k.has_value());
      CHECK(dom.is_interior(*k) == dom.is_interior(s));
    }
  }
}

TEST_CASE("closure bonds extend inner bonds by the boundary-crossing bonds") {
  for (const DomainSpec& spec : {DomainSpec::box(2, {-0.5, -0.4}, {0.6, 0.5}),
                                 DomainSpec::ball(2, {0.0, 0.1}, 0.5),
                                 DomainSpec::ball(3, {0.0, 0.0, 0.0}, 0.45)}) {
    const DiscretizedDomain dom(spec, 16);
    std::size_t crossing = 0, both = 0;
    for (const Bond& b : dom.closure_bonds()) {
      const int inside = dom.is_interior(b.x) + dom.is_interior(b.y);
      CHECK(inside >= 1);
      if (inside == 1) ++crossing;
      if (inside == 2) ++both;
    }
    CHECK(both == dom.inner_bonds().size());
    CHECK(dom.closure_bonds().size() - dom.inner_bonds().size() == crossing);
    // every interior cube fits, so its centre is at least half a side from the boundary
    for (std::size_t s : dom.interior()) {
      CHECK(spec.contains_cube(dom.position(s), 5.0 / 16));
    }
    // the boundary layer is exactly the set of outside endpoints
    std::vector<char> touched(dom.num_sites(), 0);
    for (const Bond& b : dom.closure_bonds()) {
      if (!dom.is_interior(b.x)) touched[b.x] = 1;
      if (!dom.is_interior(b.y)) touched[b.y] = 1;
    }
    CHECK(static_cast<std::size_t>(std::count(touched.begin(), touched.end(), 1)) ==
          dom.boundary().size());
  }
}

TEST_CASE("interior sites are ordered lexicographically") {
  const DiscretizedDomain dom(DomainSpec::ball(2, {0.0, 0.0}, 0.5), 24);
  for (std::size_t s = 1; s < dom.num_sites(); ++s) {
    CHECK(dom.coord(s - 1) < dom.coord(s));
  }
}

TEST_CASE("gradient of constant and linear fields") {
  const TorusLattice lat(5, 2);
  const GradientField eta = gradient(lat, HeightField(lat.num_sites(), 3.5));
  CHECK(std::all_of(eta.values.begin(), eta.values.end(), [](double v) { return v == 0.0; }));

  const DiscretizedDomain chain(DomainSpec::box(1, {-1.0}, {1.0}), 10);
  HeightField phi(chain.num_sites());
  const double u = 0.37;
  for (std::size_t s = 0; s < chain.num_sites(); ++s) phi[s] = u * chain.coord(s)[0];
  const GradientField g = gradient(chain, phi);
  for (std::size_t b = 0; b < g.size(); ++b) {
    const Bond bond = chain.closure_bonds()[b];
    CHECK(g[b] == doctest::Approx(bond.sign * u).epsilon(1e-14));
  }
}

TEST_CASE("gradient is antisymmetric and satisfies the plaquette condition") {
  const TorusLattice lat(4, 2);
  const GradientField eta = gradient(lat, random_field(lat.num_sites(), 3, 5.0));
  CHECK(antisymmetry_defect(lat, eta) == 0.0);
  const auto sums = plaquette_sums(lat, eta);
  CHECK(sums.size() == 16);
  for (double s : sums) CHECK(std::abs(s) <= 1e-12);
  for (double w : winding_sums(lat, eta)) CHECK(std::abs(w) <= 1e-12);
}

TEST_CASE("integrate_gradient") {
  const TorusLattice lat(4, 2);
  SUBCASE("zero field and base") {
    const HeightField phi = integrate_gradient(lat, GradientField(lat.num_bonds()), 7.0);
    CHECK(phi == HeightField(lat.num_sites(), 7.0));
  }
  SUBCASE("round trip on tori") {
    for (int d = 1; d <= 3; ++d) {
      const TorusLattice t(d == 3 ? 4 : 7, d);
      const HeightField phi = random_field(t.num_sites(), 10 + d, 2.0);
      const GradientField eta = gradient(t, phi);
      const HeightField back = integrate_gradient(t, eta, phi[0]);
      for (std::size_t x = 0; x < phi.size(); ++x) CHECK(back[x] == doctest::Approx(phi[x]));
      const GradientField eta2 = gradient(t, back);
      for (std::size_t b = 0; b < eta.size(); ++b) CHECK(std::abs(eta2[b] - eta[b]) <= 1e-12);
    }
  }
  SUBCASE("chain independence") {
    const HeightField phi = random_field(lat.num_sites(), 5);
    const GradientField eta = gradient(lat, phi);
    const HeightField a = integrate_gradient(lat, eta, -1.25);
    for (unsigned seed = 0; seed < 5; ++seed) {
      const HeightField b = integrate_random_chain(lat, eta, -1.25, seed);
      for (std::size_t x = 0; x < a.size(); ++x) CHECK(std::abs(a[x] - b[x]) <= 1e-9);
    }
  }
  SUBCASE("a broken plaquette is rejected") {
    GradientField eta = gradient(lat, random_field(lat.num_sites(), 6));
    const std::size_t b = lat.bond_index(5, 0, 1);
    eta[b] += 1.0;
    eta[lat.reverse_bond(b)] -= 1.0;
    CHECK_THROWS_AS(integrate_gradient(lat, eta, 0.0), NotIntegrable);
  }
  SUBCASE("non-zero winding is rejected") {
    const TorusLattice ring(6, 1);
    GradientField eta(ring.num_bonds());
    for (std::size_t y = 0; y < ring.num_sites(); ++y) {
      eta[ring.bond_index(y, 0, 1)] = 1.0;
      eta[ring.bond_index(y, 0, -1)] = -1.0;
    }
    CHECK_THROWS_AS(integrate_gradient(ring, eta, 0.0), NotIntegrable);
  }
  SUBCASE("domain round trip") {
    const DiscretizedDomain dom(DomainSpec::ball(2, {0.0, 0.0}, 0.5), 20);
    const HeightField phi = random_field(dom.num_sites(), 8);
    const auto origin = dom.find(Coord{});
    REQUIRE(origin.has_value());
    const HeightField back = integrate_gradient(dom, gradient(dom, phi), phi[*origin]);
    // sites reached by closure bonds are recovered
    for (std::size_t x = 0; x < phi.size(); ++x) CHECK(back[x] == doctest::Approx(phi[x]));
  }
}

TEST_CASE("boundary heights are N times cell averages") {
  const std::vector<Coord> sites{{-3, 0, 0}, {0, 0, 0}, {5, 0, 0}};
  const HeightField zero = boundary_height([](const Point&) { return 0.0; }, 8, 1, sites);
  CHECK(zero == HeightField(3, 0.0));

  const HeightField c = boundary_height([](const Point&) { return 2.5; }, 8, 1, sites);
  for (double v : c.values) CHECK(v == doctest::Approx(8 * 2.5).epsilon(1e-14));

  const HeightField lin = boundary_height([](const Point& p) { return p[0]; }, 8, 1, sites);
  for (std::size_t k = 0; k < sites.size(); ++k) {
    CHECK(lin[k] == doctest::Approx(sites[k][0]).epsilon(1e-13));
  }

  // quadratic: cell average of theta^2 over [a - h/2, a + h/2] is a^2 + h^2 / 12
  const std::vector<Coord> sites2{{2, -1, 0}};
  const HeightField q =
      boundary_height([](const Point& p) { return p[0] * p[0] + p[1] * p[1]; }, 4, 2, sites2);
  const double h = 0.25;
  CHECK(q[0] == doctest::Approx(4 * (0.25 + 0.0625 + 2 * h * h / 12)).epsilon(1e-13));
}

TEST_CASE("field serialization round trips") {
  const TorusLattice lat(3, 2);
  const HeightField phi = random_field(lat.num_sites(), 9);
  const GradientField eta = gradient(lat, phi);

  std::stringstream csv;
  write_field_csv(csv, lat, phi);
  CHECK(height_from_table(read_field_csv(csv), lat) == phi);

  std::stringstream csv2;
  write_field_csv(csv2, lat, eta);
  CHECK(gradient_from_table(read_field_csv(csv2), lat) == eta);

  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_field_binary(bin, lat, phi);
  CHECK(height_from_table(read_field_binary(bin), lat) == phi);

  std::stringstream bad("not a field\n");
  CHECK_THROWS_AS(read_field_csv(bad), FormatError);
}
