#include <cmath>
#include <memory>
#include <sstream>

#include "doctest.h"
#include "gradphi/errors.hpp"
#include "gradphi/pde.hpp"

using namespace gradphi;

namespace {

const ScalarFunction kZero = [](const Point&) { return 0.0; };

DomainSpec interval() { return DomainSpec::box(1, {-0.5}, {0.5}); }
DomainSpec square() { return DomainSpec::box(2, {-0.5, -0.5}, {0.5, 0.5}); }

double max_interior_diff(const PdeGrid& grid, const CellField& a, const CellField& b) {
  double m = 0.0;
  for (std::size_t c : grid.interior_cells()) {
    m = std::max(m, std::abs(a.values()[c] - b.values()[c]));
  }
  return m;
}

}  // namespace

TEST_CASE("pde grid") {
  const PdeGrid grid(interval(), 16, kZero);
  CHECK(grid.interior_cells().size() == 15);  // centres j/16 with |j| < 8
  CHECK(grid.spacing() == 1.0 / 16);
  for (std::size_t c : grid.interior_cells()) {
    CHECK(std::abs(grid.boundary_field().center(c)[0]) < 0.5);
  }
  CHECK_THROWS_AS(PdeGrid(interval(), 1, kZero), InvalidArgument);
  CHECK_THROWS_AS(PdeGrid(interval(), 16, kZero, 1), InvalidArgument);
}

TEST_CASE("affine data is stationary") {
  const ScalarFunction affine = [](const Point& t) { return 0.3 + t[0] - 2.0 * t[1]; };
  const PdeGrid grid(square(), 16, affine);
  const PdeSolution sol = solve(grid, affine, LinearFlux(1.0), 0.05);
  CHECK(sol.steps > 0);
  for (std::size_t c : grid.interior_cells()) {
    CHECK(std::abs(sol.h.values()[c] - affine(sol.h.center(c))) <= 1e-12);
  }
}

TEST_CASE("zero horizon returns the initial data") {
  const ScalarFunction h0 = bump(2, {0.0, 0.0}, 0.3);
  const PdeGrid grid(square(), 16, kZero);
  const PdeSolution sol = solve(grid, h0, LinearFlux(1.0), 0.0);
  CHECK(sol.steps == 0);
  for (std::size_t c : grid.interior_cells()) CHECK(sol.h.values()[c] == h0(sol.h.center(c)));
}

TEST_CASE("odd data stays odd") {
  const ScalarFunction h0 = [](const Point& t) { return std::sin(2 * M_PI * t[0]) * (0.25 - t[0] * t[0]); };
  const PdeGrid grid(interval(), 32, kZero);
  const PdeSolution sol = solve(grid, h0, LinearFlux(1.0), 0.02);
  for (std::size_t c : grid.interior_cells()) {
    const Point x = sol.h.center(c);
    CHECK(std::abs(sol.h(x) + sol.h({-x[0]})) <= 1e-12);
  }
}

TEST_CASE("maximum principle") {
  const ScalarFunction h0 = [](const Point& t) {
    return std::cos(7 * t[0]) * std::sin(5 * t[1] + 0.3) * 0.8;
  };
  const ScalarFunction f = [](const Point& t) { return 0.5 * t[0]; };
  const PdeGrid grid(square(), 16, f);
  const PdeSolution sol = solve(grid, h0, LinearFlux(2.0), 0.05);
  CHECK(sol.linf_violations == 0);
  CHECK(sol.max_abs <= sol.bound * (1 + 1e-12));
}

TEST_CASE("the heat equation solution decays") {
  const ScalarFunction h0 = bump(1, {0.0}, 0.25);
  const PdeGrid grid(interval(), 64, kZero);
  const PdeSolution sol = solve(grid, h0, LinearFlux(1.0), 0.05, 0.0, {0.01, 0.03});
  REQUIRE(sol.snapshots.size() == 2);
  const double n0 = l2_norm_squared(grid.boundary_field(), interval());
  CHECK(n0 == 0.0);
  const double a = l2_norm_squared(sol.snapshots[0].h, interval());
  const double b = l2_norm_squared(sol.snapshots[1].h, interval());
  const double c = l2_norm_squared(sol.h, interval());
  CHECK(a > b);
  CHECK(b > c);

  const HeatSeries exact([&](double x) { return h0({x}); }, -0.5, 0.5, 400, -0.25, 0.25);
  const double err = grid_l2_error_squared(grid, sol.h, [&](const Point& t) { return exact(0.05, t[0]); });
  CHECK(std::sqrt(err) <= 1e-3);
}

TEST_CASE("heat series") {
  // sin(pi (x + 1/2)) is the first mode on (-1/2, 1/2)
  const HeatSeries s([](double x) { return std::sin(M_PI * (x + 0.5)); }, -0.5, 0.5, 50);
  CHECK(s(0.0, 0.1) == doctest::Approx(std::sin(M_PI * 0.6)).epsilon(1e-6));
  CHECK(s(0.1, 0.0) == doctest::Approx(std::exp(-M_PI * M_PI * 0.1)).epsilon(1e-6));
  CHECK_THROWS_AS(HeatSeries([](double) { return 0.0; }, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("step size checks") {
  const PdeGrid grid(interval(), 16, kZero);
  const ScalarFunction h0 = bump(1, {0.0}, 0.25);
  const PdeSolution sol = solve(grid, h0, LinearFlux(1.0), 0.01);
  CHECK(sol.dt == doctest::Approx(1.0 / (16.0 * 16.0 * 2.0)));
  CHECK_THROWS_AS(solve(grid, h0, LinearFlux(1.0), 0.01, 2 * sol.dt), CflViolation);
  CHECK_THROWS_AS(solve(grid, h0, LinearFlux(1.0), -1.0), InvalidArgument);
  CHECK_THROWS_AS(solve(grid, h0, LinearFlux(1.0), 0.01, 0.0, {0.02}), InvalidArgument);
  CHECK_THROWS_AS(LinearFlux(0.0), InvalidArgument);
}

TEST_CASE("l2 comparison on the common refinement") {
  const DomainSpec d = DomainSpec::box(1, {0.0}, {1.0});
  const CellField a(1, {0.0}, 0.25, {4, 1, 1}, 1.0);
  const CellField b(1, {0.0}, 0.125, {8, 1, 1}, 0.0);
  CHECK(l2_compare(a, b, d) == doctest::Approx(1.0));
  CellField c = b;
  for (std::size_t k = 0; k < 4; ++k) c.values()[k] = 1.0;  // agrees with a on [0, 1/2)
  CHECK(l2_compare(a, c, d) == doctest::Approx(0.5));
  CHECK(l2_compare(a, a, d) == 0.0);

  const DomainSpec sq = DomainSpec::box(2, {0.0, 0.0}, {1.0, 1.0});
  const CellField e(2, {0.0, 0.0}, 0.5, {2, 2, 1}, 2.0);
  const CellField g(2, {0.0, 0.0}, 0.25, {4, 4, 1}, -1.0);
  CHECK(l2_compare(e, g, sq) == doctest::Approx(9.0));
}

TEST_CASE("table flux") {
  auto table = std::make_shared<const SurfaceTensionTable>(gaussian_table({2, -2.0, 2.0, 0.25}));
  const TableFlux tf(table);
  CHECK(tf.c1() == doctest::Approx(1.0));
  CHECK(tf.c2() == doctest::Approx(1.0));

  SUBCASE("the exact gaussian table reproduces the linear flux") {
    const ScalarFunction h0 = bump(2, {0.0, 0.0}, 0.3, 0.2);
    const PdeGrid grid(square(), 16, kZero);
    const PdeSolution a = solve(grid, h0, tf, 0.02);
    const PdeSolution b = solve(grid, h0, LinearFlux(1.0), 0.02);
    CHECK(a.steps == b.steps);
    CHECK(max_interior_diff(grid, a.h, b.h) <= 1e-12);
    CHECK(tf.clamps() == 0);
  }
  SUBCASE("steep data leaves the table") {
    const ScalarFunction h0 = bump(2, {0.0, 0.0}, 0.25, 5.0);
    const PdeGrid grid(square(), 16, kZero);
    CHECK_THROWS_AS(solve(grid, h0, tf, 0.01), FluxRangeExceeded);
  }
  SUBCASE("a flat table is rejected") {
    auto flat = std::make_shared<const SurfaceTensionTable>(1, -1.0, 0.5, 5);
    CHECK_THROWS_AS(TableFlux{flat}, InvalidArgument);
  }
  SUBCASE("dimension mismatch") {
    const PdeGrid grid(interval(), 16, kZero);
    CHECK_THROWS_AS(solve(grid, bump(1, {0.0}, 0.25), tf, 0.01), InvalidArgument);
  }
}

TEST_CASE("snapshot csv") {
  const PdeGrid grid(interval(), 8, kZero);
  std::ostringstream out;
  write_snapshot_csv(out, grid, grid.boundary_field(), 0.5);
  CHECK(out.str().find("0.5") != std::string::npos);
  CHECK_THROWS_AS(bump(1, {0.0}, 0.0), InvalidArgument);
}
