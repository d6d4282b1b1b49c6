#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "gradphi/dynamics.hpp"
#include "gradphi/errors.hpp"
#include "gradphi/gibbs.hpp"
#include "gradphi/pde.hpp"
#include "gradphi/stats.hpp"

using namespace gradphi;

namespace {

const ScalarFunction kZero = [](const Point&) { return 0.0; };

std::shared_ptr<const DiscretizedDomain> make_domain(const DomainSpec& spec, int n) {
  return std::make_shared<const DiscretizedDomain>(spec, n);
}

// Stationary bond variance of Euler-Maruyama for the lattice OU process: mode k
// relaxes with rate lambda and has variance 1 / (lambda (1 - dt lambda / 2)).
double em_bond_variance(int side, int dim, double dt) {
  const int total = dim == 1 ? side : (dim == 2 ? side * side : side * side * side);
  double acc = 0.0;
  for (int k = 1; k < total; ++k) {
    int rest = k;
    double lambda = 0.0;
    double s0 = 0.0;
    for (int i = dim - 1; i >= 0; --i) {
      const int ki = rest % side;
      rest /= side;
      const double s = std::sin(std::numbers::pi * ki / side);
      lambda += 4.0 * s * s;
      if (i == 0) s0 = 4.0 * s * s;
    }
    acc += s0 / (lambda * (1.0 - 0.5 * dt * lambda));
  }
  return acc / total;
}

}  // namespace

TEST_CASE("drift examples") {
  const TorusLattice lat(4, 1);
  const SiteGraph g = torus_graph(lat, std::vector<double>{0.0});
  const Potential gauss = Potential::gaussian();
  CHECK(drift(g, gauss, std::vector<double>(4, 3.0), 1) == 0.0);
  CHECK(drift(g, gauss, std::vector<double>{1.0, 0.0, 0.0, 0.0}, 0) == 2.0);
}

TEST_CASE("drift is the derivative of the Hamiltonian") {
  const TorusLattice lat(4, 2);
  const std::vector<double> tilt{0.4, -0.3};
  const SiteGraph g = torus_graph(lat, tilt);
  const Potential pot = Potential::cosine_perturbed(0.7, 1.3);
  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal;
  std::vector<double> phi(lat.num_sites());
  for (auto& v : phi) v = normal(gen);
  const double eps = 1e-4;
  for (std::size_t x = 0; x < phi.size(); ++x) {
    auto plus = phi, minus = phi;
    plus[x] += eps;
    minus[x] -= eps;
    const double fd = (hamiltonian(g, pot, plus) - hamiltonian(g, pot, minus)) / (2 * eps);
    CHECK(fd == doctest::Approx(drift(g, pot, phi, x)).epsilon(1e-7));
  }
}

TEST_CASE("zero-noise dynamics keeps a discrete harmonic field") {
  const auto dom = make_domain(DomainSpec::box(2, {-0.5, -0.5}, {0.5, 0.5}), 16);
  const ScalarFunction f = [](const Point& p) { return 0.3 * p[0] - 0.2 * p[1] + 0.1; };
  DirichletSystem sys(dom, Potential::gaussian(), f, f, 1);
  const HeightField start = sys.heights();
  for (int k = 0; k < 200; ++k) sys.step(sys.max_step(), NoiseMode::kNone);
  for (std::size_t x = 0; x < start.size(); ++x) {
    CHECK(std::abs(sys.heights()[x] - start[x]) <= 1e-12);
  }
}

TEST_CASE("step guards") {
  const auto dom = make_domain(DomainSpec::box(1, {-1.0}, {1.0}), 8);
  DirichletSystem sys(dom, Potential::cosine_perturbed(0.5, 1.0), kZero, bump(1, {0.0}, 0.5), 2);
  const HeightField before = sys.heights();
  sys.step(0.0);
  CHECK(sys.heights() == before);
  CHECK(sys.time() == 0.0);
  CHECK(sys.max_step() == doctest::Approx(0.1 / (2 * (1.0 + 0.5 + 0.5))));
  CHECK_THROWS_AS(sys.step(1.01 * sys.max_step()), StepTooLarge);
  CHECK_THROWS_AS(sys.step(-1.0), InvalidArgument);

  HeightField bad = sys.heights();
  bad[dom->interior()[0]] = NAN;
  sys.langevin().set_heights(bad);
  CHECK_THROWS_AS(sys.step(sys.max_step()), NonFinite);
}

TEST_CASE("free sites diffuse with variance 2 n dt") {
  const std::size_t seeds = 10000;
  LangevinSystem sys(isolated_sites(seeds), Potential::gaussian(), HeightField(seeds), 99);
  CHECK(std::isinf(sys.max_step()));
  const int n = 50;
  const double dt = 0.01;
  for (int k = 0; k < n; ++k) sys.step(dt);
  const double var = sample_variance(sys.heights().values);
  const double expected = 2.0 * n * dt;
  const double se = expected * std::sqrt(2.0 / (seeds - 1));
  CHECK(std::abs(var - expected) <= 3.0 * se);
  CHECK(std::abs(mean(sys.heights().values)) <= 3.0 * std::sqrt(expected / seeds));
}

TEST_CASE("advance_to lands exactly on the target") {
  LangevinSystem sys(isolated_sites(3), Potential::gaussian(), HeightField(3), 5);
  sys.advance_to(1.0, 0.3);
  CHECK(sys.time() == 1.0);
  CHECK(sys.steps() == 4);
  CHECK_THROWS_AS(sys.advance_to(0.5, 0.1), TimeMismatch);
}

TEST_CASE("boundary layer is bit-identical after every step") {
  const auto dom = make_domain(DomainSpec::ball(2, {0.0, 0.0}, 0.5), 12);
  const ScalarFunction f = [](const Point& p) { return std::sin(3 * p[0]) + p[1] * p[1]; };
  DirichletSystem sys(dom, Potential::cosine_perturbed(0.5, 2.0), f, f, 3);
  for (int k = 0; k < 100; ++k) {
    sys.step(sys.max_step());
    for (std::size_t x : dom->boundary()) {
      REQUIRE(sys.heights()[x] == sys.boundary_heights()[x]);
    }
  }
  // psi^N = N * cell average of f
  for (std::size_t x : dom->boundary()) {
    CHECK(sys.boundary_heights()[x] ==
          doctest::Approx(12 * cell_average(f, dom->coord(x), 12, 2)).epsilon(1e-14));
  }
}

TEST_CASE("tilted periodic system keeps its mean gradient") {
  auto lat = std::make_shared<const TorusLattice>(6, 2);
  TiltedPeriodicSystem sys(lat, Potential::cosine_perturbed(0.5, 1.0), {0.8, -1.7}, 11);
  for (int k = 0; k < 300; ++k) {
    sys.step(sys.max_step());
    if (k % 50 == 0) {
      CHECK(sys.mean_gradient(0) == doctest::Approx(0.8).epsilon(1e-12));
      CHECK(sys.mean_gradient(1) == doctest::Approx(-1.7).epsilon(1e-12));
    }
  }
  const GradientField eta = sys.gradient_field();
  CHECK(antisymmetry_defect(*lat, eta) <= 1e-12);
  for (double s : plaquette_sums(*lat, eta)) CHECK(std::abs(s) <= 1e-12);
}

TEST_CASE("gaussian OU dynamics reaches the Fourier bond variance") {
  for (int d : {1, 2}) {
    CHECK(gaussian_bond_variance_fourier(8, d, 0) ==
          doctest::Approx(gaussian_bond_variance(8, d)).epsilon(1e-12));
  }
  auto lat = std::make_shared<const TorusLattice>(8, 2);
  TiltedPeriodicSystem sys(lat, Potential::gaussian(), {0.5, 0.0}, 21);
  const double dt = 0.02;
  for (int k = 0; k < 2000; ++k) sys.step(dt);
  std::vector<double> series;
  for (int k = 0; k < 64000; ++k) {
    sys.step(dt);
    series.push_back(mean_bond_square(sys, 0));
  }
  const EstimatorReport r = batch_means(series);
  const double exact = em_bond_variance(8, 2, dt);
  CAPTURE(r.estimate);
  CAPTURE(r.std_error);
  CHECK(std::abs(r.estimate - exact) <= 3.0 * r.std_error);
  // the continuum value differs by the O(dt) integrator bias only
  CHECK(exact == doctest::Approx(gaussian_bond_variance(8, 2)).epsilon(0.05));
}

TEST_CASE("trajectories are deterministic in the seed") {
  auto lat = std::make_shared<const TorusLattice>(5, 2);
  TiltedPeriodicSystem a(lat, Potential::cosine_perturbed(0.5, 1.0), {0.2, 0.1}, 7);
  TiltedPeriodicSystem b(lat, Potential::cosine_perturbed(0.5, 1.0), {0.2, 0.1}, 7);
  TiltedPeriodicSystem c(lat, Potential::cosine_perturbed(0.5, 1.0), {0.2, 0.1}, 8);
  for (int k = 0; k < 50; ++k) {
    a.step(a.max_step());
    b.step(b.max_step());
    c.step(c.max_step());
  }
  CHECK(a.heights() == b.heights());
  CHECK_FALSE(a.heights() == c.heights());
}

TEST_CASE("macroscopic height") {
  const DomainSpec spec = DomainSpec::box(1, {-0.5}, {0.5});
  SUBCASE("zero field") {
    const auto dom = make_domain(spec, 16);
    DirichletSystem sys(dom, Potential::gaussian(), kZero, kZero, 1);
    const MacroscopicField h = macro_height(sys, 0.0);
    for (double v : h.cells.values()) CHECK(v == 0.0);
    CHECK_THROWS_AS(macro_height(sys, 0.1), TimeMismatch);
    sys.advance_to(256 * 0.01, sys.max_step());
    CHECK_NOTHROW(macro_height(sys, 0.01));
  }
  SUBCASE("linearity") {
    const auto dom = make_domain(spec, 16);
    HeightField phi(dom->num_sites());
    for (std::size_t x = 0; x < phi.size(); ++x) phi[x] = std::cos(static_cast<double>(x));
    HeightField twice = phi;
    for (auto& v : twice.values) v *= 2.0;
    const MacroscopicField a = macro_height(*dom, phi, kZero);
    const MacroscopicField b = macro_height(*dom, twice, kZero);
    for (std::size_t k = 0; k < a.cells.size(); ++k) {
      CHECK(b.cells.values()[k] == 2.0 * a.cells.values()[k]);
    }
  }
  SUBCASE("initial data converges to h0") {
    const ScalarFunction f = [](const Point& p) { return std::cos(3.0 * p[0]); };
    CellField fine(1, {-0.5}, 1.0 / 2048, {2048, 1, 1});
    for (std::size_t k = 0; k < fine.size(); ++k) fine.values()[k] = f(fine.center(k));
    std::vector<double> gaps;
    for (int n : {16, 32, 64}) {
      const auto dom = make_domain(spec, n);
      DirichletSystem sys(dom, Potential::gaussian(), f, f, 1);
      gaps.push_back(l2_distance_squared(macro_height(sys, 0.0).cells, fine, spec));
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);
  }
}

TEST_CASE("energy diagnostic") {
  SUBCASE("smoke: tiny system, one seed") {
    const auto dom = make_domain(DomainSpec::box(1, {-1.0}, {1.0}), 4);
    CHECK(dom->interior().size() == 3);
    DirichletSystem sys(dom, Potential::gaussian(), kZero, bump(1, {0.0}, 0.8), 3);
    const std::vector<double> times{0.0, 0.05, 0.1, 0.2};
    const auto run = energy_trajectory(sys, times, sys.max_step());
    REQUIRE(run.size() == 4);
    for (std::size_t k = 0; k < run.size(); ++k) {
      CHECK(std::isfinite(run[k].h_norm2));
      CHECK(std::isfinite(run[k].dirichlet));
      if (k > 0) CHECK(run[k].dirichlet >= run[k - 1].dirichlet);
    }
    CHECK(run[0].dirichlet == 0.0);
    // at t = 0 the bound holds with any K >= 0
    const EnergyTrace trace = energy_diagnostic({run}, 1.0, 0.0);
    CHECK(trace.lhs[0] <= trace.rhs[0]);
  }
  SUBCASE("zero data: linear growth bounded by the calibrated K") {
    const auto dom = make_domain(DomainSpec::box(1, {-0.5}, {0.5}), 8);
    std::vector<double> times;
    for (int k = 0; k <= 8; ++k) times.push_back(0.25 * k);
    auto runs = [&](std::uint64_t base) {
      std::vector<std::vector<EnergyCheckpoint>> out;
      for (std::uint64_t r = 0; r < 32; ++r) {
        DirichletSystem sys(dom, Potential::gaussian(), kZero, kZero, derive_seed(base, r));
        out.push_back(energy_trajectory(sys, times, sys.max_step()));
      }
      return out;
    };
    const double k = fit_energy_constant(runs(1), 1.0);
    const EnergyTrace trace = energy_diagnostic(runs(2), 1.0, k);
    CHECK(trace.satisfied);
    CHECK(trace.violations == 0);
    CHECK(trace.monotone_energy);
    // least-squares slope of the left side
    double st = 0, sl = 0, stt = 0, stl = 0;
    const double n = static_cast<double>(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      st += times[i];
      sl += trace.lhs[i];
      stt += times[i] * times[i];
      stl += times[i] * trace.lhs[i];
    }
    const double slope = (n * stl - st * sl) / (n * stt - st * st);
    CAPTURE(slope);
    CAPTURE(k);
    CHECK(slope > 0.0);
    CHECK(slope <= 1.2 * k);
    // energy integral grows at rate 2 |D_N| / N^d for f = 0 (Gaussian identity)
    const double rate = 2.0 * dom->interior().size() / 8.0;
    CHECK(trace.mean_dirichlet.back() / times.back() == doctest::Approx(rate).epsilon(0.1));
  }
}
