#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gradphi/errors.hpp"
#include "gradphi/potential.hpp"

using namespace gradphi;

namespace {

// eta^2/2 + 2 exp(-eta^2): non-convex at the origin, uniformly convex for |eta| >= 2.
SymmetricFunction double_well() {
  return {[](double x) { return 0.5 * x * x + 2.0 * std::exp(-x * x); },
          [](double x) { return x - 4.0 * x * std::exp(-x * x); },
          [](double x) { return 1.0 + 2.0 * (4.0 * x * x - 2.0) * std::exp(-x * x); }};
}

std::vector<Potential> shipped() {
  return {Potential::gaussian(), Potential::cosine_perturbed(0.2, 1.0),
          Potential::cosine_perturbed(2.0, 1.0), Potential::cosine_perturbed(0.5, 3.0),
          split_potential(double_well(), 2.0, double_well().second(2.0))};
}

}  // namespace

TEST_CASE("gaussian potential") {
  const Potential p = make_gaussian();
  CHECK(p.value(2.0) == 2.0);
  CHECK(p.first(2.0) == 2.0);
  CHECK(p.second(-3.7) == 1.0);
  CHECK(p.g_first(1.3) == 0.0);
  CHECK(p.g_second(1.3) == 0.0);
  CHECK(p.constants().c_minus == 1.0);
  CHECK(p.constants().c_plus == 1.0);
  CHECK(p.constants().c_g == 0.0);
  for (double x : {-4.0, -0.3, 0.0, 2.5}) CHECK(p.value(x) == p.v0(x) + p.g(x));
  const CertificationReport r = certify(p);
  CHECK(r.passed);
  CHECK(r.min_v0_second == 1.0);
  CHECK(r.max_v0_second == 1.0);
  CHECK(r.max_symmetry_defect == 0.0);
}

TEST_CASE("cosine perturbed potential") {
  CHECK(make_cosine_perturbed(0.0, 1.0).kind() == Potential::Kind::kGaussian);
  const Potential p = make_cosine_perturbed(2.0, 1.0);
  CHECK(p.second(std::numbers::pi) == doctest::Approx(3.0));
  CHECK(p.second(0.0) == doctest::Approx(-1.0));
  CHECK(p.constants().c_g == doctest::Approx(4.0));
  CHECK_THROWS_AS(make_cosine_perturbed(-1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_cosine_perturbed(1.0, 0.0), InvalidArgument);
}

TEST_CASE("certification scan of the cosine potential reports the true maximum") {
  const CertificationReport r = certify(make_cosine_perturbed(2.0, 1.0));
  CHECK(r.passed);
  // 2|sin| + 2|cos| peaks at 2 sqrt 2, below the declared a kappa + a kappa^2 = 4
  CHECK(r.max_g_bound == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(r.max_g_bound <= r.declared.c_g);
}

TEST_CASE("certification flags an asymmetric potential") {
  const SymmetricFunction tilted{[](double x) { return 0.5 * x * x + x; },
                                 [](double x) { return x + 1.0; }, [](double) { return 1.0; }};
  const Potential p = Potential::from_split(build_split(tilted, 1.0, 1.0), {1.0, 1.0, 0.0}, "tilted");
  const CertificationReport r = certify(p);
  CHECK_FALSE(r.passed);
  CHECK(r.max_symmetry_defect > 0.0);
}

TEST_CASE("certification grid must cover [-20, 20]") {
  CHECK_THROWS_AS(certify(make_gaussian(), {-10.0, 10.0, 1e-3}), InvalidArgument);
}

TEST_CASE("split of the gaussian is trivial") {
  const SymmetricFunction v{[](double x) { return 0.5 * x * x; }, [](double x) { return x; },
                            [](double) { return 1.0; }};
  const SplitPieces s = build_split(v, 1.0, 1.0);
  CHECK(s.alpha == 0.0);
  for (double x : {-3.0, -1.0, -0.2, 0.0, 0.7, 1.0, 2.5}) {
    CHECK(s.v0(x) == doctest::Approx(0.5 * x * x));
  }
  const Potential p = split_potential(v, 1.0, 1.0);
  CHECK(p.constants().c_minus == doctest::Approx(1.0));
  CHECK(p.constants().c_g == doctest::Approx(0.0));
}

TEST_CASE("split formulas for eta^2/2 + cos eta at M = pi") {
  const SymmetricFunction v{[](double x) { return 0.5 * x * x + std::cos(x); },
                            [](double x) { return x - std::sin(x); },
                            [](double x) { return 1.0 - std::cos(x); }};
  const double m = std::numbers::pi;
  const SplitPieces s = build_split(v, m, v.second(m));
  CHECK(s.alpha == doctest::Approx(m));
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.9}) {
    CHECK(s.v0(x) == doctest::Approx(x * x + v.value(m)));
  }
  // V'' = 1 - cos touches zero outside [-pi, pi], so no positive c_- exists
  CHECK_THROWS_AS(split_potential(v, m, v.second(m)), SplitFailed);
}

TEST_CASE("split V0 is C1 at the threshold") {
  const SymmetricFunction v = double_well();
  const double m = 2.0;
  const SplitPieces s = build_split(v, m, v.second(m));
  for (double edge : {m, -m}) {
    CHECK(std::abs(s.v0(edge - 1e-8) - s.v0(edge + 1e-8)) <= 1e-7);
    CHECK(std::abs(s.v0_first(edge - 1e-8) - s.v0_first(edge + 1e-8)) <= 1e-7);
    CHECK(std::abs(s.v0_second(edge - 1e-8) - s.v0_second(edge + 1e-8)) <= 1e-6);
  }
  CHECK_THROWS_AS(build_split(v, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("certified split of a double well") {
  const SymmetricFunction v = double_well();
  CHECK(v.second(0.0) < 0.0);
  const Potential p = split_potential(v, 2.0, v.second(2.0), "double-well");
  CHECK(p.constants().c_minus >= 1.0 - 1e-9);
  CHECK(p.constants().c_plus == doctest::Approx(v.second(2.0)).epsilon(1e-6));
  const CertificationReport r = certify(p);
  CHECK(r.passed);
  CHECK(r.max_split_defect <= 1e-10);
}

TEST_CASE("split fails without a finite c_plus") {
  const SymmetricFunction quartic{[](double x) { return x * x * x * x; },
                                  [](double x) { return 4 * x * x * x; },
                                  [](double x) { return 12 * x * x; }};
  CHECK_THROWS_AS(split_potential(quartic, 1.0, 12.0), SplitFailed);
}

TEST_CASE("split identity, derivative consistency and Lipschitz drift on shipped potentials") {
  for (const Potential& p : shipped()) {
    CAPTURE(p.name());
    const auto& c = p.constants();
    double prev_first = p.first(-10.0);
    for (double x = -10.0; x <= 10.0; x += 0.01) {
      CHECK(std::abs(p.value(x) - p.v0(x) - p.g(x)) <= 1e-10 * (1.0 + std::abs(p.value(x))));
      CHECK(std::abs(p.value(x) - p.value(-x)) <= 1e-10);
      const double h = 1e-4;
      // skip the kink in V0'' of the split at +-M
      if (p.kind() != Potential::Kind::kSplit || std::abs(std::abs(x) - 2.0) > 2 * h) {
        CHECK(std::abs((p.value(x + h) - p.value(x - h)) / (2 * h) - p.first(x)) <= 1e-6);
        CHECK(std::abs((p.first(x + h) - p.first(x - h)) / (2 * h) - p.second(x)) <= 1e-6);
      }
      if (x > -10.0) {
        const double slope = std::abs(p.first(x) - prev_first) / 0.01;
        CHECK(slope <= c.c_plus + c.c_g + 1e-9);
      }
      prev_first = p.first(x);
    }
  }
}

TEST_CASE("beta0 formula") {
  CHECK(beta0(1, 1, 1, 1, 1, 1) == doctest::Approx(1.0 / 32));
  const double b = beta0(0.8, 1.3, 0.4, 1.0, 0.7, 2);
  CHECK(beta0(0.8, 1.3, 0.4, 1.0, 1.4, 2) == doctest::Approx(b / 4));
  CHECK(beta0(0.8, 1.3, 0.4, 1.0, 0.7, 4) == doctest::Approx(b / 2));
  CHECK_THROWS_AS(beta0(0, 1, 1, 1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(beta0(1, 1, 1, 0.5, 1, 1), InvalidArgument);

  // ||g''||_{L^1} of a cos(eta) over one period is 4a
  const double norm = lq_norm([](double x) { return 0.5 * std::cos(x); }, 1.0, 0.0,
                              2 * std::numbers::pi);
  CHECK(norm == doctest::Approx(2.0).epsilon(1e-10));
  const TemperatureRegime r{0.01, 1, 1, 1, 1, 1, 1};
  CHECK(r.high_temperature());
}
