#include "gradphi/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gradphi/errors.hpp"
#include "gradphi/quadrature.hpp"

namespace gradphi {

// ---------------------------------------------------------------- split pieces

double SplitPieces::v0(double x) const {
  const double ax = std::abs(x);
  if (ax <= threshold) {
    return 0.5 * curvature_at_m * x * x - 0.5 * curvature_at_m * threshold * threshold +
           value_at_m + alpha * threshold;
  }
  return v.value(x) + alpha * ax;
}

double SplitPieces::v0_first(double x) const {
  if (std::abs(x) <= threshold) return curvature_at_m * x;
  return v.first(x) + alpha * (x > 0 ? 1.0 : -1.0);
}

double SplitPieces::v0_second(double x) const {
  if (std::abs(x) <= threshold) return curvature_at_m;
  return v.second(x);
}

SplitPieces build_split(SymmetricFunction v, double threshold, double curvature_at_m) {
  if (!(threshold > 0.0)) throw InvalidArgument("split threshold M must be positive");
  if (!v.value || !v.first || !v.second) {
    throw InvalidArgument("split needs V, V' and V''");
  }
  SplitPieces pieces;
  pieces.threshold = threshold;
  pieces.curvature_at_m = curvature_at_m;
  pieces.value_at_m = v.value(threshold);
  pieces.alpha = curvature_at_m * threshold - v.first(threshold);
  pieces.v = std::move(v);
  return pieces;
}

// ---------------------------------------------------------------- potential

Potential Potential::gaussian() {
  Potential p;
  p.kind_ = Kind::kGaussian;
  p.name_ = "gaussian";
  p.constants_ = {1.0, 1.0, 0.0};
  return p;
}

Potential Potential::cosine_perturbed(double amplitude, double frequency) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("cosine amplitude must be >= 0");
  if (!(frequency > 0.0)) throw InvalidArgument("cosine frequency must be > 0");
  if (amplitude == 0.0) {
    Potential p = gaussian();
    return p;
  }
  Potential p;
  p.kind_ = Kind::kCosine;
  std::ostringstream name;
  name << "cosine{a=" << amplitude << ",kappa=" << frequency << "}";
  p.name_ = name.str();
  p.amplitude_ = amplitude;
  p.frequency_ = frequency;
  p.constants_ = {1.0, 1.0, amplitude * frequency + amplitude * frequency * frequency};
  return p;
}

Potential Potential::from_split(SplitPieces pieces, SplitConstants constants,
                                std::string name) {
  Potential p;
  p.kind_ = Kind::kSplit;
  p.name_ = std::move(name);
  p.constants_ = constants;
  p.split_ = std::make_shared<const SplitPieces>(std::move(pieces));
  return p;
}

double Potential::v0(double eta) const {
  if (kind_ == Kind::kSplit) return split_->v0(eta);
  return 0.5 * eta * eta;
}

double Potential::v0_first(double eta) const {
  if (kind_ == Kind::kSplit) return split_->v0_first(eta);
  return eta;
}

double Potential::v0_second(double eta) const {
  if (kind_ == Kind::kSplit) return split_->v0_second(eta);
  return 1.0;
}

double Potential::g(double eta) const {
  switch (kind_) {
    case Kind::kGaussian: return 0.0;
    case Kind::kCosine: return amplitude_ * std::cos(frequency_ * eta);
    case Kind::kSplit: break;
  }
  return value(eta) - v0(eta);
}

double Potential::g_first(double eta) const {
  switch (kind_) {
    case Kind::kGaussian: return 0.0;
    case Kind::kCosine: return -amplitude_ * frequency_ * std::sin(frequency_ * eta);
    case Kind::kSplit: break;
  }
  return first(eta) - v0_first(eta);
}

double Potential::g_second(double eta) const {
  switch (kind_) {
    case Kind::kGaussian: return 0.0;
    case Kind::kCosine:
      return -amplitude_ * frequency_ * frequency_ * std::cos(frequency_ * eta);
    case Kind::kSplit: break;
  }
  return second(eta) - v0_second(eta);
}

Potential make_gaussian() { return Potential::gaussian(); }

Potential make_cosine_perturbed(double amplitude, double frequency) {
  return Potential::cosine_perturbed(amplitude, frequency);
}

// ---------------------------------------------------------------- certification

namespace {

std::size_t grid_points(const CertificationGrid& grid) {
  return static_cast<std::size_t>(std::floor((grid.upper - grid.lower) / grid.step + 1e-9)) + 1;
}

}  // namespace

Potential split_potential(SymmetricFunction v, double threshold, double curvature_at_m,
                          std::string name) {
  SplitPieces pieces = build_split(std::move(v), threshold, curvature_at_m);

  const double reach = std::max(3.0 * threshold, 50.0);
  CertificationGrid grid{-reach, reach, std::max(1e-3, 2.0 * reach / 2e5)};
  const std::size_t n = grid_points(grid);
  double min_pp = INFINITY;
  double max_pp = -INFINITY;
  std::vector<double> g_bound(n), v0pp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = grid.lower + grid.step * static_cast<double>(k);
    const double pp = pieces.v0_second(x);
    v0pp[k] = pp;
    min_pp = std::min(min_pp, pp);
    max_pp = std::max(max_pp, pp);
    const double gp = pieces.v.first(x) - pieces.v0_first(x);
    const double gpp = pieces.v.second(x) - pieces.v0_second(x);
    g_bound[k] = std::abs(gp) + std::abs(gpp);
  }
  if (!std::isfinite(min_pp) || !std::isfinite(max_pp) || min_pp < 1e-6) {
    std::ostringstream msg;
    msg << "V0'' is not bounded below by a positive constant on the grid (min " << min_pp << ")";
    throw SplitFailed(msg.str());
  }

  // growth check on the outermost 1% of either edge
  const std::size_t edge = std::max<std::size_t>(8, n / 100);
  auto growing = [&](auto begin, auto end) {
    double prev = *begin;
    bool strictly = true;
    for (auto it = std::next(begin); it != end; ++it) {
      if (!(*it > prev)) strictly = false;
      prev = *it;
    }
    return strictly;
  };
  const double c_g = *std::max_element(g_bound.begin(), g_bound.end());
  const bool right_growth = growing(g_bound.end() - edge, g_bound.end());
  const bool left_growth = growing(g_bound.rend() - edge, g_bound.rend());
  if (!std::isfinite(c_g) || right_growth || left_growth) {
    throw SplitFailed("|g'| + |g''| grows at the edge of the certification grid");
  }
  if (growing(v0pp.end() - edge, v0pp.end()) || growing(v0pp.rend() - edge, v0pp.rend())) {
    throw SplitFailed("V0'' grows at the edge of the certification grid, so c_+ is unbounded");
  }

  const SplitConstants constants{min_pp, max_pp, c_g};
  return Potential::from_split(std::move(pieces), constants, std::move(name));
}

CertificationReport certify(const Potential& potential, const CertificationGrid& grid) {
  if (!(grid.step > 0.0)) throw InvalidArgument("certification step must be positive");
  if (grid.lower > -20.0 || grid.upper < 20.0) {
    throw InvalidArgument("certification grid must cover at least [-20, 20]");
  }
  CertificationReport report;
  report.declared = potential.constants();
  report.min_v0_second = INFINITY;
  report.max_v0_second = -INFINITY;
  const std::size_t n = grid_points(grid);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = grid.lower + grid.step * static_cast<double>(k);
    const double pp = potential.v0_second(x);
    report.min_v0_second = std::min(report.min_v0_second, pp);
    report.max_v0_second = std::max(report.max_v0_second, pp);
    report.max_g_bound = std::max(
        report.max_g_bound, std::abs(potential.g_first(x)) + std::abs(potential.g_second(x)));
    const double v = potential.value(x);
    report.max_symmetry_defect =
        std::max(report.max_symmetry_defect, std::abs(v - potential.value(-x)));
    report.max_split_defect =
        std::max(report.max_split_defect,
                 std::abs(v - potential.v0(x) - potential.g(x)) / (1.0 + std::abs(v)));
  }

  const auto& c = report.declared;
  const double slack = 1e-12;
  if (!(c.c_minus > 0.0)) report.failures.push_back("declared c_minus is not positive");
  if (report.min_v0_second < c.c_minus - slack) report.failures.push_back("V0'' below c_minus");
  if (report.max_v0_second > c.c_plus + slack) report.failures.push_back("V0'' above c_plus");
  if (report.max_g_bound > c.c_g + slack) report.failures.push_back("|g'| + |g''| above C_g");
  if (report.max_split_defect > 1e-10) report.failures.push_back("V != V0 + g");
  if (report.max_symmetry_defect > 1e-10) report.failures.push_back("V is not symmetric");
  report.passed = report.failures.empty();
  return report;
}

double beta0(double c_minus, double c_plus, double d_plus, double q, double gpp_lq_norm,
             int dim) {
  if (!(c_minus > 0.0) || !(c_plus > 0.0) || !(d_plus > 0.0) || !(gpp_lq_norm > 0.0)) {
    throw InvalidArgument("beta0 needs positive c_-, c_+, d_+ and ||g''||_q");
  }
  if (!(q >= 1.0)) throw InvalidArgument("beta0 needs q >= 1");
  if (dim < 1) throw InvalidArgument("beta0 needs a positive dimension");
  const double numerator = std::pow(c_minus, 3.0 * q);
  const double denominator = 2.0 * dim * std::pow(2.0, 2.0 * q) *
                             std::pow(c_plus + d_plus, q + 1.0) *
                             std::pow(gpp_lq_norm, 2.0 * q);
  return numerator / denominator;
}

double lq_norm(const std::function<double(double)>& f, double q, double lower, double upper,
               int panels) {
  if (!(q >= 1.0)) throw InvalidArgument("L^q norm needs q >= 1");
  const auto& rule = gauss_legendre(8);
  const double h = (upper - lower) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lower + h * p;
    acc += rule.integrate([&](double x) { return std::pow(std::abs(f(x)), q); }, a, a + h);
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace gradphi
