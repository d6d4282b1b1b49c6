#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gradphi {

/// Constants of the split V = V0 + g: c_minus <= V0'' <= c_plus and
/// |g'| + |g''| <= c_g.
struct SplitConstants {
  double c_minus = 1.0;
  double c_plus = 1.0;
  double c_g = 0.0;
};

/// A symmetric C^2 function given by value and first two derivatives.
struct SymmetricFunction {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;
};

/// Pieces of the explicit split built from a potential that is uniformly
/// convex outside [-M, M]. V0 is the quadratic continuation of V inside the
/// window, glued to V + alpha |x| outside, with alpha = V''(M) M - V'(M).
struct SplitPieces {
  SymmetricFunction v;
  double threshold = 1.0;       ///< M
  double curvature_at_m = 1.0;  ///< V''(M)
  double value_at_m = 0.0;      ///< V(M)
  double alpha = 0.0;

  double v0(double x) const;
  double v0_first(double x) const;
  double v0_second(double x) const;
};

/// Build the split pieces without certifying them. Requires M > 0.
SplitPieces build_split(SymmetricFunction v, double threshold, double curvature_at_m);

/// Interaction potential with a certified non-convex decomposition.
/// Evaluators are pure and the object is immutable, so one instance can be
/// shared by any number of chains.
class Potential {
 public:
  enum class Kind { kGaussian, kCosine, kSplit };

  /// V(eta) = eta^2 / 2.
  static Potential gaussian();
  /// V(eta) = eta^2 / 2 + a cos(kappa eta); V0 = eta^2 / 2, g = a cos(kappa eta).
  static Potential cosine_perturbed(double amplitude, double frequency);
  /// Wrap already-certified split pieces.
  static Potential from_split(SplitPieces pieces, SplitConstants constants, std::string name);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const SplitConstants& constants() const noexcept { return constants_; }
  double amplitude() const noexcept { return amplitude_; }
  double frequency() const noexcept { return frequency_; }

  double value(double eta) const {
    switch (kind_) {
      case Kind::kGaussian: return 0.5 * eta * eta;
      case Kind::kCosine: return 0.5 * eta * eta + amplitude_ * std::cos(frequency_ * eta);
      case Kind::kSplit: break;
    }
    return split_->v.value(eta);
  }

  double first(double eta) const {
    switch (kind_) {
      case Kind::kGaussian: return eta;
      case Kind::kCosine: return eta - amplitude_ * frequency_ * std::sin(frequency_ * eta);
      case Kind::kSplit: break;
    }
    return split_->v.first(eta);
  }

  double second(double eta) const {
    switch (kind_) {
      case Kind::kGaussian: return 1.0;
      case Kind::kCosine:
        return 1.0 - amplitude_ * frequency_ * frequency_ * std::cos(frequency_ * eta);
      case Kind::kSplit: break;
    }
    return split_->v.second(eta);
  }

  double v0(double eta) const;
  double v0_first(double eta) const;
  double v0_second(double eta) const;
  double g(double eta) const;
  double g_first(double eta) const;
  double g_second(double eta) const;

  /// True when V0 is exactly eta^2 / 2 (Gaussian and cosine families).
  bool has_unit_quadratic_v0() const noexcept { return kind_ != Kind::kSplit; }

 private:
  Potential() = default;

  Kind kind_ = Kind::kGaussian;
  std::string name_;
  SplitConstants constants_;
  double amplitude_ = 0.0;
  double frequency_ = 1.0;
  std::shared_ptr<const SplitPieces> split_;
};

Potential make_gaussian();
Potential make_cosine_perturbed(double amplitude, double frequency);

/// Split a symmetric potential that satisfies c <= V'' <= c' outside [-M, M],
/// then certify the constants on a grid covering [-max(3M, 50), max(3M, 50)].
/// Throws SplitFailed when V0'' is not bounded below by a positive constant on
/// the grid or |g'| + |g''| keeps growing at the grid edge.
Potential split_potential(SymmetricFunction v, double threshold, double curvature_at_m,
                          std::string name = "split");

struct CertificationGrid {
  double lower = -50.0;
  double upper = 50.0;
  double step = 1e-3;
};

struct CertificationReport {
  double min_v0_second = 0.0;
  double max_v0_second = 0.0;
  double max_g_bound = 0.0;          ///< max |g'| + |g''|
  double max_symmetry_defect = 0.0;  ///< max |V(eta) - V(-eta)|
  double max_split_defect = 0.0;     ///< max |V - V0 - g| / (1 + |V|)
  SplitConstants declared;
  bool passed = false;
  std::vector<std::string> failures;
};

/// Scan the grid and compare against the declared constants. Failures are
/// carried in the report. The grid must cover at least [-20, 20].
CertificationReport certify(const Potential& potential, const CertificationGrid& grid = {});

/// High-temperature threshold
///   beta0 = c_-^{3q} / (2d 2^{2q} (c_+ + d_+)^{q+1} ||g''||_{L^q}^{2q}).
double beta0(double c_minus, double c_plus, double d_plus, double q, double gpp_lq_norm,
             int dim);

struct TemperatureRegime {
  double beta = 1.0;
  double c_minus = 1.0;
  double c_plus = 1.0;
  double d_plus = 0.0;
  double q = 1.0;
  double gpp_lq_norm = 1.0;
  int dim = 1;

  double threshold() const {
    return beta0(c_minus, c_plus, d_plus, q, gpp_lq_norm, dim);
  }
  bool high_temperature() const { return beta <= threshold(); }
};

/// ||f||_{L^q} over [lower, upper] by composite Gauss-Legendre.
double lq_norm(const std::function<double(double)>& f, double q, double lower, double upper,
               int panels = 4000);

}  // namespace gradphi
