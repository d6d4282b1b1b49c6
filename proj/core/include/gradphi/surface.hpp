#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gradphi/gibbs.hpp"

namespace gradphi {

struct SurfaceSettings {
  int side = 16;
  SamplerSettings sampler;
  int nodes = 8;                  ///< Gauss-Legendre nodes on the integration path
  bool quadrature_check = true;   ///< rerun with half the nodes to bound the rule error
};

/// Vector estimate with one standard error per component.
struct VectorEstimate {
  std::vector<double> value;
  std::vector<double> error;
};

/// grad sigma(u), component i = E[V'(eta(e_i))] on the N-torus.
VectorEstimate grad_sigma(const Potential& potential, int side, const std::vector<double>& u,
                          const SamplerSettings& settings, std::uint64_t seed);

struct SigmaEstimate {
  double value = 0.0;
  double mc_error = 0.0;          ///< propagated Monte Carlo error
  double quadrature_error = 0.0;  ///< max(0, |Q_n - Q_{n/2}| - 3 combined SE)
  double error = 0.0;             ///< mc_error + quadrature_error
  std::size_t runs = 0;
};

/// sigma(u) = int_0^1 u . grad sigma(s u) ds by Gauss-Legendre in s.
SigmaEstimate sigma(const Potential& potential, const std::vector<double>& u,
                    const SurfaceSettings& settings, std::uint64_t seed);

/// Same integral along the axis-aligned staircase 0 -> u_1 e_1 -> ... -> u.
SigmaEstimate sigma_staircase(const Potential& potential, const std::vector<double>& u,
                              const SurfaceSettings& settings, std::uint64_t seed);

// ---------------------------------------------------------------- convexity

struct ConvexityPair {
  std::vector<double> u;
  std::vector<double> v;
};

struct ConvexityReport {
  std::vector<ConvexityPair> pairs;
  std::vector<double> quotients;   ///< (u - v).(grad sigma(u) - grad sigma(v)) / |u - v|^2
  std::vector<double> errors;
  double c1 = 0.0;                 ///< min quotient
  double c1_error = 0.0;
  double c2 = 0.0;                 ///< max quotient
  double c2_error = 0.0;
  std::size_t non_positive = 0;
  bool all_finite = true;
  bool strictly_convex() const noexcept { return all_finite && non_positive == 0 && c1 > 0.0; }
};

/// Gradient oracle used by the probe.
using GradientOracle = std::function<VectorEstimate(const std::vector<double>&)>;

/// At least 20 pairs; a pair with u == v is rejected with InvalidArgument.
ConvexityReport convexity_probe(const std::vector<ConvexityPair>& pairs,
                                const GradientOracle& oracle);

/// `count` pairs drawn uniformly from [lower, upper]^d.
std::vector<ConvexityPair> random_pairs(int dim, double lower, double upper, std::size_t count,
                                        std::uint64_t seed);

/// Direct oracle: one grad_sigma run per distinct point (cached).
GradientOracle direct_oracle(const Potential& potential, int side,
                             const SamplerSettings& settings, std::uint64_t seed);

// ---------------------------------------------------------------- flux decomposition

struct FluxDecomposition {
  std::vector<double> tilt;
  std::vector<EstimatorReport> a_diag;   ///< A_ii(u)
  std::vector<EstimatorReport> a_vec;    ///< a_i(u)
  std::vector<EstimatorReport> flux;     ///< same-chain E[V'(eta(e_i))]
  std::vector<EstimatorReport> reconstructed;  ///< A_ii u_i + a_i per sample
  double min_sample_diag = 0.0;          ///< min over samples and bonds of the inner integral
  double max_sample_diag = 0.0;
};

/// A_ii = E int_0^1 V0''(eta(e_i) - lambda u_i) d lambda (8-node rule in lambda),
/// a_i = E[V0'(eta(e_i) - u_i)] + E[g'(eta(e_i))]; spatial averages per sample.
FluxDecomposition decompose_flux(const Potential& potential, int side,
                                 const std::vector<double>& u, const SamplerSettings& settings,
                                 std::uint64_t seed);

// ---------------------------------------------------------------- tables

struct TableGrid {
  int dim = 2;
  double lower = -2.0;
  double upper = 2.0;
  double step = 0.25;
};

struct TableProvenance {
  std::string potential;
  int side = 0;
  std::size_t sweeps = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// sigma and grad sigma on a tensor grid with multilinear interpolation of
/// the gradient. Queries outside the box are clamped and counted.
class SurfaceTensionTable {
 public:
  SurfaceTensionTable() = default;
  SurfaceTensionTable(int dim, double lower, double step, int count);

  int dim() const noexcept { return dim_; }
  double lower() const noexcept { return lower_; }
  double step() const noexcept { return step_; }
  int count() const noexcept { return count_; }
  double upper() const noexcept { return lower_ + step_ * (count_ - 1); }
  std::size_t num_nodes() const noexcept { return sigma_.size(); }

  std::vector<double> node(std::size_t k) const;
  std::size_t node_index(const std::vector<int>& j) const;
  std::vector<int> node_multi(std::size_t k) const;

  double& sigma(std::size_t k) { return sigma_[k]; }
  double sigma(std::size_t k) const { return sigma_[k]; }
  double& sigma_error(std::size_t k) { return sigma_err_[k]; }
  double sigma_error(std::size_t k) const { return sigma_err_[k]; }
  double& grad(std::size_t k, int i) { return grad_[k * dim_ + i]; }
  double grad(std::size_t k, int i) const { return grad_[k * dim_ + i]; }
  double& grad_error(std::size_t k, int i) { return grad_err_[k * dim_ + i]; }
  double grad_error(std::size_t k, int i) const { return grad_err_[k * dim_ + i]; }

  TableProvenance& provenance() noexcept { return provenance_; }
  const TableProvenance& provenance() const noexcept { return provenance_; }

  /// Multilinear interpolation of grad sigma at u (length dim). Returns true
  /// when u had to be clamped into the box.
  bool interpolate(const double* u, double* out) const;
  VectorEstimate interpolate(const std::vector<double>& u) const;

  std::size_t queries() const noexcept { return queries_.load(); }
  std::size_t clamps() const noexcept { return clamps_.load(); }
  void reset_counters() const noexcept {
    queries_ = 0;
    clamps_ = 0;
  }

  /// max over grid-neighbour pairs of |grad sigma(u) - grad sigma(v)| / |u - v|.
  double lipschitz_estimate() const;
  /// Monotonicity quotients over all grid-neighbour pairs.
  ConvexityReport convexity() const;

  SurfaceTensionTable(const SurfaceTensionTable& other);
  SurfaceTensionTable& operator=(const SurfaceTensionTable& other);

 private:
  int dim_ = 1;
  double lower_ = 0.0;
  double step_ = 1.0;
  int count_ = 1;
  std::vector<double> sigma_, sigma_err_, grad_, grad_err_;
  TableProvenance provenance_;
  mutable std::atomic<std::size_t> queries_{0};
  mutable std::atomic<std::size_t> clamps_{0};
};

/// grad sigma at every node (nodes in parallel, independent seeds); sigma by
/// trapezoid integration of grad sigma along grid lines from the origin, which
/// must be a node.
SurfaceTensionTable build_table(const Potential& potential, int side, const TableGrid& grid,
                                const SamplerSettings& settings, std::uint64_t seed);

/// Exact table of the Gaussian model (sigma = |u|^2 / 2), for tests and the PDE.
SurfaceTensionTable gaussian_table(const TableGrid& grid);

void write_table_csv(std::ostream& out, const SurfaceTensionTable& table);
SurfaceTensionTable read_table_csv(std::istream& in);

}  // namespace gradphi
