#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gradphi {

/// Monte Carlo estimate with batch-means error bar.
struct EstimatorReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double ess = 0.0;            ///< effective sample size, sample variance / SE^2
  std::size_t samples = 0;     ///< recorded (thinned) states
  std::size_t sweeps = 0;      ///< sampler sweeps after burn-in
};

inline constexpr int kDefaultBatches = 32;

/// Batch means over `batches` equal consecutive blocks; a remainder of fewer
/// than `batches` samples is dropped from the start. Needs at least 20
/// batches and one sample per batch.
EstimatorReport batch_means(std::span<const double> series, int batches = kDefaultBatches);

/// Integrated autocorrelation time 1/2 + sum rho(t) with Sokal's automatic
/// window (smallest W with W >= c * tau(W)).
double integrated_autocorrelation_time(std::span<const double> series, double window_c = 5.0);

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

/// Combined standard error of a difference of independent estimates.
double combined_error(double a, double b);

/// |a - b| <= k * sqrt(sa^2 + sb^2), with an absolute floor for exact estimators.
bool within_sigma(double a, double sa, double b, double sb, double k = 3.0,
                  double floor = 1e-12);

}  // namespace gradphi
