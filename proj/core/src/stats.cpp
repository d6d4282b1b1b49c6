#include "gradphi/stats.hpp"

#include <algorithm>
#include <cmath>

#include "gradphi/errors.hpp"

namespace gradphi {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

EstimatorReport batch_means(std::span<const double> series, int batches) {
  if (batches < 20) throw InvalidArgument("batch means needs at least 20 batches");
  const std::size_t n = series.size();
  const std::size_t size = n / static_cast<std::size_t>(batches);
  if (size == 0) {
    throw InvalidArgument("batch means needs at least one sample per batch");
  }
  const auto used = series.subspan(n - size * batches);
  std::vector<double> block(batches);
  for (int b = 0; b < batches; ++b) block[b] = mean(used.subspan(b * size, size));

  EstimatorReport r;
  r.samples = used.size();
  r.estimate = mean(block);
  r.std_error = std::sqrt(sample_variance(block) / batches);
  const double var = sample_variance(used);
  if (r.std_error > 0.0) {
    r.ess = var / (r.std_error * r.std_error);
  } else {
    r.ess = static_cast<double>(used.size());
  }
  return r;
}

double integrated_autocorrelation_time(std::span<const double> series, double window_c) {
  const std::size_t n = series.size();
  if (n < 4) return 0.5;
  const double m = mean(series);
  double c0 = 0.0;
  for (double x : series) c0 += (x - m) * (x - m);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return 0.5;
  double tau = 0.5;
  for (std::size_t t = 1; t < n / 2; ++t) {
    double ct = 0.0;
    for (std::size_t k = 0; k + t < n; ++k) ct += (series[k] - m) * (series[k + t] - m);
    ct /= static_cast<double>(n);
    tau += ct / c0;
    if (static_cast<double>(t) >= window_c * tau) break;
  }
  return std::max(tau, 0.5);
}

double combined_error(double a, double b) { return std::sqrt(a * a + b * b); }

bool within_sigma(double a, double sa, double b, double sb, double k, double floor) {
  return std::abs(a - b) <= k * combined_error(sa, sb) + floor;
}

}  // namespace gradphi
