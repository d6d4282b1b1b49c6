#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gradphi/dynamics.hpp"
#include "gradphi/pde.hpp"

namespace gradphi {

struct HydroExperiment {
  Potential potential = Potential::gaussian();
  DomainSpec domain;
  ScalarFunction boundary;                 ///< f
  ScalarFunction initial;                  ///< h0
  std::vector<int> scales{8, 16, 32};
  std::vector<double> times{0.05};         ///< macroscopic checkpoint times
  int realizations = 32;
  std::shared_ptr<const FluxProvider> flux;  ///< defaults to grad sigma(p) = p
  std::uint64_t seed = 1;
  double dt = 0.0;                         ///< microscopic SDE step; 0 = stability cap
  int pde_cells_per_unit = 0;              ///< 0 = 4 * max N
  unsigned workers = 0;                    ///< 0 = all cores, 1 = serial
};

struct ConvergenceRow {
  int scale = 0;
  double time = 0.0;
  double gap = 0.0;      ///< mean over realizations of ||h^N(t) - h(t)||^2_{L^2(D)}
  double error = 0.0;    ///< standard error of that mean
  int realizations = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceRow> at_time(double t) const;
  /// Gap strictly decreasing in N at time t with each drop >= k combined SE.
  bool decreasing(double t, double k = 2.0) const;
};

/// Simulate each (N, seed) pair to every checkpoint time and compare the
/// macroscopic height with the PDE solution started from h0.
ConvergenceTable run(const HydroExperiment& experiment);

struct ReportFiles {
  std::string csv;
  std::string data;
  std::string script;
};

/// Writes <dir>/<stem>.csv, <stem>.dat (gnuplot data, one block per time)
/// and <stem>.gp (log-log gap against N). `header` lines are prefixed with
/// '# ' in every file. Throws InvalidArgument for an empty table.
ReportFiles report(const ConvergenceTable& table, const std::string& dir, const std::string& stem,
                   const std::vector<std::string>& header = {});

}  // namespace gradphi
