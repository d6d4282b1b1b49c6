#include "gradphi/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "gradphi/errors.hpp"
#include "gradphi/parallel.hpp"
#include "gradphi/stats.hpp"

namespace gradphi {

std::vector<ConvergenceRow> ConvergenceTable::at_time(double t) const {
  std::vector<ConvergenceRow> out;
  for (const auto& r : rows) {
    if (std::abs(r.time - t) <= 1e-12 * std::max(1.0, std::abs(t))) out.push_back(r);
  }
  std::sort(out.begin(), out.end(),
            [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.scale < b.scale; });
  return out;
}

bool ConvergenceTable::decreasing(double t, double k) const {
  const auto r = at_time(t);
  if (r.size() < 2) return false;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double drop = r[i - 1].gap - r[i].gap;
    if (!(drop > 0.0) || drop < k * combined_error(r[i - 1].error, r[i].error)) return false;
  }
  return true;
}

ConvergenceTable run(const HydroExperiment& exp) {
  if (exp.scales.empty()) throw InvalidArgument("hydro experiment needs at least one scale");
  if (exp.times.empty()) throw InvalidArgument("hydro experiment needs at least one time");
  if (exp.realizations < 2) throw InvalidArgument("hydro experiment needs at least 2 realizations");
  if (!exp.boundary || !exp.initial) throw InvalidArgument("hydro experiment needs f and h0");
  std::vector<double> times = exp.times;
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0) {
    throw InvalidArgument("checkpoint times must be ascending and non-negative");
  }

  const auto flux = exp.flux ? exp.flux : std::make_shared<const LinearFlux>(1.0);
  const int n_max = *std::max_element(exp.scales.begin(), exp.scales.end());
  const int cells = exp.pde_cells_per_unit > 0 ? exp.pde_cells_per_unit : 4 * n_max;
  if (cells < 2 * n_max) {
    throw InvalidArgument("PDE grid must be at least twice as fine as the largest N");
  }
  const PdeGrid grid(exp.domain, cells, exp.boundary);
  const PdeSolution reference = solve(grid, exp.initial, *flux, times.back(), 0.0, times);
  std::vector<const CellField*> ref_at(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) ref_at[k] = &reference.snapshots[k].h;

  const unsigned workers = exp.workers == 0 ? default_workers() : exp.workers;
  ConvergenceTable table;
  for (int n : exp.scales) {
    auto domain = std::make_shared<const DiscretizedDomain>(exp.domain, n);
    const double n2 = static_cast<double>(n) * n;
    std::vector<std::vector<double>> gaps(times.size(),
                                          std::vector<double>(exp.realizations, 0.0));
    parallel_for(
        static_cast<std::size_t>(exp.realizations),
        [&](std::size_t r) {
          const std::uint64_t seed =
              derive_seed(exp.seed, (static_cast<std::uint64_t>(n) << 32) | r);
          DirichletSystem sys(domain, exp.potential, exp.boundary, exp.initial, seed);
          const double dt = exp.dt > 0.0 ? exp.dt : sys.max_step();
          for (std::size_t k = 0; k < times.size(); ++k) {
            sys.advance_to(n2 * times[k], dt);
            const MacroscopicField h = macro_height(sys, times[k]);
            gaps[k][r] = l2_compare(h.cells, *ref_at[k], exp.domain);
          }
        },
        workers);
    for (std::size_t k = 0; k < times.size(); ++k) {
      ConvergenceRow row;
      row.scale = n;
      row.time = times[k];
      row.gap = mean(gaps[k]);
      row.error = std::sqrt(sample_variance(gaps[k]) / exp.realizations);
      row.realizations = exp.realizations;
      if (!std::isfinite(row.gap) || !std::isfinite(row.error)) {
        throw NonFinite("non-finite gap at N=" + std::to_string(n));
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ReportFiles report(const ConvergenceTable& table, const std::string& dir, const std::string& stem,
                   const std::vector<std::string>& header) {
  if (table.rows.empty()) throw InvalidArgument("cannot report an empty convergence table");
  std::filesystem::create_directories(dir);
  ReportFiles files{dir + "/" + stem + ".csv", dir + "/" + stem + ".dat", dir + "/" + stem + ".gp"};

  std::ofstream csv(files.csv);
  for (const auto& h : header) csv << "# " << h << '\n';
  csv << "N,t,gap,gap_se,realizations\n";
  for (const auto& r : table.rows) {
    csv << r.scale << ',' << num(r.time) << ',' << num(r.gap) << ',' << num(r.error) << ','
        << r.realizations << '\n';
  }

  std::vector<double> times;
  for (const auto& r : table.rows) {
    if (std::find(times.begin(), times.end(), r.time) == times.end()) times.push_back(r.time);
  }
  std::ofstream dat(files.data);
  for (const auto& h : header) dat << "# " << h << '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0) dat << "\n\n";
    dat << "# t = " << num(times[k]) << " (N gap gap_se)\n";
    for (const auto& r : table.at_time(times[k])) {
      dat << r.scale << ' ' << num(r.gap) << ' ' << num(r.error) << '\n';
    }
  }

  std::ofstream gp(files.script);
  for (const auto& h : header) gp << "# " << h << '\n';
  gp << "set logscale xy\n";
  gp << "set xlabel 'N'\n";
  gp << "set ylabel 'E ||h^N(t) - h(t)||^2'\n";
  gp << "set key top right\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    gp << "set label " << k + 1 << " 't = " << num(times[k])
       << ": monotone decrease (2 SE) " << (table.decreasing(times[k]) ? "yes" : "no")
       << "' at graph 0.05, graph " << num(0.95 - 0.05 * k) << '\n';
  }
  gp << "plot ";
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0) gp << ", \\\n     ";
    gp << "'" << stem << ".dat' index " << k << " using 1:2:3 with yerrorlines title 't = "
       << num(times[k]) << "'";
  }
  gp << '\n';
  if (!csv || !dat || !gp) throw InvalidArgument("could not write report files in " + dir);
  return files;
}

}  // namespace gradphi
