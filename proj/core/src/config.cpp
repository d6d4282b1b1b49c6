#include "gradphi/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gradphi/errors.hpp"
#include "gradphi/pde.hpp"
#include "json.hpp"

namespace gradphi {

using nlohmann::json;

namespace {

/// Reads fields of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + child(key) + "'");
    }
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("wrong type for '" + child(key) + "'");
    }
  }

  template <class F>
  void section(const char* key, F&& f) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    Section sub(*it, child(key));
    f(sub);
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }
  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_function(Section& s, FunctionConfig& f) {
  s.read("kind", f.kind);
  s.read("value", f.value);
  s.read("slope", f.slope);
  s.read("center", f.center);
  s.read("radius", f.radius);
  s.read("amplitude", f.amplitude);
}

json function_json(const FunctionConfig& f) {
  return json{{"kind", f.kind},         {"value", f.value},   {"slope", f.slope},
              {"center", f.center},     {"radius", f.radius}, {"amplitude", f.amplitude}};
}

RunConfig from_json(const json& j) {
  RunConfig c;
  Section root(j, "");
  root.section("potential", [&](Section& s) {
    s.read("kind", c.potential.kind);
    s.read("amplitude", c.potential.amplitude);
    s.read("frequency", c.potential.frequency);
    s.read("threshold", c.potential.threshold);
  });
  root.section("lattice", [&](Section& s) {
    s.read("dim", c.lattice.dim);
    s.read("side", c.lattice.side);
    s.read("tilt", c.lattice.tilt);
  });
  root.section("domain", [&](Section& s) {
    s.read("kind", c.domain.kind);
    s.read("lower", c.domain.lower);
    s.read("upper", c.domain.upper);
    s.read("center", c.domain.center);
    s.read("radius", c.domain.radius);
  });
  root.section("sampler", [&](Section& s) {
    s.read("kind", c.sampler.kind);
    s.read("step", c.sampler.step);
    s.read("burn_in", c.sampler.burn_in);
    s.read("thinning", c.sampler.thinning);
    s.read("sweeps", c.sampler.sweeps);
    s.read("batches", c.sampler.batches);
  });
  root.section("surface", [&](Section& s) {
    s.read("nodes", c.surface.nodes);
    s.read("quadrature_check", c.surface.quadrature_check);
    s.read("grid_lower", c.surface.grid_lower);
    s.read("grid_upper", c.surface.grid_upper);
    s.read("grid_step", c.surface.grid_step);
    s.read("pairs", c.surface.pairs);
    s.read("pair_lower", c.surface.pair_lower);
    s.read("pair_upper", c.surface.pair_upper);
  });
  root.section("pde", [&](Section& s) {
    s.read("cells_per_unit", c.pde.cells_per_unit);
    s.read("horizon", c.pde.horizon);
    s.read("dt", c.pde.dt);
    s.read("flux", c.pde.flux);
    s.read("table", c.pde.table);
    s.section("initial", [&](Section& f) { read_function(f, c.pde.initial); });
    s.section("boundary", [&](Section& f) { read_function(f, c.pde.boundary); });
  });
  root.section("experiment", [&](Section& s) {
    s.read("scales", c.experiment.scales);
    s.read("times", c.experiment.times);
    s.read("realizations", c.experiment.realizations);
    s.read("dt", c.experiment.dt);
    s.read("pde_cells_per_unit", c.experiment.pde_cells_per_unit);
  });
  root.section("dlr", [&](Section& s) {
    s.read("box", c.dlr.box);
    s.read("samples", c.dlr.samples);
    s.read("thinning", c.dlr.thinning);
    s.read("bins", c.dlr.bins);
    s.read("tolerance", c.dlr.tolerance);
  });
  root.read("seed", c.seed);
  root.read("output_dir", c.output_dir);
  root.read("threads", c.threads);
  root.read("serial", c.serial);
  return c;
}

json to_json(const RunConfig& c) {
  return json{
      {"potential",
       {{"kind", c.potential.kind},
        {"amplitude", c.potential.amplitude},
        {"frequency", c.potential.frequency},
        {"threshold", c.potential.threshold}}},
      {"lattice", {{"dim", c.lattice.dim}, {"side", c.lattice.side}, {"tilt", c.lattice.tilt}}},
      {"domain",
       {{"kind", c.domain.kind},
        {"lower", c.domain.lower},
        {"upper", c.domain.upper},
        {"center", c.domain.center},
        {"radius", c.domain.radius}}},
      {"sampler",
       {{"kind", c.sampler.kind},
        {"step", c.sampler.step},
        {"burn_in", c.sampler.burn_in},
        {"thinning", c.sampler.thinning},
        {"sweeps", c.sampler.sweeps},
        {"batches", c.sampler.batches}}},
      {"surface",
       {{"nodes", c.surface.nodes},
        {"quadrature_check", c.surface.quadrature_check},
        {"grid_lower", c.surface.grid_lower},
        {"grid_upper", c.surface.grid_upper},
        {"grid_step", c.surface.grid_step},
        {"pairs", c.surface.pairs},
        {"pair_lower", c.surface.pair_lower},
        {"pair_upper", c.surface.pair_upper}}},
      {"pde",
       {{"cells_per_unit", c.pde.cells_per_unit},
        {"horizon", c.pde.horizon},
        {"dt", c.pde.dt},
        {"flux", c.pde.flux},
        {"table", c.pde.table},
        {"initial", function_json(c.pde.initial)},
        {"boundary", function_json(c.pde.boundary)}}},
      {"experiment",
       {{"scales", c.experiment.scales},
        {"times", c.experiment.times},
        {"realizations", c.experiment.realizations},
        {"dt", c.experiment.dt},
        {"pde_cells_per_unit", c.experiment.pde_cells_per_unit}}},
      {"dlr",
       {{"box", c.dlr.box},
        {"samples", c.dlr.samples},
        {"thinning", c.dlr.thinning},
        {"bins", c.dlr.bins},
        {"tolerance", c.dlr.tolerance}}},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"threads", c.threads},
      {"serial", c.serial},
  };
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& config, int indent) {
  return to_json(config).dump(indent);
}

std::string config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_override(RunConfig& config, const std::string& path, const std::string& value) {
  json j = to_json(config);
  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty override path");
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    if (!node->is_object() || !node->contains(parts[k])) {
      throw ConfigError("unknown key '" + path + "'");
    }
    node = &(*node)[parts[k]];
  }
  if (!node->is_object() || !node->contains(parts.back())) {
    throw ConfigError("unknown key '" + path + "'");
  }
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  (*node)[parts.back()] = parsed;
  config = from_json(j);
}

// ---------------------------------------------------------------- builders

Potential make_potential(const PotentialConfig& spec) {
  if (spec.kind == "gaussian") return Potential::gaussian();
  if (spec.kind == "cosine") return Potential::cosine_perturbed(spec.amplitude, spec.frequency);
  if (spec.kind == "split-cosine") {
    const double a = spec.amplitude;
    const double k = spec.frequency;
    SymmetricFunction v{
        [a, k](double x) { return 0.5 * x * x + a * std::cos(k * x); },
        [a, k](double x) { return x - a * k * std::sin(k * x); },
        [a, k](double x) { return 1.0 - a * k * k * std::cos(k * x); },
    };
    const double m = spec.threshold;
    return split_potential(v, m, v.second(m), "split-cosine");
  }
  throw ConfigError("unknown potential kind '" + spec.kind +
                    "' (expected gaussian, cosine or split-cosine)");
}

namespace {

Point to_point(const std::vector<double>& v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError(std::string(what) + " needs " + std::to_string(dim) + " components");
  }
  Point p{};
  for (int i = 0; i < dim; ++i) p[i] = v[i];
  return p;
}

/// A 1-component vector is broadcast to every axis.
std::vector<double> broadcast(std::vector<double> v, int dim) {
  if (v.size() == 1 && dim > 1) v.assign(dim, v[0]);
  return v;
}

}  // namespace

DomainSpec make_domain(const DomainConfig& spec, int dim) {
  if (spec.kind == "box") {
    return DomainSpec::box(dim, to_point(broadcast(spec.lower, dim), dim, "domain.lower"),
                           to_point(broadcast(spec.upper, dim), dim, "domain.upper"));
  }
  if (spec.kind == "ball") {
    const auto c = spec.center.empty() ? std::vector<double>(dim, 0.0) : spec.center;
    return DomainSpec::ball(dim, to_point(broadcast(c, dim), dim, "domain.center"), spec.radius);
  }
  throw ConfigError("unknown domain kind '" + spec.kind + "' (expected box or ball)");
}

ScalarFunction make_function(const FunctionConfig& spec, int dim) {
  if (spec.kind == "zero") return [](const Point&) { return 0.0; };
  if (spec.kind == "constant") {
    const double v = spec.value;
    return [v](const Point&) { return v; };
  }
  if (spec.kind == "linear") {
    const Point s = to_point(broadcast(spec.slope, dim), dim, "slope");
    const double v = spec.value;
    return [s, v, dim](const Point& p) {
      double acc = v;
      for (int i = 0; i < dim; ++i) acc += s[i] * p[i];
      return acc;
    };
  }
  if (spec.kind == "bump") {
    const auto c = spec.center.empty() ? std::vector<double>(dim, 0.0) : spec.center;
    const Point centre = to_point(broadcast(c, dim), dim, "center");
    if (!(spec.radius > 0.0)) throw ConfigError("bump radius must be positive");
    return bump(dim, centre, spec.radius, spec.amplitude);
  }
  throw ConfigError("unknown function kind '" + spec.kind +
                    "' (expected zero, constant, linear or bump)");
}

SamplerSettings make_sampler(const SamplerConfig& spec) {
  SamplerSettings s;
  try {
    s.kind = sampler_kind_from_string(spec.kind);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  s.step = spec.step;
  s.burn_in = spec.burn_in;
  s.thinning = spec.thinning;
  s.sweeps = spec.sweeps;
  s.batches = spec.batches;
  if (s.thinning == 0) throw ConfigError("sampler.thinning must be at least 1");
  if (s.batches < 20) throw ConfigError("sampler.batches must be at least 20");
  if (s.sweeps / s.thinning < static_cast<std::uint64_t>(s.batches)) {
    throw ConfigError("sampler.sweeps / thinning must be at least sampler.batches");
  }
  return s;
}

}  // namespace gradphi
