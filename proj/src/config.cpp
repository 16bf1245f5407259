#include "tmrc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tmrc/errors.hpp"
#include "tmrc/io.hpp"

namespace tmrc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double to_number(const std::string& text, const std::string& section, const std::string& key) {
  const char* b = text.c_str();
  char* e = nullptr;
  const double v = std::strtod(b, &e);
  if (text.empty() || e != b + text.size() || !std::isfinite(v))
    throw ConfigError(where(section, key) + ": expected a number, got '" + text + "'");
  return v;
}

std::size_t to_count(const std::string& text, const std::string& section, const std::string& key) {
  const double v = to_number(text, section, key);
  if (v < 0.0 || v != std::floor(v) || v > 9.0e15)
    throw ConfigError(where(section, key) + ": expected a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.entries_[section];
    if (sec.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " + where(section, key));
    sec[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

bool KeyValueConfig::has(const std::string& section, const std::string& key) const {
  const auto it = entries_.find(section);
  return it != entries_.end() && it->second.count(key);
}

const std::string& KeyValueConfig::get(const std::string& section, const std::string& key) const {
  const auto it = entries_.find(section);
  if (it == entries_.end() || !it->second.count(key))
    throw ConfigError(origin_ + ": missing required key " + where(section, key));
  return it->second.at(key);
}

std::string KeyValueConfig::get_or(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double KeyValueConfig::number(const std::string& section, const std::string& key) const {
  return to_number(get(section, key), section, key);
}

double KeyValueConfig::number_or(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::size_t KeyValueConfig::count(const std::string& section, const std::string& key) const {
  return to_count(get(section, key), section, key);
}

std::size_t KeyValueConfig::count_or(const std::string& section, const std::string& key, std::size_t fallback) const {
  return has(section, key) ? count(section, key) : fallback;
}

std::uint64_t KeyValueConfig::seed(const std::string& section, const std::string& key) const {
  const std::string& text = get(section, key);
  char* e = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &e, 0);
  if (text.empty() || text.front() == '-' || e != text.c_str() + text.size())
    throw ConfigError(where(section, key) + ": expected an unsigned integer seed, got '" + text + "'");
  return v;
}

bool KeyValueConfig::flag_or(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get(section, key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(where(section, key) + ": expected true or false, got '" + v + "'");
}

std::vector<double> KeyValueConfig::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& p : split_list(get(section, key), ',')) out.push_back(to_number(p, section, key));
  return out;
}

std::vector<std::size_t> KeyValueConfig::counts(const std::string& section, const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& p : split_list(get(section, key), ',')) out.push_back(to_count(p, section, key));
  return out;
}

std::vector<std::string> KeyValueConfig::keys(const std::string& section) const {
  std::vector<std::string> out;
  const auto it = entries_.find(section);
  if (it != entries_.end())
    for (const auto& [k, v] : it->second) out.push_back(k);
  return out;
}

void KeyValueConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  entries_[section][key] = value;
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [sec, kv] : entries_)
    for (const auto& [k, v] : kv) out += sec + "." + k + "=" + v + "\n";
  return out;
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"sample-bursts", "embed",     "diffmap", "rc-eval",    "equilibrium",
                                                 "ulam",          "projected", "compare", "diagnostics"};
  return names;
}

bool ExperimentConfig::stage_enabled(const std::string& name) const {
  const auto it = stages.find(name);
  return it == stages.end() ? true : it->second;
}

PotentialSystem ExperimentConfig::system() const { return PotentialSystem::from_name(potential, dim, beta, params); }

std::string ExperimentConfig::hash() const { return io::sha256_string(raw.canonical()); }

void ExperimentConfig::override_seeds(std::uint64_t k) {
  eval_seed = k;
  burst_seed = k + 1;
  observable_seed = k + 2;
  traj_seed = k + 3;
  committor_seed = k + 4;
  raw.set("eval", "seed", std::to_string(eval_seed));
  raw.set("bursts", "seed", std::to_string(burst_seed));
  raw.set("observables", "seed", std::to_string(observable_seed));
  raw.set("equilibrium", "seed", std::to_string(traj_seed));
  raw.set("diagnostics", "committor_seed", std::to_string(committor_seed));
}

ExperimentConfig parse_experiment(const KeyValueConfig& raw) {
  ExperimentConfig c;
  c.raw = raw;
  const std::size_t schema = raw.count("", "schema");
  if (schema != static_cast<std::size_t>(kConfigSchemaVersion))
    throw ConfigError("unsupported config schema " + std::to_string(schema) + " (this build reads schema " +
                      std::to_string(kConfigSchemaVersion) + ")");

  for (const auto& s : raw.keys("stages")) {
    if (std::find(stage_names().begin(), stage_names().end(), s) == stage_names().end())
      throw ConfigError("[stages] " + s + ": unknown stage");
    c.stages[s] = raw.flag_or("stages", s, true);
  }
  auto on = [&](const char* s) { return c.stage_enabled(s); };

  c.potential = raw.get("system", "potential");
  c.dim = raw.count("system", "dim");
  c.beta = raw.number("system", "beta");
  if (raw.has("system", "params")) c.params = raw.numbers("system", "params");
  (void)c.system();

  c.integrator.step = raw.number_or("integrator", "step", 1e-2);
  if (!(c.integrator.step > 0.0)) throw ConfigError("[integrator] step: must be positive");
  const std::string scheme = raw.get_or("integrator", "scheme", "euler_maruyama");
  if (scheme != "euler_maruyama") throw ConfigError("[integrator] scheme: only euler_maruyama is available");

  auto check_multiple = [&](double t, const char* section, const char* key) {
    try {
      (void)steps_for(t, c.integrator);
    } catch (const ArgumentError&) {
      throw ConfigError(std::string("[") + section + "] " + key + ": must be a positive multiple of the step");
    }
  };

  c.out_dir = raw.get_or("output", "dir", "out");
  c.threads = raw.count_or("output", "threads", 0);

  const bool need_cloud = on("sample-bursts") || on("embed");
  if (need_cloud || on("rc-eval") || on("diagnostics")) {
    const std::string source = raw.get_or("eval", "source", "grid");
    if (source == "grid") {
      c.eval_source = EvalSource::Grid;
      c.eval_lo = raw.numbers("eval", "lo");
      c.eval_hi = raw.numbers("eval", "hi");
      c.eval_shape = raw.counts("eval", "shape");
      if (c.eval_lo.size() != c.dim || c.eval_hi.size() != c.dim || c.eval_shape.size() != c.dim)
        throw ConfigError("[eval] lo, hi and shape must each have one entry per dimension");
    } else if (source == "trajectory") {
      c.eval_source = EvalSource::Trajectory;
      c.eval_count = raw.count("eval", "count");
      const std::string strategy = raw.get_or("eval", "strategy", "stride");
      if (strategy != "stride" && strategy != "random") throw ConfigError("[eval] strategy: stride or random");
      c.eval_random = strategy == "random";
      c.eval_seed = raw.has("eval", "seed") ? raw.seed("eval", "seed") : 0;
    } else {
      throw ConfigError("[eval] source: expected grid or trajectory, got '" + source + "'");
    }
  }

  if (need_cloud) {
    c.replicates = raw.count("bursts", "replicates");
    c.burst_lag = raw.number("bursts", "lag");
    c.burst_seed = raw.seed("bursts", "seed");
    c.streaming = raw.flag_or("bursts", "streaming", true);
    if (c.replicates == 0) throw ConfigError("[bursts] replicates: must be positive");
    check_multiple(c.burst_lag, "bursts", "lag");

    const std::string kind = raw.get("observables", "kind");
    if (kind == "reference") {
      c.observable_source = ObservableSource::Reference;
      if (c.dim != 2) throw ConfigError("[observables] kind=reference needs a two-dimensional system");
    } else if (kind == "random") {
      c.observable_source = ObservableSource::Random;
      c.observable_count = raw.count("observables", "count");
      c.observable_seed = raw.seed("observables", "seed");
    } else if (kind == "explicit") {
      c.observable_source = ObservableSource::Explicit;
      const auto rows = split_list(raw.get("observables", "coefficients"), ';');
      c.observable_coefficients.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(c.dim));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto vals = split_list(rows[i], ',');
        if (vals.size() != c.dim) throw ConfigError("[observables] coefficients: each row needs one entry per dimension");
        for (std::size_t j = 0; j < c.dim; ++j)
          c.observable_coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              to_number(vals[j], "observables", "coefficients");
      }
    } else {
      throw ConfigError("[observables] kind: expected reference, random or explicit");
    }
  }

  if (on("diffmap")) {
    c.sigma = raw.number_or("diffmap", "sigma", 0.0);
    c.cutoff = raw.number_or("diffmap", "cutoff", 4.0);
    c.r = raw.count_or("diffmap", "r", 1);
    c.extra = raw.count_or("diffmap", "extra", 4);
    c.dense_limit = raw.count_or("diffmap", "dense_limit", 3000);
    if (c.r == 0) throw ConfigError("[diffmap] r: must be at least 1");
    if (!(c.cutoff > 0.0)) throw ConfigError("[diffmap] cutoff: must be positive");
  }

  const bool need_traj = on("equilibrium") || on("ulam") || on("projected") ||
                         c.eval_source == EvalSource::Trajectory;
  if (need_traj) {
    c.traj_steps = raw.count("equilibrium", "steps");
    c.tau = raw.number("equilibrium", "tau");
    c.traj_seed = raw.seed("equilibrium", "seed");
    const auto o = raw.numbers("equilibrium", "origin");
    if (o.size() != c.dim) throw ConfigError("[equilibrium] origin: one entry per dimension");
    c.origin = Eigen::Map<const Eigen::VectorXd>(o.data(), static_cast<Eigen::Index>(o.size()));
    check_multiple(c.tau, "equilibrium", "tau");
    if (c.traj_steps == 0) throw ConfigError("[equilibrium] steps: must be positive");
  }

  if (on("ulam") || on("projected")) {
    c.ulam_lag_steps = raw.count_or("ulam", "lag_steps", 1);
    c.symmetrize = raw.flag_or("ulam", "symmetrize", true);
    if (c.ulam_lag_steps == 0) throw ConfigError("[ulam] lag_steps: must be positive");
  }
  if (on("ulam")) {
    c.ulam_lo = raw.numbers("ulam", "lo");
    c.ulam_hi = raw.numbers("ulam", "hi");
    c.ulam_counts = raw.counts("ulam", "counts");
    c.ulam_top = raw.count_or("ulam", "top", 10);
    if (c.ulam_lo.size() != c.dim || c.ulam_hi.size() != c.dim || c.ulam_counts.size() != c.dim)
      throw ConfigError("[ulam] lo, hi and counts must each have one entry per dimension");
  }
  if (on("projected")) {
    c.projected_bins = raw.counts("projected", "bins");
    c.projected_top = raw.count_or("projected", "top", 6);
    for (const auto& key : raw.keys("projected")) {
      if (key.rfind("ref_", 0) != 0) continue;
      const auto vals = raw.numbers("projected", key);
      if (vals.size() != c.dim) throw ConfigError("[projected] " + key + ": one coefficient per dimension");
      c.references.push_back({key.substr(4), Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()))});
    }
  }
  if (on("diagnostics")) {
    c.diag_dimension = raw.flag_or("diagnostics", "dimension", false);
    c.dimension_neighbors = raw.count_or("diagnostics", "dimension_neighbors", 20);
    c.dimension_explained = raw.number_or("diagnostics", "dimension_explained", 0.9);
    c.dimension_noise = raw.flag_or("diagnostics", "dimension_noise", true);
    c.diag_parametrization = raw.flag_or("diagnostics", "parametrization", false);
    c.parametrization_vectors = raw.count_or("diagnostics", "parametrization_vectors", 9);
    c.parametrization_bins = raw.count_or("diagnostics", "parametrization_bins", 40);
    c.diag_committor = raw.flag_or("diagnostics", "committor", false);
    c.committor_replicates = raw.count_or("diagnostics", "committor_replicates", 1000);
    c.committor_tmax = raw.number_or("diagnostics", "committor_tmax", 1000.0);
    c.committor_radius = raw.number_or("diagnostics", "committor_radius", 0.3);
    c.committor_seed = raw.has("diagnostics", "committor_seed") ? raw.seed("diagnostics", "committor_seed") : 0;
    if (c.diag_committor) check_multiple(c.committor_tmax, "diagnostics", "committor_tmax");
    if (c.diag_parametrization && !on("ulam") && !raw.has("ulam", "lo"))
      throw ConfigError("[diagnostics] parametrization needs the [ulam] partition");
    if (c.diag_parametrization) {
      c.ulam_lo = raw.numbers("ulam", "lo");
      c.ulam_hi = raw.numbers("ulam", "hi");
      c.ulam_counts = raw.counts("ulam", "counts");
      c.ulam_lag_steps = raw.count_or("ulam", "lag_steps", 1);
      c.symmetrize = raw.flag_or("ulam", "symmetrize", true);
    }
  }
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) { return parse_experiment(KeyValueConfig::load(path)); }

}  // namespace tmrc
