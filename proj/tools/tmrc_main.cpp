// tmrc: command-line front end. Every stage subcommand runs exactly one
// pipeline stage; `run` runs all enabled stages.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tmrc/config.hpp"
#include "tmrc/dynamics.hpp"
#include "tmrc/errors.hpp"
#include "tmrc/io.hpp"
#include "tmrc/manifold.hpp"
#include "tmrc/parallel.hpp"
#include "tmrc/pipeline.hpp"
#include "tmrc/spectrum.hpp"
#include "tmrc/validation.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed_override;
};

struct Slots {
  std::string bursts, cloud, model, rc, trajectory, spectrum, eigenvectors, projected_dir, comparison, diagnostics_dir;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "experiment config file");
  if (config_required) opt->required();
  app->add_option("--out", c.out, "output directory (overrides [output] dir)");
}

void add_slots(CLI::App* app, Slots& s) {
  app->add_option("--bursts", s.bursts, "burst ensemble file");
  app->add_option("--cloud", s.cloud, "embedded cloud CSV");
  app->add_option("--model", s.model, "diffusion-map model CSV");
  app->add_option("--rc", s.rc, "RC values CSV");
  app->add_option("--trajectory", s.trajectory, "equilibrium trajectory file");
  app->add_option("--spectrum", s.spectrum, "full Ulam spectrum CSV");
  app->add_option("--eigenvectors", s.eigenvectors, "full Ulam eigenvector CSV");
  app->add_option("--projected-dir", s.projected_dir, "directory of projected spectra");
  app->add_option("--comparison", s.comparison, "comparison table CSV");
  app->add_option("--diagnostics-dir", s.diagnostics_dir, "directory for diagnostic reports");
}

tmrc::ExperimentConfig load(const Common& c, const std::optional<std::string>& force_stage = std::nullopt) {
  auto raw = tmrc::KeyValueConfig::load(c.config);
  if (force_stage) raw.set("stages", *force_stage, "true");
  auto cfg = tmrc::parse_experiment(raw);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.seed_override) cfg.override_seeds(*c.seed_override);
  if (c.threads > 0) cfg.threads = c.threads;
  return cfg;
}

tmrc::ArtifactPaths resolve(const tmrc::ExperimentConfig& cfg, const Slots& s) {
  auto p = tmrc::ArtifactPaths::in(cfg.out_dir);
  auto pick = [](std::filesystem::path& slot, const std::string& v) {
    if (!v.empty()) slot = v;
  };
  pick(p.bursts, s.bursts);
  pick(p.cloud, s.cloud);
  pick(p.model, s.model);
  pick(p.rc, s.rc);
  pick(p.trajectory, s.trajectory);
  pick(p.spectrum_full, s.spectrum);
  pick(p.eigenvectors_full, s.eigenvectors);
  pick(p.projected_dir, s.projected_dir);
  pick(p.comparison, s.comparison);
  pick(p.diagnostics_dir, s.diagnostics_dir);
  return p;
}

void print_manifest(const tmrc::RunManifest& m) {
  std::cout << "config " << m.config_hash << "\n";
  for (const auto& s : m.stages) std::printf("%-14s %-8s %9.3f s\n", s.name.c_str(), s.status.c_str(), s.seconds);
  for (const auto& f : m.files) std::cout << f.sha256 << "  " << f.path.string() << "\n";
}

int run_validate(std::uint64_t seed) {
  using namespace tmrc;
  bool ok = true;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
    ok = ok && pass;
  };
  for (double eps : {0.05, 0.1, 0.2}) {
    const auto rep = perturbation_oracle(50, 10, eps, 100, seed);
    line("perturbation-oracle eps=" + io::format_double(eps), rep.violations == 0,
         "max gap " + io::format_double(rep.max_gap) + " bound " + io::format_double(rep.bound));
  }
  const auto grid = make_grid(std::vector<double>{-1, -1}, std::vector<double>{1, 1}, std::vector<std::size_t>{100, 100});
  PointMatrix rc = grid.points.col(0);
  std::vector<double> f(grid.size()), g(grid.size());
  RngStream rng(seed, auxiliary_stream_id(9));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f[i] = rng.next_uniform();
    g[i] = rng.next_uniform();
  }
  const auto bins = UlamPartition::rc_range({-1.0}, {1.0}, {20});
  const auto bc = binned_projection(rc, f, bins);
  const auto pr = projection_property_check(bc, f, g);
  line("binned-projection", pr.idempotence_gap == 0.0 && pr.self_adjointness_gap <= 1e-10 && pr.expansiveness_gap == 0.0,
       "idempotence " + io::format_double(pr.idempotence_gap) + " adjointness " +
           io::format_double(pr.self_adjointness_gap));
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tmrc: reaction coordinates from transition manifolds"};
  app.require_subcommand(1);
  Common common;
  Slots slots;
  std::size_t threads = 0;
  std::uint64_t seed_override = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  auto* seed_opt = app.add_option("--seed-override", seed_override, "replace all stage seeds");

  auto* run = app.add_subcommand("run", "run all enabled stages");
  add_common(run, common, true);
  add_slots(run, slots);
  std::string only;
  bool resume = false;
  run->add_option("--stage", only, "run only this stage");
  run->add_flag("--resume", resume, "skip stages whose outputs exist");
  for (auto* a : {run}) {
    a->add_option("--threads", threads, "worker threads (0 = all cores)");
    a->add_option("--seed-override", seed_override, "replace all stage seeds");
  }

  std::vector<std::pair<CLI::App*, std::string>> stage_cmds;
  for (const char* name : {"sample-bursts", "embed", "rc-eval", "equilibrium"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " stage");
    add_common(sub, common, true);
    add_slots(sub, slots);
    stage_cmds.emplace_back(sub, name);
  }

  auto* diffmap = app.add_subcommand("diffmap", "fit a diffusion map to an embedded cloud");
  add_common(diffmap, common, false);
  add_slots(diffmap, slots);
  double sigma = 0.0, cutoff = 4.0;
  std::size_t r = 1;
  diffmap->add_option("--sigma", sigma, "kernel scale (<= 0: median neighbor scale); used without --config");
  diffmap->add_option("--cutoff", cutoff, "kernel cutoff; used without --config");
  diffmap->add_option("--r", r, "number of coordinates; used without --config");

  auto* ulam = app.add_subcommand("ulam", "full Ulam spectrum from a trajectory or a cell sequence");
  add_common(ulam, common, false);
  add_slots(ulam, slots);
  std::string cells_path;
  std::size_t cell_count = 0, lag_steps = 1, top = 10;
  double lag = 1.0;
  bool no_sym = false;
  std::string counts_out;
  ulam->add_option("--cells", cells_path, "CSV cell sequence (column 'cell') instead of a trajectory");
  ulam->add_option("--cell-count", cell_count, "number of cells for --cells");
  ulam->add_option("--lag-steps", lag_steps, "lag in sequence steps for --cells");
  ulam->add_option("--lag", lag, "lag time for timescales with --cells");
  ulam->add_option("--top", top, "eigenvalues to report with --cells");
  ulam->add_flag("--no-symmetrize", no_sym, "keep the raw count matrix");
  ulam->add_option("--counts-out", counts_out, "also write the count matrix");

  auto* projected = app.add_subcommand("projected", "projected Ulam spectra for the RC and reference coordinates");
  add_common(projected, common, true);
  add_slots(projected, slots);
  stage_cmds.emplace_back(projected, "projected");

  auto* compare = app.add_subcommand("compare", "align spectra against the first report");
  add_common(compare, common, false);
  add_slots(compare, slots);
  std::vector<std::string> reports;
  compare->add_option("--report", reports, "NAME=PATH, first is the reference");

  auto* diagnostics = app.add_subcommand("diagnostics", "dimension, parametrization and committor reports");
  add_common(diagnostics, common, true);
  add_slots(diagnostics, slots);
  stage_cmds.emplace_back(diagnostics, "diagnostics");

  auto* committor = app.add_subcommand("committor", "Monte Carlo committor at one point");
  add_common(committor, common, true);
  std::vector<double> point;
  std::size_t replicates = 1000;
  double tmax = 1000.0, radius = 0.3;
  std::string committor_out;
  committor->add_option("--point", point, "start point")->required()->delimiter(',');
  committor->add_option("--replicates", replicates, "replicates");
  committor->add_option("--t-max", tmax, "time cap");
  committor->add_option("--radius", radius, "core radius");
  committor->add_option("--output", committor_out, "CSV output (default: stdout summary only)");

  auto* validate = app.add_subcommand("validate", "run the fast property checks");
  std::uint64_t validate_seed = 1;
  validate->add_option("--seed", validate_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*seed_opt || run->count("--seed-override")) common.seed_override = seed_override;
  common.threads = threads;
  if (threads > 0) tmrc::set_thread_count(threads);

  try {
    if (*run) {
      auto cfg = load(common, only.empty() ? std::nullopt : std::optional<std::string>(only));
      tmrc::RunOptions opts;
      if (!only.empty()) opts.only = only;
      opts.resume = resume;
      print_manifest(tmrc::run_pipeline(cfg, resolve(cfg, slots), opts));
      return 0;
    }
    for (const auto& [sub, name] : stage_cmds) {
      if (!*sub) continue;
      auto cfg = load(common, name);
      tmrc::RunOptions opts;
      opts.only = name;
      opts.write_manifest = false;
      print_manifest(tmrc::run_pipeline(cfg, resolve(cfg, slots), opts));
      return 0;
    }
    if (*diffmap) {
      if (!common.config.empty()) {
        auto cfg = load(common, std::string("diffmap"));
        tmrc::RunOptions opts;
        opts.only = "diffmap";
        opts.write_manifest = false;
        print_manifest(tmrc::run_pipeline(cfg, resolve(cfg, slots), opts));
        return 0;
      }
      if (slots.cloud.empty() || slots.model.empty())
        throw tmrc::ConfigError("diffmap without --config needs --cloud and --model");
      const auto cloud = tmrc::io::read_cloud(slots.cloud);
      tmrc::DiffusionMapOptions opts;
      opts.r = r;
      const auto model = tmrc::fit_diffmap(cloud.z, sigma, cutoff, opts);
      tmrc::io::write_model(slots.model, model);
      for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i)
        std::cout << "gamma_" << i << " " << tmrc::io::format_double(model.eigenvalues[i]) << "\n";
      if (model.weak_separation) std::cout << "warning: weak separation of the requested coordinates\n";
      return 0;
    }
    if (*ulam) {
      if (cells_path.empty()) {
        if (common.config.empty()) throw tmrc::ConfigError("ulam needs --config or --cells");
        auto cfg = load(common, std::string("ulam"));
        tmrc::RunOptions opts;
        opts.only = "ulam";
        opts.write_manifest = false;
        print_manifest(tmrc::run_pipeline(cfg, resolve(cfg, slots), opts));
        return 0;
      }
      if (slots.spectrum.empty()) throw tmrc::ConfigError("ulam --cells needs --spectrum for the output CSV");
      if (cell_count < 2) throw tmrc::ConfigError("ulam --cells needs --cell-count >= 2");
      const auto cells = tmrc::io::read_cells(cells_path);
      const auto tc = tmrc::count_transitions(cells, cell_count, lag_steps);
      const auto tm = tmrc::to_stochastic(tc.counts, !no_sym, lag);
      const auto rep = tmrc::eigenvalues(tm, std::min(top, cell_count));
      tmrc::io::write_spectrum(slots.spectrum, rep);
      if (!counts_out.empty()) tmrc::io::write_matrix(counts_out, tm.counts);
      for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
        std::cout << "lambda_" << i << " " << tmrc::io::format_double(rep.eigenvalues[i]) << "\n";
      return 0;
    }
    if (*compare) {
      if (!common.config.empty() && reports.empty()) {
        auto cfg = load(common, std::string("compare"));
        tmrc::RunOptions opts;
        opts.only = "compare";
        opts.write_manifest = false;
        print_manifest(tmrc::run_pipeline(cfg, resolve(cfg, slots), opts));
        return 0;
      }
      if (reports.empty() || slots.comparison.empty())
        throw tmrc::ConfigError("compare needs --report NAME=PATH (at least one) and --comparison");
      std::vector<tmrc::NamedSpectrum> named;
      for (const auto& spec : reports) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw tmrc::ConfigError("--report expects NAME=PATH, got '" + spec + "'");
        named.push_back({spec.substr(0, eq), tmrc::io::read_spectrum(spec.substr(eq + 1))});
      }
      const auto cmp = tmrc::compare_spectra(named);
      tmrc::io::write_comparison(slots.comparison, cmp);
      std::cout << "flags " << cmp.flags.size() << "\n";
      return 0;
    }
    if (*committor) {
      auto cfg = load(common);
      const auto sys = cfg.system();
      Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(point.data(), static_cast<Eigen::Index>(point.size()));
      const auto est = tmrc::committor_estimate(sys, cfg.integrator, x, tmrc::default_cores(sys, radius), replicates,
                                                tmax, cfg.committor_seed);
      for (Eigen::Index i = 0; i < est.q.size(); ++i)
        std::cout << "q_" << i << " " << tmrc::io::format_double(est.q[i]) << " +- "
                  << tmrc::io::format_double(est.std_error(static_cast<std::size_t>(i))) << "\n";
      std::cout << "undecided " << tmrc::io::format_double(est.undecided_fraction()) << "\n";
      if (est.inconclusive) std::cout << "warning: " << est.warning << "\n";
      if (!committor_out.empty()) {
        tmrc::io::Table t;
        t.columns = {"core", "q", "std_error", "hits"};
        t.meta["undecided"] = std::to_string(est.undecided);
        t.meta["replicates"] = std::to_string(est.replicates);
        t.data.resize(est.q.size(), 4);
        for (Eigen::Index i = 0; i < est.q.size(); ++i)
          t.data.row(i) << static_cast<double>(i), est.q[i], est.std_error(static_cast<std::size_t>(i)),
              static_cast<double>(est.hits[static_cast<std::size_t>(i)]);
        tmrc::io::write_table(committor_out, t);
      }
      return 0;
    }
    if (*validate) return run_validate(validate_seed);
  } catch (const tmrc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tmrc::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
