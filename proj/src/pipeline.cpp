#include "tmrc/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>

#include "tmrc/errors.hpp"
#include "tmrc/io.hpp"
#include "tmrc/manifold.hpp"
#include "tmrc/parallel.hpp"
#include "tmrc/spectrum.hpp"
#include "tmrc/validation.hpp"

namespace tmrc {

ArtifactPaths ArtifactPaths::in(const fs::path& dir) {
  ArtifactPaths p;
  p.bursts = dir / "bursts.bin";
  p.cloud = dir / "cloud.csv";
  p.model = dir / "diffmap.csv";
  p.rc = dir / "rc_eval.csv";
  p.trajectory = dir / "trajectory.bin";
  p.spectrum_full = dir / "spectrum_full.csv";
  p.eigenvectors_full = dir / "eigenvectors_full.csv";
  p.projected_dir = dir / "projected";
  p.comparison = dir / "comparison.csv";
  p.diagnostics_dir = dir / "diagnostics";
  p.manifest = dir / "manifest.json";
  return p;
}

ObservableSet make_observables(const ExperimentConfig& c) {
  switch (c.observable_source) {
    case ObservableSource::Reference:
      return planar_reference_observables();
    case ObservableSource::Random:
      return make_random_observables(c.observable_count, c.dim, c.observable_seed);
    case ObservableSource::Explicit:
      return make_explicit_observables(c.observable_coefficients);
  }
  throw ConfigError("unknown observable source");
}

EvaluationSet make_evaluation_set(const ExperimentConfig& c, const ArtifactPaths& paths) {
  if (c.eval_source == EvalSource::Grid) return make_grid(c.eval_lo, c.eval_hi, c.eval_shape);
  const auto traj = io::read_trajectory(paths.trajectory);
  return subsample(traj, c.eval_count, c.eval_random ? SubsampleStrategy::UniformRandom : SubsampleStrategy::Stride,
                   c.eval_seed);
}

PointMatrix rc_on_states(const PointMatrix& rc_points, const PointMatrix& rc_values, const PointMatrix& states) {
  return nearest_neighbor_values(rc_points, rc_values, states);
}

namespace {

using StageFn = std::function<std::vector<fs::path>()>;

PointMatrix linear_coordinate(const PointMatrix& states, const Eigen::VectorXd& coef) {
  PointMatrix out(states.rows(), 1);
  out.col(0) = states * coef;
  return out;
}

std::vector<std::size_t> bins_for(const std::vector<std::size_t>& bins, std::size_t dim) {
  if (bins.size() == dim) return bins;
  if (bins.size() == 1) return std::vector<std::size_t>(dim, bins.front());
  throw ConfigError("[projected] bins: give one count, or one per RC dimension");
}

std::vector<fs::path> stage_sample_bursts(const ExperimentConfig& c, const ArtifactPaths& p) {
  if (c.streaming) return {};
  const auto eval = make_evaluation_set(c, p);
  const auto bursts = sample_bursts(c.system(), c.integrator, eval, c.replicates, c.burst_lag, c.burst_seed);
  io::write_bursts(p.bursts, bursts, c.burst_seed);
  return {p.bursts};
}

std::vector<fs::path> stage_embed(const ExperimentConfig& c, const ArtifactPaths& p) {
  const auto obs = make_observables(c);
  EmbeddedCloud cloud;
  if (c.streaming) {
    const auto eval = make_evaluation_set(c, p);
    cloud = embed_streaming(c.system(), c.integrator, eval, obs, c.replicates, c.burst_lag, c.burst_seed);
  } else {
    cloud = embed_cloud(obs, io::read_bursts(p.bursts));
  }
  io::write_cloud(p.cloud, cloud);
  return {p.cloud};
}

std::vector<fs::path> stage_diffmap(const ExperimentConfig& c, const ArtifactPaths& p) {
  const auto cloud = io::read_cloud(p.cloud);
  DiffusionMapOptions opts;
  opts.r = c.r;
  opts.extra = c.extra;
  opts.dense_limit = c.dense_limit;
  const auto model = fit_diffmap(cloud.z, c.sigma, c.cutoff, opts);
  io::write_model(p.model, model);
  return {p.model};
}

std::vector<fs::path> stage_rc_eval(const ExperimentConfig&, const ArtifactPaths& p) {
  const auto cloud = io::read_cloud(p.cloud);
  const auto rc = ReactionCoordinate::from_model(io::read_model(p.model));
  if (rc.values.rows() != cloud.x.rows()) throw StateError("model and cloud describe different point sets");
  io::write_rc_values(p.rc, cloud.x, rc.values);
  return {p.rc};
}

std::vector<fs::path> stage_equilibrium(const ExperimentConfig& c, const ArtifactPaths& p) {
  const auto traj = run_equilibrium(c.system(), c.integrator, c.origin, c.traj_steps, c.tau, c.traj_seed);
  io::write_trajectory(p.trajectory, traj);
  return {p.trajectory};
}

std::vector<fs::path> stage_ulam(const ExperimentConfig& c, const ArtifactPaths& p) {
  const auto traj = io::read_trajectory(p.trajectory);
  const auto part = UlamPartition::full_state(c.ulam_lo, c.ulam_hi, c.ulam_counts);
  const bool vectors = c.diag_parametrization;
  const std::size_t top = std::max(c.ulam_top, vectors ? c.parametrization_vectors : 0);
  const auto rep = ulam_spectrum(traj.states, part, c.ulam_lag_steps, c.ulam_lag(), top, c.symmetrize, vectors);
  io::write_spectrum(p.spectrum_full, rep);
  std::vector<fs::path> out{p.spectrum_full};
  if (vectors) {
    io::write_matrix(p.eigenvectors_full, rep.eigenvectors);
    out.push_back(p.eigenvectors_full);
  }
  return out;
}

std::vector<fs::path> stage_projected(const ExperimentConfig& c, const ArtifactPaths& p) {
  const auto traj = io::read_trajectory(p.trajectory);
  const auto rc = io::read_rc_values(p.rc);
  std::vector<fs::path> out;
  auto discretize = [&](const std::string& name, const PointMatrix& values) {
    const auto part = UlamPartition::rc_bounding(values, bins_for(c.projected_bins, static_cast<std::size_t>(values.cols())));
    const std::size_t top = std::min(c.projected_top, part.cell_count());
    const auto rep = project_and_discretize(values, part, c.ulam_lag_steps, c.ulam_lag(), top, c.symmetrize);
    const fs::path path = p.projected_dir / ("spectrum_" + name + ".csv");
    io::write_spectrum(path, rep);
    out.push_back(path);
  };
  discretize("xi", rc_on_states(rc.points, rc.values, traj.states));
  for (const auto& ref : c.references) discretize(ref.name, linear_coordinate(traj.states, ref.coefficients));
  return out;
}

std::vector<fs::path> stage_compare(const ExperimentConfig& c, const ArtifactPaths& p) {
  std::vector<NamedSpectrum> reports;
  reports.push_back({"full", io::read_spectrum(p.spectrum_full)});
  reports.push_back({"xi", io::read_spectrum(p.projected_dir / "spectrum_xi.csv")});
  for (const auto& ref : c.references)
    reports.push_back({ref.name, io::read_spectrum(p.projected_dir / ("spectrum_" + ref.name + ".csv"))});
  io::write_comparison(p.comparison, compare_spectra(reports));
  return {p.comparison};
}

std::vector<fs::path> stage_diagnostics(const ExperimentConfig& c, const ArtifactPaths& p) {
  std::vector<fs::path> out;
  if (c.diag_dimension) {
    const auto cloud = io::read_cloud(p.cloud);
    const bool has_noise = c.dimension_noise && cloud.std_error.rows() == cloud.z.rows() &&
                           cloud.std_error.cols() == cloud.z.cols();
    const auto est = has_noise
                         ? dimension_diagnostic(cloud.z, cloud.std_error, c.dimension_neighbors, c.dimension_explained)
                         : dimension_diagnostic(cloud.z, c.dimension_neighbors, c.dimension_explained);
    io::Table t;
    t.meta["vote"] = std::to_string(est.vote);
    for (std::size_t j = 0; j < static_cast<std::size_t>(cloud.x.cols()); ++j) t.columns.push_back("x_" + std::to_string(j + 1));
    t.columns.push_back("local_dimension");
    t.data.resize(cloud.x.rows(), cloud.x.cols() + 1);
    t.data.leftCols(cloud.x.cols()) = cloud.x;
    for (std::size_t i = 0; i < est.local.size(); ++i)
      t.data(static_cast<Eigen::Index>(i), cloud.x.cols()) = static_cast<double>(est.local[i]);
    const fs::path path = p.diagnostics_dir / "dimension.csv";
    io::write_table(path, t);
    out.push_back(path);
  }
  if (c.diag_parametrization) {
    const auto traj = io::read_trajectory(p.trajectory);
    const auto rc = io::read_rc_values(p.rc);
    const auto vecs = io::read_table(p.eigenvectors_full, "CSV eigenvector matrix with columns c_0..c_m");
    SpectrumReport rep;
    rep.eigenvectors = vecs.data;
    const auto part = UlamPartition::full_state(c.ulam_lo, c.ulam_hi, c.ulam_counts);
    const auto cells = assign_cells(part, traj.states);
    const PointMatrix xi = rc_on_states(rc.points, rc.values, traj.states);
    const auto bins = UlamPartition::rc_bounding(
        xi, std::vector<std::size_t>(static_cast<std::size_t>(xi.cols()), c.parametrization_bins));
    const std::size_t count = std::min<std::size_t>(c.parametrization_vectors, static_cast<std::size_t>(vecs.data.cols()));
    io::Table t;
    t.columns = {"index", "score"};
    t.data.resize(static_cast<Eigen::Index>(count), 2);
    for (std::size_t i = 0; i < count; ++i) {
      auto phi = eigenvector_on_samples(rep, cells, i);
      // Samples outside the partition have no eigenvector value; drop them.
      std::vector<double> kept;
      std::vector<Eigen::Index> rows;
      for (std::size_t s = 0; s < phi.size(); ++s)
        if (!std::isnan(phi[s])) {
          kept.push_back(phi[s]);
          rows.push_back(static_cast<Eigen::Index>(s));
        }
      PointMatrix sub(static_cast<Eigen::Index>(rows.size()), xi.cols());
      for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = xi.row(rows[r]);
      t.data.row(static_cast<Eigen::Index>(i)) << static_cast<double>(i), parametrization_score(kept, sub, bins);
    }
    const fs::path path = p.diagnostics_dir / "parametrization.csv";
    io::write_table(path, t);
    out.push_back(path);
  }
  if (c.diag_committor) {
    const auto sys = c.system();
    const auto eval = make_evaluation_set(c, p);
    const auto cores = default_cores(sys, c.committor_radius);
    io::Table t;
    for (std::size_t j = 0; j < eval.dim(); ++j) t.columns.push_back("x_" + std::to_string(j + 1));
    for (std::size_t j = 0; j < cores.size(); ++j) t.columns.push_back("q_" + std::to_string(j));
    t.columns.push_back("undecided");
    t.data.resize(static_cast<Eigen::Index>(eval.size()), static_cast<Eigen::Index>(eval.dim() + cores.size() + 1));
    for (std::size_t i = 0; i < eval.size(); ++i) {
      const Eigen::VectorXd x = eval.points.row(static_cast<Eigen::Index>(i)).transpose();
      const auto est = committor_estimate(sys, c.integrator, x, cores, c.committor_replicates, c.committor_tmax,
                                          c.committor_seed, i);
      auto row = t.data.row(static_cast<Eigen::Index>(i));
      row.head(x.size()) = x.transpose();
      row.segment(x.size(), est.q.size()) = est.q.transpose();
      row[row.size() - 1] = est.undecided_fraction();
    }
    const fs::path path = p.diagnostics_dir / "committor.csv";
    io::write_table(path, t);
    out.push_back(path);
  }
  return out;
}

std::vector<fs::path> expected_outputs(const std::string& stage, const ExperimentConfig& c, const ArtifactPaths& p) {
  if (stage == "sample-bursts") return c.streaming ? std::vector<fs::path>{} : std::vector<fs::path>{p.bursts};
  if (stage == "embed") return {p.cloud};
  if (stage == "diffmap") return {p.model};
  if (stage == "rc-eval") return {p.rc};
  if (stage == "equilibrium") return {p.trajectory};
  if (stage == "ulam") {
    if (c.diag_parametrization) return {p.spectrum_full, p.eigenvectors_full};
    return {p.spectrum_full};
  }
  if (stage == "projected") {
    std::vector<fs::path> out{p.projected_dir / "spectrum_xi.csv"};
    for (const auto& r : c.references) out.push_back(p.projected_dir / ("spectrum_" + r.name + ".csv"));
    return out;
  }
  if (stage == "compare") return {p.comparison};
  return {};
}

}  // namespace

void write_manifest(const fs::path& path, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["config_hash"] = m.config_hash;
  j["seeds"] = m.seeds;
  j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : m.stages) {
    nlohmann::ordered_json e;
    e["name"] = s.name;
    e["status"] = s.status;
    e["seconds"] = s.seconds;
    std::vector<std::string> outs;
    for (const auto& o : s.outputs) outs.push_back(o.string());
    e["outputs"] = outs;
    j["stages"].push_back(e);
  }
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : m.files) j["files"].push_back({{"path", f.path.string()}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  if (!m.failed_stage.empty()) {
    j["failed_stage"] = m.failed_stage;
    j["error"] = m.error;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot write manifest");
  out << j.dump(2) << '\n';
}

RunManifest run_pipeline(const ExperimentConfig& c, const ArtifactPaths& p, const RunOptions& options) {
  if (options.only &&
      std::find(stage_names().begin(), stage_names().end(), *options.only) == stage_names().end())
    throw ArgumentError("unknown stage '" + *options.only + "'");
  if (c.threads > 0) set_thread_count(c.threads);

  RunManifest m;
  m.config_hash = c.hash();
  m.seeds = {{"eval", c.eval_seed},
             {"bursts", c.burst_seed},
             {"observables", c.observable_seed},
             {"equilibrium", c.traj_seed},
             {"committor", c.committor_seed}};

  const std::map<std::string, std::function<std::vector<fs::path>()>> fns = {
      {"sample-bursts", [&] { return stage_sample_bursts(c, p); }},
      {"embed", [&] { return stage_embed(c, p); }},
      {"diffmap", [&] { return stage_diffmap(c, p); }},
      {"rc-eval", [&] { return stage_rc_eval(c, p); }},
      {"equilibrium", [&] { return stage_equilibrium(c, p); }},
      {"ulam", [&] { return stage_ulam(c, p); }},
      {"projected", [&] { return stage_projected(c, p); }},
      {"compare", [&] { return stage_compare(c, p); }},
      {"diagnostics", [&] { return stage_diagnostics(c, p); }},
  };

  // A trajectory-subsampled evaluation set needs the trajectory first.
  std::vector<std::string> order = stage_names();
  if (c.eval_source == EvalSource::Trajectory) {
    order.erase(std::find(order.begin(), order.end(), "equilibrium"));
    order.insert(order.begin(), "equilibrium");
  }

  const fs::path& manifest_path = p.manifest;
  for (const auto& name : order) {
    const bool wanted = options.only ? *options.only == name : c.stage_enabled(name);
    if (!wanted) continue;
    StageRecord rec{name, "ran", 0.0, {}};
    const auto expected = expected_outputs(name, c, p);
    if (options.resume && !expected.empty() &&
        std::all_of(expected.begin(), expected.end(), [](const fs::path& f) { return fs::exists(f); })) {
      rec.status = "resumed";
      rec.outputs = expected;
      m.stages.push_back(rec);
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      rec.outputs = fns.at(name)();
    } catch (const Error& e) {
      m.failed_stage = name;
      m.error = e.what();
      if (options.write_manifest) write_manifest(manifest_path, m);
      throw Error(e.kind(), "stage '" + name + "': " + e.what());
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.stages.push_back(rec);
  }
  for (const auto& s : m.stages)
    for (const auto& f : s.outputs) m.files.push_back({f, io::sha256_file(f), fs::file_size(f)});
  if (options.write_manifest) write_manifest(manifest_path, m);
  return m;
}

}  // namespace tmrc
