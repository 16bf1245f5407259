#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "tmrc/io.hpp"
#include "tmrc/rng.hpp"

using namespace tmrc;
namespace fs = std::filesystem;

namespace {

fs::path dir() {
  const fs::path d = fs::temp_directory_path() / "tmrc_cli";
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = std::string(TMRC_CLI) + " " + args + " > " + (dir() / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ulam on a two-state cell sequence") {
  const double p = 0.1;
  RngStream rng(3, auxiliary_stream_id(90));
  std::vector<std::size_t> cells(200000);
  std::size_t s = 0;
  for (auto& c : cells) {
    c = s;
    if (rng.next_uniform() < p) s = 1 - s;
  }
  io::write_cells(dir() / "cells.csv", cells);
  const auto out = dir() / "two_state.csv";
  REQUIRE(run("ulam --cells " + (dir() / "cells.csv").string() + " --cell-count 2 --lag-steps 1 --lag 1 --top 2 --spectrum " +
              out.string()) == 0);
  const auto rep = io::read_spectrum(out);
  CHECK(rep.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(rep.eigenvalues[1] == doctest::Approx(1 - 2 * p).epsilon(0.01));
}

TEST_CASE("compare on one report gives zero deltas") {
  SpectrumReport r;
  r.eigenvalues = Eigen::Vector3d(1.0, 0.8, 0.3);
  r.timescales = Eigen::Vector3d(INFINITY, -1 / std::log(0.8), -1 / std::log(0.3));
  r.lag = 1.0;
  io::write_spectrum(dir() / "one.csv", r);
  const auto out = dir() / "cmp.csv";
  REQUIRE(run("compare --report full=" + (dir() / "one.csv").string() + " --comparison " + out.string()) == 0);
  const auto t = io::read_table(out, "comparison table");
  CHECK(t.data.col(t.column("delta_full")).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.require("flags").empty());
}

TEST_CASE("diffmap on a noisy circle pairs the first harmonics") {
  RngStream rng(4, auxiliary_stream_id(91));
  EmbeddedCloud c;
  c.x = PointMatrix(500, 2);
  c.z = PointMatrix(500, 2);
  c.std_error = PointMatrix::Zero(500, 2);
  for (Eigen::Index i = 0; i < 500; ++i) {
    const double a = 2 * M_PI * rng.next_uniform();
    const auto g = rng.next_normal_pair();
    c.z.row(i) << std::cos(a) + 0.01 * g[0], std::sin(a) + 0.01 * g[1];
    c.x.row(i) = c.z.row(i);
  }
  io::write_cloud(dir() / "circle.csv", c);
  const auto model = dir() / "circle_model.csv";
  REQUIRE(run("diffmap --cloud " + (dir() / "circle.csv").string() + " --model " + model.string() +
              " --sigma 0.02 --cutoff 4 --r 2") == 0);
  const auto m = io::read_model(model);
  CHECK(m.eigenvalues[2] / m.eigenvalues[1] >= 0.95);
}

TEST_CASE("validate passes") { CHECK(run("validate --seed 5") == 0); }

TEST_CASE("exit codes") {
  CHECK(run("--help") == 0);
  CHECK(run("no-such-command") == 2);
  std::ofstream(dir() / "bad.cfg") << "schema = 1\n[system]\npotential = nope\ndim = 2\nbeta = 1\n";
  CHECK(run("run --config " + (dir() / "bad.cfg").string()) == 2);
  CHECK(run("run --config " + (dir() / "missing.cfg").string()) == 4);
  CHECK(run("compare --report a=" + (dir() / "missing.csv").string() + " --comparison " + (dir() / "x.csv").string()) == 4);
  CHECK(run("compare --report a=" + (dir() / "missing.csv").string()) == 2);
}

}
