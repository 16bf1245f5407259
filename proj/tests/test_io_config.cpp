#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "tmrc/config.hpp"
#include "tmrc/errors.hpp"
#include "tmrc/io.hpp"

using namespace tmrc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tmrc_unit";
  fs::create_directories(dir);
  return dir / name;
}

const char* kMinimal = R"(schema = 1
[system]
potential = double_well
dim = 2
beta = 2
[stages]
sample-bursts = false
embed = false
diffmap = false
rc-eval = false
equilibrium = false
ulam = false
projected = false
compare = false
diagnostics = false
)";

}  // namespace

TEST_SUITE("io") {

TEST_CASE("decimal round trip including non-finite values") {
  io::Table t;
  t.meta["note"] = "x";
  t.columns = {"a", "b"};
  t.data.resize(3, 2);
  t.data << 0.1, 1.0 / 3.0, -2.5e-300, std::numeric_limits<double>::infinity(),
      std::numeric_limits<double>::quiet_NaN(), 6.02214076e23;
  const auto path = scratch("table.csv");
  io::write_table(path, t);
  const auto back = io::read_table(path, "a,b");
  CHECK(back.meta.at("note") == "x");
  CHECK(back.columns == t.columns);
  CHECK(back.data(0, 0) == 0.1);
  CHECK(back.data(0, 1) == 1.0 / 3.0);
  CHECK(back.data(1, 0) == -2.5e-300);
  CHECK(std::isinf(back.data(1, 1)));
  CHECK(std::isnan(back.data(2, 0)));
  CHECK(back.data(2, 1) == 6.02214076e23);
}

TEST_CASE("missing and corrupt files name the expected schema") {
  try {
    io::read_table(scratch("does_not_exist.csv"), "columns x_1..x_n");
    FAIL("no exception");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("columns x_1..x_n") != std::string::npos);
  }
  const auto bad = scratch("bad.csv");
  std::ofstream(bad) << "a,b\n1,2\n3\n";
  CHECK_THROWS_AS(io::read_table(bad, "a,b"), IoError);
  const auto bin = scratch("bad.bin");
  std::ofstream(bin) << "not a binary";
  CHECK_THROWS_AS(io::read_trajectory(bin), IoError);
}

TEST_CASE("binary bursts and trajectories round trip") {
  std::vector<BurstEnsemble> bursts(2);
  for (int i = 0; i < 2; ++i) {
    bursts[i].start = Eigen::Vector2d(i, -i);
    bursts[i].lag = 0.5;
    bursts[i].endpoints = PointMatrix::Random(3, 2);
  }
  const auto bp = scratch("b.bin");
  io::write_bursts(bp, bursts, 77);
  const auto rb = io::read_bursts(bp);
  REQUIRE(rb.size() == 2);
  CHECK(rb[1].start == bursts[1].start);
  CHECK(rb[1].endpoints == bursts[1].endpoints);
  CHECK(rb[0].lag == 0.5);

  EquilibriumTrajectory traj;
  traj.states = PointMatrix::Random(10, 3);
  traj.tau = 0.01;
  traj.origin = Eigen::Vector3d(1, 2, 3);
  traj.seed = 5;
  const auto tp = scratch("t.bin");
  io::write_trajectory(tp, traj);
  const auto rt = io::read_trajectory(tp);
  CHECK(rt.states == traj.states);
  CHECK(rt.origin == traj.origin);
  CHECK(rt.seed == 5);
  CHECK(io::sha256_file(tp) == io::sha256_file(tp));

  std::ofstream(tp, std::ios::app | std::ios::binary) << 'x';
  CHECK_THROWS_AS(io::read_trajectory(tp), IoError);
}

TEST_CASE("cloud and spectrum tables round trip") {
  EmbeddedCloud c;
  c.x = PointMatrix::Random(4, 2);
  c.z = PointMatrix::Random(4, 3);
  c.std_error = PointMatrix::Random(4, 3).cwiseAbs();
  c.lag = 2.0;
  const auto cp = scratch("cloud.csv");
  io::write_cloud(cp, c);
  const auto rc = io::read_cloud(cp);
  CHECK(rc.z == c.z);
  CHECK(rc.std_error == c.std_error);
  CHECK(rc.lag == 2.0);

  SpectrumReport s;
  s.eigenvalues = Eigen::Vector3d(1.0, 0.85, 0.4);
  s.timescales = Eigen::Vector3d(std::numeric_limits<double>::infinity(), 6.15, 1.09);
  s.lag = 1.0;
  s.dominant = 1;
  const auto sp = scratch("spec.csv");
  io::write_spectrum(sp, s);
  const auto rs = io::read_spectrum(sp);
  CHECK(rs.eigenvalues == s.eigenvalues);
  CHECK(rs.dominant == 1);
  CHECK(std::isinf(rs.timescales[0]));
}

TEST_CASE("sha256 known answer") {
  CHECK(io::sha256_string("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}

TEST_SUITE("config") {

TEST_CASE("key-value parsing") {
  const auto kv = KeyValueConfig::parse("top = 1\n# comment\n[a]\nx = 1.5 # trailing\nlist = 1, 2,3\n");
  CHECK(kv.number("", "top") == 1);
  CHECK(kv.number("a", "x") == 1.5);
  CHECK(kv.numbers("a", "list") == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(kv.get("a", "missing"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("[a]\nx=1\nx=2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::load(scratch("nope.cfg")), IoError);
}

TEST_CASE("schema version is required") {
  CHECK_NOTHROW(parse_experiment(KeyValueConfig::parse(kMinimal)));
  std::string text = kMinimal;
  text.replace(0, 10, "schema = 2");
  CHECK_THROWS_AS(parse_experiment(KeyValueConfig::parse(text)), ConfigError);
  CHECK_THROWS_AS(parse_experiment(KeyValueConfig::parse(std::string(kMinimal).substr(11))), ConfigError);
}

TEST_CASE("stage parameters are required only when the stage runs") {
  std::string text = kMinimal;
  text.replace(text.find("embed = false"), 13, "embed = true");
  CHECK_THROWS_AS(parse_experiment(KeyValueConfig::parse(text)), ConfigError);
  text += "[eval]\nlo = -2,-1\nhi = 2,2\nshape = 4,3\n[bursts]\nreplicates = 10\nlag = 0.015\nseed = 1\n"
          "[observables]\nkind = reference\n";
  // The lag is not a multiple of the default step.
  CHECK_THROWS_AS(parse_experiment(KeyValueConfig::parse(text)), ConfigError);
  text.replace(text.find("lag = 0.015"), 11, "lag = 0.020");
  const auto c = parse_experiment(KeyValueConfig::parse(text));
  CHECK(c.replicates == 10);
  CHECK(c.eval_shape == std::vector<std::size_t>{4, 3});
}

TEST_CASE("config hash and seed override") {
  auto a = parse_experiment(KeyValueConfig::parse(kMinimal));
  auto b = parse_experiment(KeyValueConfig::parse(std::string("# different comment\n") + kMinimal));
  CHECK(a.hash() == b.hash());
  b.override_seeds(100);
  CHECK(b.burst_seed == 101);
  CHECK(a.hash() != b.hash());
  CHECK(stage_names().front() == "sample-bursts");
  CHECK(stage_names().back() == "diagnostics");
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"doublewell", "doublewell_full", "circle2d", "circle2d_full", "circle10d", "circle10d_full",
                           "quad_hilly", "quad_hilly_full", "quad_flat", "quad_flat_full"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_experiment(fs::path(TMRC_SOURCE_DIR) / "configs" / (std::string(name) + ".cfg")));
  }
}

}
