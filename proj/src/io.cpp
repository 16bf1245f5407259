#include "tmrc/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tmrc/errors.hpp"

namespace tmrc::io {

static_assert(std::endian::native == std::endian::little, "binary artifacts assume a little-endian host");

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& what, const std::string& schema) {
  throw IoError(path.string() + ": " + what + " (expected " + schema + ")");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.c_str();
  char* e = nullptr;
  errno = 0;
  out = std::strtod(b, &e);
  return e == b + s.size();
}

std::string join_numbers(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += format_double(v[i]);
  }
  return s;
}

std::string join_indices(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

Eigen::VectorXd parse_numbers(const fs::path& path, const std::string& s, const std::string& schema) {
  if (s.empty()) return {};
  const auto parts = split(s, ';');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (!parse_double(parts[i], v[static_cast<Eigen::Index>(i)])) fail(path, "bad number list '" + s + "'", schema);
  return v;
}

std::vector<std::size_t> parse_indices(const fs::path& path, const std::string& s, const std::string& schema) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  for (const auto& p : split(s, ';')) {
    char* e = nullptr;
    const unsigned long long v = std::strtoull(p.c_str(), &e, 10);
    if (p.empty() || e != p.c_str() + p.size()) fail(path, "bad index list '" + s + "'", schema);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t count, std::size_t first = 1) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i + first));
  return out;
}

std::size_t count_prefix(const Table& t, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& c : t.columns)
    if (c.rfind(prefix, 0) == 0) ++n;
  return n;
}

PointMatrix columns_with_prefix(const Table& t, const std::string& prefix, std::size_t count, std::size_t first,
                                const fs::path& path, const std::string& schema) {
  PointMatrix out(t.data.rows(), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = prefix + std::to_string(i + first);
    std::size_t col = t.columns.size();
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      if (t.columns[c] == name) col = c;
    if (col == t.columns.size()) fail(path, "missing column " + name, schema);
    out.col(static_cast<Eigen::Index>(i)) = t.data.col(static_cast<Eigen::Index>(col));
  }
  return out;
}

// Binary layout: 8-byte magic, u32 version, u32 kind, u64 dim, rows, blocks,
// f64 time, u64 seed, then the float64 body.
constexpr char kMagic[8] = {'T', 'M', 'R', 'C', 'B', 'I', 'N', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

std::ofstream open_out(const fs::path& path, bool binary) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

void write_header(std::ofstream& out, const BinaryHeader& h) {
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(h.kind));
  put(out, h.dim);
  put(out, h.rows);
  put(out, h.blocks);
  put(out, h.time);
  put(out, h.seed);
}

BinaryHeader read_header(std::ifstream& in, const fs::path& path, BinaryKind want, const std::string& schema) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    fail(path, "not a tmrc binary artifact", schema);
  std::uint32_t version = 0, kind = 0;
  BinaryHeader h;
  if (!get(in, version) || !get(in, kind) || !get(in, h.dim) || !get(in, h.rows) || !get(in, h.blocks) ||
      !get(in, h.time) || !get(in, h.seed))
    fail(path, "truncated header", schema);
  if (version != kVersion) fail(path, "unsupported version " + std::to_string(version), schema);
  if (kind != static_cast<std::uint32_t>(want)) fail(path, "wrong artifact kind " + std::to_string(kind), schema);
  h.kind = want;
  return h;
}

void read_doubles(std::ifstream& in, double* dst, std::size_t n, const fs::path& path, const std::string& schema) {
  if (!in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n * sizeof(double))))
    fail(path, "truncated body", schema);
}

void expect_end(std::ifstream& in, const fs::path& path, const std::string& schema) {
  if (in.peek() != std::char_traits<char>::eof()) fail(path, "trailing bytes after body", schema);
}

const std::string kBurstSchema =
    "binary bursts: tmrc header (kind 1) then per point the start state and replicates x dim endpoints";
const std::string kTrajSchema = "binary trajectory: tmrc header (kind 2) then the origin and rows x dim states";
const std::string kCloudSchema = "CSV cloud with meta lag and columns x_1..x_n, z_1..z_k, se_1..se_k";
const std::string kModelSchema =
    "CSV diffusion-map model with meta sigma, cutoff, r, eigenvalues and columns z_1..z_k, psi_0..psi_s";
const std::string kRcSchema = "CSV RC values with columns x_1..x_n, xi_1..xi_r";
const std::string kSpectrumSchema = "CSV spectrum with meta lag and columns index, eigenvalue, timescale, flag";
const std::string kCellSchema = "CSV with a single column 'cell' of non-negative integers";

}  // namespace

const std::string& Table::require(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw IoError("missing metadata key '" + key + "'");
  return it->second;
}

double Table::number(const std::string& key) const {
  double v = 0.0;
  if (!parse_double(require(key), v)) throw IoError("metadata key '" + key + "' is not a number");
  return v;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  throw IoError("missing column '" + name + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(const fs::path& path, const Table& table) {
  if (static_cast<std::size_t>(table.data.cols()) != table.columns.size() && table.data.rows() > 0)
    throw ArgumentError("table columns do not match the data width");
  auto out = open_out(path, false);
  for (const auto& [k, v] : table.meta) out << "# " << k << '=' << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (Eigen::Index r = 0; r < table.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.data.cols(); ++c) out << (c ? "," : "") << format_double(table.data(r, c));
    out << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

Table read_table(const fs::path& path, const std::string& schema) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open", schema);
  Table t;
  std::string line;
  bool have_header = false;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      t.meta[key] = line.substr(eq + 1);
      continue;
    }
    if (!have_header) {
      t.columns = split(line, ',');
      have_header = true;
      continue;
    }
    const auto parts = split(line, ',');
    if (parts.size() != t.columns.size())
      fail(path, "line " + std::to_string(lineno) + " has " + std::to_string(parts.size()) + " fields, header has " +
                     std::to_string(t.columns.size()),
           schema);
    for (const auto& p : parts) {
      double v = 0.0;
      if (!parse_double(p, v)) fail(path, "line " + std::to_string(lineno) + ": bad number '" + p + "'", schema);
      values.push_back(v);
    }
    ++rows;
  }
  if (!have_header) fail(path, "missing header line", schema);
  t.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(t.columns.size()));
  if (!values.empty()) std::memcpy(t.data.data(), values.data(), values.size() * sizeof(double));
  return t;
}

namespace {

template <class Feed>
std::string sha256_hex(Feed&& feed) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256 initialisation failed");
  }
  feed([&](const void* data, std::size_t n) { EVP_DigestUpdate(ctx, data, n); });
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for hashing");
  return sha256_hex([&](auto update) {
    std::vector<char> buf(1 << 16);
    while (in) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      const auto got = in.gcount();
      if (got > 0) update(buf.data(), static_cast<std::size_t>(got));
    }
  });
}

std::string sha256_string(const std::string& data) {
  return sha256_hex([&](auto update) { update(data.data(), data.size()); });
}

void write_bursts(const fs::path& path, const std::vector<BurstEnsemble>& bursts, std::uint64_t seed) {
  BinaryHeader h;
  h.kind = BinaryKind::Bursts;
  h.rows = bursts.size();
  if (!bursts.empty()) {
    h.dim = static_cast<std::uint64_t>(bursts.front().start.size());
    h.blocks = static_cast<std::uint64_t>(bursts.front().endpoints.rows());
    h.time = bursts.front().lag;
  }
  h.seed = seed;
  for (const auto& b : bursts)
    if (static_cast<std::uint64_t>(b.endpoints.rows()) != h.blocks || static_cast<std::uint64_t>(b.start.size()) != h.dim)
      throw ArgumentError("burst ensembles must share replicate count and dimension");
  auto out = open_out(path, true);
  write_header(out, h);
  for (const auto& b : bursts) {
    out.write(reinterpret_cast<const char*>(b.start.data()), static_cast<std::streamsize>(h.dim * sizeof(double)));
    out.write(reinterpret_cast<const char*>(b.endpoints.data()),
              static_cast<std::streamsize>(h.dim * h.blocks * sizeof(double)));
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

std::vector<BurstEnsemble> read_bursts(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open", kBurstSchema);
  const auto h = read_header(in, path, BinaryKind::Bursts, kBurstSchema);
  std::vector<BurstEnsemble> out(h.rows);
  for (auto& b : out) {
    b.lag = h.time;
    b.start.resize(static_cast<Eigen::Index>(h.dim));
    b.endpoints.resize(static_cast<Eigen::Index>(h.blocks), static_cast<Eigen::Index>(h.dim));
    read_doubles(in, b.start.data(), h.dim, path, kBurstSchema);
    read_doubles(in, b.endpoints.data(), h.dim * h.blocks, path, kBurstSchema);
  }
  expect_end(in, path, kBurstSchema);
  return out;
}

void write_trajectory(const fs::path& path, const EquilibriumTrajectory& traj) {
  BinaryHeader h;
  h.kind = BinaryKind::Trajectory;
  h.dim = static_cast<std::uint64_t>(traj.states.cols());
  h.rows = static_cast<std::uint64_t>(traj.states.rows());
  h.time = traj.tau;
  h.seed = traj.seed;
  if (static_cast<std::uint64_t>(traj.origin.size()) != h.dim) throw ArgumentError("trajectory origin dimension mismatch");
  auto out = open_out(path, true);
  write_header(out, h);
  out.write(reinterpret_cast<const char*>(traj.origin.data()), static_cast<std::streamsize>(h.dim * sizeof(double)));
  out.write(reinterpret_cast<const char*>(traj.states.data()),
            static_cast<std::streamsize>(h.dim * h.rows * sizeof(double)));
  if (!out) throw IoError(path.string() + ": write failed");
}

EquilibriumTrajectory read_trajectory(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open", kTrajSchema);
  const auto h = read_header(in, path, BinaryKind::Trajectory, kTrajSchema);
  EquilibriumTrajectory t;
  t.tau = h.time;
  t.seed = h.seed;
  t.origin.resize(static_cast<Eigen::Index>(h.dim));
  t.states.resize(static_cast<Eigen::Index>(h.rows), static_cast<Eigen::Index>(h.dim));
  read_doubles(in, t.origin.data(), h.dim, path, kTrajSchema);
  read_doubles(in, t.states.data(), h.dim * h.rows, path, kTrajSchema);
  expect_end(in, path, kTrajSchema);
  return t;
}

void write_cloud(const fs::path& path, const EmbeddedCloud& cloud) {
  Table t;
  t.meta["kind"] = "cloud";
  t.meta["lag"] = format_double(cloud.lag);
  const auto n = static_cast<std::size_t>(cloud.x.cols());
  const auto k = cloud.k();
  for (auto& c : numbered("x_", n)) t.columns.push_back(c);
  for (auto& c : numbered("z_", k)) t.columns.push_back(c);
  for (auto& c : numbered("se_", k)) t.columns.push_back(c);
  t.data.resize(cloud.z.rows(), static_cast<Eigen::Index>(n + 2 * k));
  t.data << cloud.x, cloud.z, cloud.std_error;
  write_table(path, t);
}

EmbeddedCloud read_cloud(const fs::path& path) {
  const auto t = read_table(path, kCloudSchema);
  EmbeddedCloud c;
  double lag = 0.0;
  if (!t.meta.count("lag") || !parse_double(t.meta.at("lag"), lag)) fail(path, "missing lag", kCloudSchema);
  c.lag = lag;
  const std::size_t n = count_prefix(t, "x_"), k = count_prefix(t, "z_");
  if (n == 0 || k == 0 || count_prefix(t, "se_") != k) fail(path, "inconsistent column groups", kCloudSchema);
  c.x = columns_with_prefix(t, "x_", n, 1, path, kCloudSchema);
  c.z = columns_with_prefix(t, "z_", k, 1, path, kCloudSchema);
  c.std_error = columns_with_prefix(t, "se_", k, 1, path, kCloudSchema);
  return c;
}

void write_model(const fs::path& path, const DiffusionMapModel& model) {
  Table t;
  t.meta["kind"] = "diffmap";
  t.meta["sigma"] = format_double(model.sigma);
  t.meta["cutoff"] = format_double(model.cutoff);
  t.meta["r"] = std::to_string(model.r);
  t.meta["weak_separation"] = model.weak_separation ? "1" : "0";
  t.meta["eigenvalues"] = join_numbers(model.eigenvalues);
  t.meta["isolated"] = join_indices(model.isolated);
  const auto k = static_cast<std::size_t>(model.training.cols());
  const auto s = static_cast<std::size_t>(model.eigenvectors.cols());
  for (auto& c : numbered("z_", k)) t.columns.push_back(c);
  for (auto& c : numbered("psi_", s, 0)) t.columns.push_back(c);
  t.data.resize(model.training.rows(), static_cast<Eigen::Index>(k + s));
  t.data << model.training, model.eigenvectors;
  write_table(path, t);
}

DiffusionMapModel read_model(const fs::path& path) {
  const auto t = read_table(path, kModelSchema);
  DiffusionMapModel m;
  for (const char* key : {"sigma", "cutoff", "r", "eigenvalues"})
    if (!t.meta.count(key)) fail(path, std::string("missing meta ") + key, kModelSchema);
  if (!parse_double(t.meta.at("sigma"), m.sigma) || !parse_double(t.meta.at("cutoff"), m.cutoff))
    fail(path, "bad sigma or cutoff", kModelSchema);
  double r = 0.0;
  if (!parse_double(t.meta.at("r"), r) || r < 1) fail(path, "bad r", kModelSchema);
  m.r = static_cast<std::size_t>(r);
  m.weak_separation = t.meta.count("weak_separation") && t.meta.at("weak_separation") == "1";
  m.eigenvalues = parse_numbers(path, t.meta.at("eigenvalues"), kModelSchema);
  if (t.meta.count("isolated")) m.isolated = parse_indices(path, t.meta.at("isolated"), kModelSchema);
  const std::size_t k = count_prefix(t, "z_"), s = count_prefix(t, "psi_");
  if (k == 0 || s != static_cast<std::size_t>(m.eigenvalues.size()) || s < m.r + 1)
    fail(path, "column groups inconsistent with eigenvalues", kModelSchema);
  m.training = columns_with_prefix(t, "z_", k, 1, path, kModelSchema);
  m.eigenvectors = columns_with_prefix(t, "psi_", s, 0, path, kModelSchema);
  return m;
}

void write_rc_values(const fs::path& path, const PointMatrix& points, const PointMatrix& values) {
  if (points.rows() != values.rows()) throw ArgumentError("points and RC values differ in length");
  Table t;
  t.meta["kind"] = "rc";
  for (auto& c : numbered("x_", static_cast<std::size_t>(points.cols()))) t.columns.push_back(c);
  for (auto& c : numbered("xi_", static_cast<std::size_t>(values.cols()))) t.columns.push_back(c);
  t.data.resize(points.rows(), points.cols() + values.cols());
  t.data << points, values;
  write_table(path, t);
}

RcValues read_rc_values(const fs::path& path) {
  const auto t = read_table(path, kRcSchema);
  const std::size_t n = count_prefix(t, "x_"), r = count_prefix(t, "xi_");
  if (r == 0) fail(path, "no xi_ columns", kRcSchema);
  return {columns_with_prefix(t, "x_", n, 1, path, kRcSchema), columns_with_prefix(t, "xi_", r, 1, path, kRcSchema)};
}

void write_spectrum(const fs::path& path, const SpectrumReport& report) {
  Table t;
  t.meta["kind"] = "spectrum";
  t.meta["lag"] = format_double(report.lag);
  t.meta["dominant"] = std::to_string(report.dominant);
  t.meta["active"] = std::to_string(report.active.size());
  t.meta["empty_rows"] = join_indices(report.empty_rows);
  t.columns = {"index", "eigenvalue", "timescale", "flag"};
  const Eigen::Index n = report.eigenvalues.size();
  t.data.resize(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    // flag: 1 for the dominant block (indices 0..d), 0 otherwise
    t.data.row(i) << static_cast<double>(i), report.eigenvalues[i], report.timescales[i],
        static_cast<Eigen::Index>(report.dominant) >= i ? 1.0 : 0.0;
  }
  write_table(path, t);
}

SpectrumReport read_spectrum(const fs::path& path) {
  const auto t = read_table(path, kSpectrumSchema);
  if (t.columns.size() < 3 || t.columns[1] != "eigenvalue" || t.columns[2] != "timescale")
    fail(path, "unexpected columns", kSpectrumSchema);
  SpectrumReport r;
  if (!t.meta.count("lag") || !parse_double(t.meta.at("lag"), r.lag)) fail(path, "missing lag", kSpectrumSchema);
  if (t.meta.count("dominant")) r.dominant = parse_indices(path, t.meta.at("dominant"), kSpectrumSchema).at(0);
  if (t.meta.count("empty_rows")) r.empty_rows = parse_indices(path, t.meta.at("empty_rows"), kSpectrumSchema);
  r.eigenvalues = t.data.col(1);
  r.timescales = t.data.col(2);
  return r;
}

void write_comparison(const fs::path& path, const SpectrumComparison& cmp) {
  Table t;
  t.meta["kind"] = "comparison";
  std::string names;
  for (std::size_t i = 0; i < cmp.names.size(); ++i) names += (i ? ";" : "") + cmp.names[i];
  t.meta["reports"] = names;
  std::string flags;
  for (const auto& [rep, idx] : cmp.flags)
    flags += (flags.empty() ? "" : ";") + cmp.names[rep] + ":" + std::to_string(idx);
  t.meta["flags"] = flags;
  t.columns.push_back("index");
  for (const auto& n : cmp.names) t.columns.push_back("lambda_" + n);
  for (const auto& n : cmp.names) t.columns.push_back("delta_" + n);
  for (const auto& n : cmp.names) t.columns.push_back("tratio_" + n);
  const Eigen::Index rows = cmp.eigenvalues.rows(), cols = cmp.eigenvalues.cols();
  t.data.resize(rows, 1 + 3 * cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    t.data(i, 0) = static_cast<double>(i);
    for (Eigen::Index c = 0; c < cols; ++c) {
      t.data(i, 1 + c) = cmp.eigenvalues(i, c);
      t.data(i, 1 + cols + c) = cmp.abs_delta(i, c);
      t.data(i, 1 + 2 * cols + c) = cmp.timescale_ratio(i, c);
    }
  }
  write_table(path, t);
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  Table t;
  t.columns = numbered("c_", static_cast<std::size_t>(m.cols()), 0);
  t.data = m;
  write_table(path, t);
}

std::vector<std::size_t> read_cells(const fs::path& path) {
  const auto t = read_table(path, kCellSchema);
  if (t.columns.size() != 1 || t.columns[0] != "cell") fail(path, "unexpected columns", kCellSchema);
  std::vector<std::size_t> out(static_cast<std::size_t>(t.data.rows()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = t.data(static_cast<Eigen::Index>(i), 0);
    if (!(v >= 0.0) || v != std::floor(v)) fail(path, "non-integer cell index", kCellSchema);
    out[i] = static_cast<std::size_t>(v);
  }
  return out;
}

void write_cells(const fs::path& path, const std::vector<std::size_t>& cells) {
  Table t;
  t.columns = {"cell"};
  t.data.resize(static_cast<Eigen::Index>(cells.size()), 1);
  for (std::size_t i = 0; i < cells.size(); ++i) t.data(static_cast<Eigen::Index>(i), 0) = static_cast<double>(cells[i]);
  write_table(path, t);
}

}  // namespace tmrc::io
