#include "tmrc/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tmrc/errors.hpp"

namespace tmrc {

UlamPartition::UlamPartition(PartitionSpace space, std::vector<double> lo, std::vector<double> hi,
                             std::vector<std::size_t> counts)
    : space_(space), lo_(std::move(lo)), hi_(std::move(hi)), counts_(std::move(counts)) {
  if (lo_.empty() || lo_.size() != hi_.size() || lo_.size() != counts_.size())
    throw ArgumentError("partition bounds and counts must have the same positive length");
  total_ = 1;
  for (std::size_t a = 0; a < lo_.size(); ++a) {
    if (!(lo_[a] < hi_[a])) throw ArgumentError("partition axis needs lo < hi");
    if (counts_[a] == 0) throw ArgumentError("partition axis needs at least one box");
    total_ *= counts_[a];
  }
  if (total_ < 2) throw ArgumentError("partition needs at least two cells");
}

UlamPartition UlamPartition::full_state(std::vector<double> lo, std::vector<double> hi,
                                        std::vector<std::size_t> counts) {
  return {PartitionSpace::FullState, std::move(lo), std::move(hi), std::move(counts)};
}

UlamPartition UlamPartition::rc_range(std::vector<double> lo, std::vector<double> hi,
                                      std::vector<std::size_t> counts) {
  return {PartitionSpace::RCRange, std::move(lo), std::move(hi), std::move(counts)};
}

UlamPartition UlamPartition::rc_bounding(const PointMatrix& values, std::vector<std::size_t> counts, double margin) {
  if (values.rows() == 0) throw ArgumentError("cannot bound an empty set of RC values");
  const auto dim = static_cast<std::size_t>(values.cols());
  std::vector<double> lo(dim), hi(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double mn = values.col(static_cast<Eigen::Index>(a)).minCoeff();
    const double mx = values.col(static_cast<Eigen::Index>(a)).maxCoeff();
    const double pad = std::max(mx - mn, 1e-300) * margin;
    lo[a] = mn - pad;
    hi[a] = mx + pad;
    if (!(lo[a] < hi[a])) hi[a] = lo[a] + 1.0;
  }
  return rc_range(std::move(lo), std::move(hi), std::move(counts));
}

std::size_t UlamPartition::cell_of(const double* p) const noexcept {
  std::size_t cell = 0;
  for (std::size_t a = 0; a < lo_.size(); ++a) {
    const double x = p[a];
    if (!(x >= lo_[a] && x <= hi_[a])) return kOutside;
    const double u = (x - lo_[a]) / (hi_[a] - lo_[a]) * static_cast<double>(counts_[a]);
    std::size_t idx = u <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(u)) - 1;
    idx = std::min(idx, counts_[a] - 1);
    cell = cell * counts_[a] + idx;
  }
  return cell;
}

Eigen::VectorXd UlamPartition::center(std::size_t cell) const {
  if (cell >= total_) throw ArgumentError("cell index out of range");
  Eigen::VectorXd c(static_cast<Eigen::Index>(dim()));
  for (std::size_t a = dim(); a-- > 0;) {
    const std::size_t idx = cell % counts_[a];
    cell /= counts_[a];
    const double width = (hi_[a] - lo_[a]) / static_cast<double>(counts_[a]);
    c[static_cast<Eigen::Index>(a)] = lo_[a] + (static_cast<double>(idx) + 0.5) * width;
  }
  return c;
}

CellAssignment assign_cells(const UlamPartition& partition, const PointMatrix& points) {
  if (static_cast<std::size_t>(points.cols()) != partition.dim())
    throw ArgumentError("points do not match the partition dimension");
  CellAssignment out;
  const auto n = static_cast<std::size_t>(points.rows());
  const std::size_t dim = partition.dim();
  out.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.cells[i] = partition.cell_of(points.data() + i * dim);
    if (out.cells[i] == UlamPartition::kOutside) ++out.outside;
  }
  return out;
}

TransitionCounts count_transitions(std::span<const std::size_t> cells, std::size_t cell_count, std::size_t lag_steps) {
  if (lag_steps == 0) throw ArgumentError("transition lag must be at least one step");
  if (cells.size() <= lag_steps) throw ArgumentError("cell sequence is not longer than the lag");
  TransitionCounts tc;
  tc.lag_steps = lag_steps;
  tc.counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cell_count), static_cast<Eigen::Index>(cell_count));
  for (std::size_t s = 0; s + lag_steps < cells.size(); ++s) {
    const std::size_t a = cells[s];
    const std::size_t b = cells[s + lag_steps];
    if (a >= cell_count || b >= cell_count) {
      ++tc.skipped;
      continue;
    }
    tc.counts(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += 1.0;
  }
  if (tc.skipped == cells.size() - lag_steps) throw EmptyCountsError("every transition pair left the partition domain");
  return tc;
}

TransitionMatrix to_stochastic(const Eigen::MatrixXd& counts, bool symmetrize, double lag) {
  if (counts.rows() != counts.cols()) throw ArgumentError("count matrix must be square");
  TransitionMatrix tm;
  tm.lag = lag;
  tm.symmetrized = symmetrize;
  tm.counts = symmetrize ? Eigen::MatrixXd(0.5 * (counts + counts.transpose())) : counts;
  tm.stochastic = tm.counts;
  for (Eigen::Index i = 0; i < tm.stochastic.rows(); ++i) {
    const double sum = tm.stochastic.row(i).sum();
    if (sum > 0.0) {
      tm.stochastic.row(i) /= sum;
    } else {
      tm.stochastic.row(i).setZero();
      tm.stochastic(i, i) = 1.0;
      tm.empty_rows.push_back(static_cast<std::size_t>(i));
    }
  }
  return tm;
}

double implied_timescale(double lambda, double lag) noexcept {
  if (lambda >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
  if (lambda <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -lag / std::log(lambda);
}

namespace {

// Largest strongly connected component of the graph i -> j iff counts(i, j) > 0,
// over rows with positive mass. Iterative Tarjan.
std::vector<std::size_t> largest_connected_set(const Eigen::MatrixXd& counts) {
  const auto n = static_cast<std::size_t>(counts.rows());
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next neighbor)
  std::size_t counter = 0, ncomp = 0;
  std::vector<std::vector<std::size_t>> components;

  auto has_edge = [&](std::size_t i, std::size_t j) {
    return counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0;
  };

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unset || counts.row(static_cast<Eigen::Index>(root)).sum() <= 0.0) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      bool descended = false;
      while (next < n) {
        const std::size_t w = next++;
        if (!has_edge(v, w)) continue;
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      const std::size_t node = v;
      if (low[node] == index[node]) {
        std::vector<std::size_t> members;
        for (;;) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
          members.push_back(w);
          if (w == node) break;
        }
        std::sort(members.begin(), members.end());
        components.push_back(std::move(members));
        ++ncomp;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[node]);
      }
    }
  }

  std::vector<std::size_t> best;
  for (auto& c : components) {
    if (c.size() > best.size() || (c.size() == best.size() && !c.empty() && c.front() < best.front())) best = c;
  }
  return best;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12 * scale) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

SpectrumReport eigenvalues(const TransitionMatrix& tm, std::size_t top, bool with_vectors, bool connected_only) {
  if (top == 0 || top > static_cast<std::size_t>(tm.stochastic.rows()))
    throw ArgumentError("requested eigenvalue count must be between 1 and the matrix size");

  SpectrumReport rep;
  rep.lag = tm.lag;
  rep.empty_rows = tm.empty_rows;
  if (connected_only) {
    rep.active = largest_connected_set(tm.counts);
  } else {
    rep.active.resize(static_cast<std::size_t>(tm.stochastic.rows()));
    std::iota(rep.active.begin(), rep.active.end(), std::size_t{0});
  }
  const std::size_t na = rep.active.size();
  if (na == 0) throw EmptyCountsError("transition matrix has no visited states");
  const std::size_t take = std::min(top, na);
  const auto N = static_cast<Eigen::Index>(na);

  Eigen::MatrixXd sub(N, N);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < na; ++b)
      sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          tm.counts(static_cast<Eigen::Index>(rep.active[a]), static_cast<Eigen::Index>(rep.active[b]));

  for (Eigen::Index i = 0; i < N; ++i)
    if (!(sub.row(i).sum() > 0.0)) sub(i, i) = 1.0;

  Eigen::VectorXd values(static_cast<Eigen::Index>(take));
  Eigen::MatrixXd vecs(N, static_cast<Eigen::Index>(take));

  if (tm.symmetrized) {
    // P = D^-1 C with C symmetric is similar to D^-1/2 C D^-1/2.
    const Eigen::VectorXd root = (sub.rowwise().sum()).cwiseSqrt();
    Eigen::MatrixXd s = sub;
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) s(i, j) = sub(i, j) / (root[i] * root[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed on the transition matrix");
    for (std::size_t q = 0; q < take; ++q) {
      const auto src = static_cast<Eigen::Index>(na - 1 - q);
      values[static_cast<Eigen::Index>(q)] = es.eigenvalues()[src];
      if (with_vectors) vecs.col(static_cast<Eigen::Index>(q)) = es.eigenvectors().col(src).cwiseQuotient(root);
    }
  } else {
    Eigen::MatrixXd p = sub;
    for (Eigen::Index i = 0; i < N; ++i) p.row(i) /= p.row(i).sum();
    Eigen::EigenSolver<Eigen::MatrixXd> es(p, with_vectors);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge on the transition matrix");
    const Eigen::VectorXd re = es.eigenvalues().real();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return re[a] > re[b]; });
    for (std::size_t q = 0; q < take; ++q) {
      values[static_cast<Eigen::Index>(q)] = re[order[q]];
      if (with_vectors) vecs.col(static_cast<Eigen::Index>(q)) = es.eigenvectors().col(order[q]).real();
    }
  }

  rep.eigenvalues = values;
  rep.timescales.resize(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) rep.timescales[i] = implied_timescale(values[i], tm.lag);

  double best = -1.0;
  for (std::size_t i = 0; i + 1 < take; ++i) {
    const double a = values[static_cast<Eigen::Index>(i)];
    const double b = values[static_cast<Eigen::Index>(i + 1)];
    const double ratio = b > 0.0 ? a / b : std::numeric_limits<double>::infinity();
    if (ratio > best) {
      best = ratio;
      rep.dominant = i;
    }
    if (b <= 0.0) break;
  }

  if (with_vectors) {
    rep.eigenvectors = Eigen::MatrixXd::Zero(tm.stochastic.rows(), static_cast<Eigen::Index>(take));
    for (std::size_t q = 0; q < take; ++q) {
      Eigen::VectorXd v = vecs.col(static_cast<Eigen::Index>(q));
      v /= v.norm();
      fix_sign(v);
      for (std::size_t a = 0; a < na; ++a)
        rep.eigenvectors(static_cast<Eigen::Index>(rep.active[a]), static_cast<Eigen::Index>(q)) = v[static_cast<Eigen::Index>(a)];
    }
  }
  return rep;
}

SpectrumReport ulam_spectrum(const PointMatrix& trajectory, const UlamPartition& partition, std::size_t lag_steps,
                             double lag, std::size_t top, bool symmetrize, bool with_vectors) {
  const auto assignment = assign_cells(partition, trajectory);
  const auto tc = count_transitions(assignment.cells, partition.cell_count(), lag_steps);
  const auto tm = to_stochastic(tc.counts, symmetrize, lag);
  return eigenvalues(tm, std::min(top, partition.cell_count()), with_vectors);
}

SpectrumReport project_and_discretize(const PointMatrix& rc_values, const UlamPartition& partition,
                                      std::size_t lag_steps, double lag, std::size_t top, bool symmetrize) {
  if (partition.space() != PartitionSpace::RCRange)
    throw ArgumentError("projected discretization needs a partition over the RC range");
  return ulam_spectrum(rc_values, partition, lag_steps, lag, top, symmetrize, false);
}

SpectrumComparison compare_spectra(const std::vector<NamedSpectrum>& reports, double tolerance) {
  if (reports.empty()) throw ArgumentError("nothing to compare");
  const double lag = reports.front().report.lag;
  Eigen::Index rows = reports.front().report.eigenvalues.size();
  for (const auto& r : reports) {
    if (std::abs(r.report.lag - lag) > 1e-12 * std::max(1.0, std::abs(lag)))
      throw ArgumentError("cannot compare spectra with different lag times");
    rows = std::min(rows, r.report.eigenvalues.size());
  }
  const auto cols = static_cast<Eigen::Index>(reports.size());
  SpectrumComparison cmp;
  cmp.eigenvalues.resize(rows, cols);
  cmp.abs_delta.resize(rows, cols);
  cmp.timescale_ratio.resize(rows, cols);
  const auto& ref = reports.front().report;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto& rep = reports[static_cast<std::size_t>(c)].report;
    cmp.names.push_back(reports[static_cast<std::size_t>(c)].name);
    for (Eigen::Index i = 0; i < rows; ++i) {
      cmp.eigenvalues(i, c) = rep.eigenvalues[i];
      cmp.abs_delta(i, c) = std::abs(rep.eigenvalues[i] - ref.eigenvalues[i]);
      const double tr = ref.timescales[i];
      const double tp = rep.timescales[i];
      cmp.timescale_ratio(i, c) = std::isinf(tr) && std::isinf(tp) ? 1.0 : tp / tr;
      if (c > 0 && rep.eigenvalues[i] > ref.eigenvalues[i] + tolerance)
        cmp.flags.emplace_back(static_cast<std::size_t>(c), static_cast<std::size_t>(i));
    }
  }
  return cmp;
}

}  // namespace tmrc
