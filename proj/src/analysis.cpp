#include "pst/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace pst {

namespace {

std::size_t retained_count(std::size_t n, double r) {
  const auto m = static_cast<std::size_t>(std::ceil(r * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(m, 1, n);
}

std::vector<std::size_t> confidence_order(const CircuitPredictions& preds) {
  std::vector<std::size_t> order(preds.margin.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds.margin[a] > preds.margin[b]; });
  return order;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<double> default_retention_grid() {
  std::vector<double> g;
  for (int p = 100; p >= 5; p -= 5) g.push_back(p / 100.0);
  return g;
}

CoverageCurve selective_curve(const CircuitPredictions& preds, std::span<const double> retention_grid) {
  if (retention_grid.empty()) throw std::invalid_argument("retention grid is empty");
  for (double r : retention_grid) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("retention fractions must lie in (0, 1]");
  }
  const std::size_t n = preds.labels.size();
  if (n == 0) throw DataError("no predictions to rank");
  const auto order = confidence_order(preds);
  // prefix[m] = correct among the m most confident samples
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = order[i];
    prefix[i + 1] = prefix[i] + (preds.predicted[s] == preds.labels[s] ? 1 : 0);
  }
  CoverageCurve curve;
  double sum = 0.0;
  for (double r : retention_grid) {
    const std::size_t m = retained_count(n, r);
    const double acc = static_cast<double>(prefix[m]) / static_cast<double>(m);
    curve.points.push_back({r, m, acc});
    sum += acc;
  }
  curve.auc = sum / static_cast<double>(retention_grid.size());
  return curve;
}

CoverageCurve selective_curve(const Circuit& circuit, const EncodedSet& set,
                              std::span<const double> retention_grid) {
  return selective_curve(predict_all(circuit, set), retention_grid);
}

double accuracy_at(const CircuitPredictions& preds, double retention) {
  const double grid[] = {retention};
  return selective_curve(preds, grid).points.front().accuracy;
}

double gini_coefficient(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total <= 0.0) return 0.0;
  const double n = static_cast<double>(v.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) weighted += static_cast<double>(i + 1) * v[i];
  return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

DiversityReport diversity_from_counts(const std::map<GateId, std::size_t>& counts,
                                      std::size_t vocabulary_size) {
  if (counts.size() > vocabulary_size) throw std::invalid_argument("more distinct gates than vocabulary");
  DiversityReport r;
  r.counts = counts;
  for (const auto& [g, c] : counts) {
    r.neurons += c;
    r.max_copies = std::max(r.max_copies, c);
    if (c == 1) ++r.singletons;
  }
  r.unique = counts.size();
  if (r.neurons == 0) return r;
  double h = 0.0;
  for (const auto& [g, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(r.neurons);
    h -= p * std::log(p);
  }
  r.effective_diversity = std::exp(h);
  r.redundancy = 1.0 - static_cast<double>(r.unique) / static_cast<double>(r.neurons);
  std::vector<double> usage(vocabulary_size, 0.0);
  std::size_t i = 0;
  for (const auto& [g, c] : counts) usage[i++] = static_cast<double>(c);
  r.gini = gini_coefficient(usage);
  return r;
}

DiversityReport diversity_report(const Circuit& circuit, std::size_t vocabulary_size) {
  std::map<GateId, std::size_t> counts;
  for (const auto& layer : circuit.gates) {
    for (GateId g : layer) ++counts[g];
  }
  return diversity_from_counts(counts, vocabulary_size);
}

SpectralProfile spectral_profile(std::span<const GateId> unique_gates) {
  const std::set<GateId> gates(unique_gates.begin(), unique_gates.end());
  SpectralProfile p;
  p.unique_gates = gates.size();
  EnergyBands pooled;
  std::size_t ternary = 0;
  for (GateId g : gates) {
    const TruthTable9 t = decode(g);
    const auto fhat = fourier_transform(t.as_reals());
    const auto raw = raw_energy_bands(fhat);
    pooled.constant += raw.constant;
    pooled.linear += raw.linear;
    pooled.quadratic += raw.quadratic;
    pooled.cubic += raw.cubic;
    pooled.quartic += raw.quartic;
    ++p.classes[spectral_class(fhat, kExactTableTolerance)];
    if (!is_binary_equivalent(t)) ++ternary;
  }
  p.bands = normalize(pooled);
  p.ternary_share = gates.empty() ? 0.0 : static_cast<double>(ternary) / static_cast<double>(gates.size());
  return p;
}

SpectralProfile spectral_profile(const Circuit& circuit) {
  std::vector<GateId> all;
  for (const auto& layer : circuit.gates) all.insert(all.end(), layer.begin(), layer.end());
  return spectral_profile(all);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs two equal series of length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::size_t count_increases(std::span<const double> seq, double tol) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) n += seq[i] > seq[i - 1] + tol ? 1 : 0;
  return n;
}

}  // namespace pst
