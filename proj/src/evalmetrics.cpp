#include "shiftval/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shiftval/error.hpp"
#include "shiftval/numstat.hpp"

namespace shiftval {

namespace {

void check_labels(std::span<const int> y) {
  for (int v : y)
    if (v != 0 && v != 1) throw DataError("labels must be 0 or 1");
}

void check_probabilities(std::span<const double> p) {
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("probability outside [0, 1]");
}

void check_weights(std::span<const double> w) {
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("weights must be finite and >= 0");
    total += v;
  }
  if (!(total > 0.0)) throw DataError("all-zero weights");
}

}  // namespace

MetricResult brier(std::span<const double> p, std::span<const int> y) {
  if (p.size() != y.size()) throw DataError("brier: length mismatch");
  if (p.empty()) throw DataError("brier: empty input");
  check_probabilities(p);
  check_labels(y);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double e = p[i] - y[i];
    sum += e * e;
  }
  return {"brier", sum / static_cast<double>(p.size()), p.size(), false};
}

MetricResult weighted_brier(std::span<const double> p, std::span<const int> y,
                            std::span<const double> w) {
  if (p.size() != y.size() || p.size() != w.size()) throw DataError("weighted brier: length mismatch");
  if (p.empty()) throw DataError("weighted brier: empty input");
  check_probabilities(p);
  check_labels(y);
  check_weights(w);
  double sum = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double e = p[i] - y[i];
    sum += w[i] * (e * e);
    wsum += w[i];
  }
  return {"brier", sum / wsum, p.size(), true};
}

MetricResult auc(std::span<const double> scores, std::span<const int> y) {
  if (scores.size() != y.size()) throw DataError("auc: length mismatch");
  check_labels(y);
  std::size_t n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  std::size_t n_neg = y.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("AUC undefined");
  auto ranks = average_ranks(scores);
  // Midranks are multiples of 1/2, so the rank sum and U are exact.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] == 1) rank_sum += ranks[i];
  double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  double u = rank_sum - np * (np + 1.0) / 2.0;
  return {"auc", u / (np * nn), y.size(), false};
}

PartitionBreakdown partition_brier(std::span<const double> p, std::span<const int> y,
                                   std::span<const std::size_t> assignment) {
  if (p.size() != y.size() || p.size() != assignment.size())
    throw DataError("partition brier: length mismatch");
  if (p.empty()) throw DataError("partition brier: empty input");
  std::size_t k = *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);

  PartitionBreakdown out;
  out.global = brier(p, y).value;
  const double n = static_cast<double>(p.size());
  for (std::size_t j = 0; j < k; ++j) {
    if (members[j].empty()) throw DataError("empty subset " + std::to_string(j));
    std::vector<double> pj;
    std::vector<int> yj;
    for (auto i : members[j]) {
      pj.push_back(p[i]);
      yj.push_back(y[i]);
    }
    out.subsets.push_back(brier(pj, yj));
    out.alphas.push_back(static_cast<double>(members[j].size()) / n);
  }
  for (std::size_t j = 0; j < k; ++j) out.recombined += out.alphas[j] * out.subsets[j].value;
  if (std::abs(out.recombined - out.global) > 1e-12)
    throw NumericError("partition brier: recombination identity violated");
  return out;
}

double effective_sample_size(std::span<const double> w) {
  check_weights(w);
  double s = 0.0, s2 = 0.0;
  for (double v : w) {
    s += v;
    s2 += v * v;
  }
  return s * s / s2;
}

double outcome_rate(std::span<const int> y) {
  if (y.empty()) throw DataError("outcome rate: empty input");
  check_labels(y);
  double s = 0.0;
  for (int v : y) s += v;
  return s / static_cast<double>(y.size());
}

double weighted_outcome_rate(std::span<const int> y, std::span<const double> w) {
  if (y.size() != w.size()) throw DataError("weighted outcome rate: length mismatch");
  check_labels(y);
  check_weights(w);
  double s = 0.0, ws = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += w[i] * y[i];
    ws += w[i];
  }
  return s / ws;
}

}  // namespace shiftval
