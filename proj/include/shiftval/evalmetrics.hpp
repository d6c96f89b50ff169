#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace shiftval {

struct MetricResult {
  std::string name;  // "brier" or "auc"
  double value = 0.0;
  std::size_t n = 0;
  bool weighted = false;
};

// Per-subset Brier scores and their size-weighted recombination.
struct PartitionBreakdown {
  std::vector<MetricResult> subsets;
  std::vector<double> alphas;  // |D_j| / |D|
  double recombined = 0.0;
  double global = 0.0;
};

MetricResult brier(std::span<const double> p, std::span<const int> y);
MetricResult weighted_brier(std::span<const double> p, std::span<const int> y,
                            std::span<const double> w);

// Mann-Whitney AUC from midranks, O(n log n). Throws "AUC undefined" when only
// one class is present.
MetricResult auc(std::span<const double> scores, std::span<const int> y);

// assignment[i] is the subset index of instance i; subsets are numbered
// 0..k-1 and each must be non-empty. Throws if the recombined value drifts
// from the global Brier by more than 1e-12.
PartitionBreakdown partition_brier(std::span<const double> p, std::span<const int> y,
                                   std::span<const std::size_t> assignment);

// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> w);

double outcome_rate(std::span<const int> y);
double weighted_outcome_rate(std::span<const int> y, std::span<const double> w);

}  // namespace shiftval
