#pragma once

// Brute-force reference implementations used as independent oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// Rank with ties averaged, by counting: 1 + #smaller + #equal-others / 2.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) smaller += 1;
      if (j != i && v[j] == v[i]) equal += 1;
    }
    r[i] = 1 + smaller + equal / 2;
  }
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// All-pairs Mann-Whitney: P(score_pos > score_neg) + P(tie) / 2, counted in
// half-units so the result is exact for n <= a few thousand.
inline double auc_pairs(const std::vector<double>& s, const std::vector<int>& y) {
  long long half_units = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      ++pairs;
      if (s[i] > s[j]) half_units += 2;
      else if (s[i] == s[j]) half_units += 1;
    }
  }
  return static_cast<double>(half_units) / (2.0 * static_cast<double>(pairs));
}

// Smallest value v in the sample with #{x <= v} / n >= p / 100.
inline double nearest_rank(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  for (std::size_t k = 1; k <= v.size(); ++k)
    if (100.0 * static_cast<double>(k) >= p * static_cast<double>(v.size())) return v[k - 1];
  return v.back();
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("shiftval_test_" + tag + "_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
