#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shiftval {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool all_finite() const;

  Matrix transpose() const;
  Matrix select_rows(std::span<const std::size_t> indices) const;
  // Appends the rows of `other`; column counts must agree.
  Matrix vstack(const Matrix& other) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix;
// nullopt when a non-positive pivot is met.
std::optional<Matrix> cholesky(const Matrix& a);
// Solves L y = b by forward substitution.
std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> b);
// Solves (L L^T) x = b given the Cholesky factor L.
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

// Per-feature affine transform z = (x - mean) / scale using the population
// standard deviation (divide by n). Zero-variance columns keep scale 1.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> scales;

  std::size_t dims() const { return means.size(); }
  Matrix apply(const Matrix& x) const;
  Matrix invert(const Matrix& z) const;
  void apply_row(std::span<const double> x, std::span<double> out) const;
};

Standardizer fit_standardizer(const Matrix& x);
Matrix apply_standardizer(const Standardizer& s, const Matrix& x);

// Counter-based generator: draw i is SplitMix64's finalizer applied to
// key + (i + 1) * golden_gamma, where key mixes (seed, stream_id). Identical
// (seed, stream_id) pairs give identical sequences; distinct stream ids give
// decorrelated sequences that may be consumed in parallel.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller; consumes two draws.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Nearest-rank percentile: the k-th smallest value, k = ceil(p/100 * n)
// clamped to [1, n]. p = 0 returns the minimum.
double percentile(std::span<const double> values, double p);

// Average ranks (1-based); ties share their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> v);
double median(std::span<const double> v);

inline double sigmoid(double t) {
  if (t >= 0) {
    double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace shiftval
