#include "shiftval/numstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "shiftval/error.hpp"

namespace shiftval {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw DataError("matrix: expected " + std::to_string(rows_ * cols_) + " values, got " +
                    std::to_string(values_.size()));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw DataError("matrix: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::vstack(const Matrix& other) const {
  if (empty()) return other;
  if (other.empty()) return *this;
  if (other.cols_ != cols_) throw DataError("vstack: column count mismatch");
  Matrix out(rows_ + other.rows_, cols_);
  std::copy(values_.begin(), values_.end(), out.values_.begin());
  std::copy(other.values_.begin(), other.values_.end(), out.values_.begin() + values_.size());
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DataError("matrix product: inner dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DataError("matrix-vector product: dimension mismatch");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    out[i] = std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
  }
  return out;
}

std::optional<Matrix> cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw DataError("cholesky: matrix not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) return std::nullopt;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
    y[i] = s / lower(i, i);
  }
  return y;
}

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  std::vector<double> x = forward_substitute(lower, b);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
    x[ii] = s / lower(ii, ii);
  }
  return x;
}

// --- Standardizer ---------------------------------------------------------

Standardizer fit_standardizer(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) throw DataError("standardizer: empty matrix");
  if (!x.all_finite()) throw DataError("standardizer: non-finite entries");
  const std::size_t n = x.rows(), d = x.cols();
  Standardizer s;
  s.means.assign(d, 0.0);
  s.scales.assign(d, 1.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) s.means[c] += x(r, c);
  for (auto& m : s.means) m /= static_cast<double>(n);
  std::vector<double> ss(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      double dev = x(r, c) - s.means[c];
      ss[c] += dev * dev;
    }
  for (std::size_t c = 0; c < d; ++c) {
    double sd = std::sqrt(ss[c] / static_cast<double>(n));
    // Constant columns are only centered.
    s.scales[c] = sd > 1e-12 * std::max(1.0, std::abs(s.means[c])) ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply_row(std::span<const double> x, std::span<double> out) const {
  for (std::size_t c = 0; c < means.size(); ++c) out[c] = (x[c] - means[c]) / scales[c];
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != dims()) throw DataError("standardizer: feature count mismatch");
  Matrix z(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) apply_row(x.row(r), z.row(r));
  return z;
}

Matrix Standardizer::invert(const Matrix& z) const {
  if (z.cols() != dims()) throw DataError("standardizer: feature count mismatch");
  Matrix x(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r)
    for (std::size_t c = 0; c < z.cols(); ++c) x(r, c) = z(r, c) * scales[c] + means[c];
  return x;
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& x) {
  if (!x.all_finite()) throw DataError("standardizer: non-finite entries");
  return s.apply(x);
}

// --- RngStream ------------------------------------------------------------

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::uint64_t splitmix64(std::uint64_t z) {
  z += kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(splitmix64(seed ^ splitmix64(stream_id))) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  std::uint64_t z = key_ + counter_ * kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::normal() {
  double u1 = uniform();
  double u2 = uniform();
  // 1 - u1 lies in (0, 1], so the log is finite.
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t RngStream::below(std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

// --- Order statistics -----------------------------------------------------

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw DataError("empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw DataError("percentile must lie in [0, 100]");
  for (double v : values)
    if (!std::isfinite(v)) throw DataError("percentile: non-finite value");
  const std::size_t n = values.size();
  // p * n is exact for integer p and moderate n; dividing afterwards keeps
  // ceil() from being pushed over an integer boundary by rounding in p / 100.
  double k_real = std::ceil(p * static_cast<double>(n) / 100.0);
  std::size_t k = static_cast<std::size_t>(std::clamp(k_real, 1.0, static_cast<double>(n)));
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
  return sorted[k - 1];
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double mean(std::span<const double> v) {
  if (v.empty()) throw DataError("empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::span<const double> v) {
  if (v.empty()) throw DataError("empty sample");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("length mismatch");
  double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DataError("zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("length mismatch");
  if (a.size() < 3) throw DataError("spearman: need at least 3 pairs");
  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  auto constant = [](const std::vector<double>& r) {
    return std::all_of(r.begin(), r.end(), [&](double x) { return x == r.front(); });
  };
  if (constant(ra) || constant(rb)) throw DataError("zero rank variance");
  return pearson(ra, rb);
}

}  // namespace shiftval
