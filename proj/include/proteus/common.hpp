#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace proteus {

// Samples are rows. Row-major so that a sample is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Binary flags, 1 = anomaly.
using Labels = std::vector<int>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::span<const double> row_of(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<double> row_of(Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Copies the listed rows (all columns).
Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows);

// Copies the listed columns (all rows).
Matrix take_cols(const Matrix& m, std::span<const std::size_t> cols);

std::size_t count_positive(std::span<const int> labels);

// Deterministic child seed. Mixing is splitmix64 so nearby parents give
// unrelated children.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

// Runs fn(0..n-1) on up to `jobs` threads. Each index is executed exactly once;
// callers must make fn write to disjoint state. Exceptions are rethrown on the
// calling thread (first one wins).
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Shortest round-trip decimal text for a double.
std::string format_double(double v);

}  // namespace proteus
