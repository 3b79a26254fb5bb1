#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace compsim {

class SingularMatrix : public std::runtime_error {
 public:
  explicit SingularMatrix(std::size_t column)
      : std::runtime_error("singular matrix at column " + std::to_string(column)), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Row-major square matrix. Small and dense; the MNA systems here stay
/// below a few dozen unknowns.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  void resize(std::size_t n) {
    n_ = n;
    data_.assign(n * n, 0.0);
  }

  std::vector<double> multiply(std::span<const double> x) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline constexpr double kPivotFloor = 1e-14;

/// In-place LU factorisation with partial pivoting.
class LuSolver {
 public:
  /// Factorises a copy of `a`; throws SingularMatrix if a pivot falls below
  /// kPivotFloor in magnitude.
  void factor(const DenseMatrix& a);
  /// Solves in place: `b` becomes x.
  void solve(std::span<double> b) const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

std::vector<double> solve_linear(const DenseMatrix& a, std::span<const double> b);

}  // namespace compsim
