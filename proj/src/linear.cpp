#include "compsim/linear.hpp"

#include <cmath>
#include <utility>

namespace compsim {

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n_; ++c) acc += (*this)(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

void LuSolver::factor(const DenseMatrix& a) {
  const std::size_t n = a.size();
  lu_ = a;
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::fabs(lu_(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::fabs(lu_(r, k));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < kPivotFloor) throw SingularMatrix(k);
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(pivot, c));
      std::swap(perm_[k], perm_[pivot]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = lu_(r, k) * inv;
      lu_(r, k) = f;
      if (f == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
    }
  }
}

void LuSolver::solve(std::span<double> b) const {
  const std::size_t n = lu_.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * y[j];
    y[i] = acc;
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = y[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= lu_(i, j) * b[j];
    b[i] = acc / lu_(i, i);
  }
}

std::vector<double> solve_linear(const DenseMatrix& a, std::span<const double> b) {
  if (b.size() != a.size()) throw std::invalid_argument("solve_linear: size mismatch");
  LuSolver lu;
  lu.factor(a);
  std::vector<double> x(b.begin(), b.end());
  lu.solve(x);
  return x;
}

}  // namespace compsim
