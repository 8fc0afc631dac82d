#pragma once

#include <Eigen/Dense>

#include <vector>

#include "umbilic4/field.hpp"

namespace umbilic4 {

/// Kernel of a matrix given by rows, over any exact field T. Reduced row echelon form; each
/// returned vector has a 1 in one free column and 0 in the other free columns.
template <class T>
std::vector<std::vector<T>> exact_nullspace(std::vector<std::vector<T>> rows, int ncols) {
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (int col = 0; col < ncols && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && exactly_zero(rows[piv][col])) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    T inv = T(1) / rows[rank][col];
    for (int c = col; c < ncols; ++c) rows[rank][c] *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || exactly_zero(rows[r][col])) continue;
      T f = rows[r][col];
      for (int c = col; c < ncols; ++c)
        if (!exactly_zero(rows[rank][c])) rows[r][c] -= f * rows[rank][c];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (int free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(ncols, T(0));
    v[free] = T(1);
    for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -rows[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

struct NumericKernel {
  Eigen::MatrixXd basis;  // orthonormal columns
  Eigen::VectorXd singular_values;
  int dim = 0;
};

/// Kernel via SVD; singular values <= rel_tol·max(σ_max, scale) count as zero. With scale = 0 a
/// zero matrix has full kernel; a positive scale keeps pure roundoff from setting the threshold.
NumericKernel numeric_kernel(const Eigen::MatrixXd& m, double rel_tol = 1e-9, double scale = 0);

}  // namespace umbilic4
