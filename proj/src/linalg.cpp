#include "umbilic4/linalg.hpp"

#include <algorithm>

namespace umbilic4 {

NumericKernel numeric_kernel(const Eigen::MatrixXd& m, double rel_tol, double scale) {
  NumericKernel out;
  const Eigen::Index n = m.cols();
  // Pad to at least n rows so that V is a full n×n basis.
  Eigen::MatrixXd a = m;
  if (a.rows() < n) {
    a.conservativeResize(n, n);
    a.bottomRows(n - m.rows()).setZero();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const double smax = std::max(out.singular_values.size() ? out.singular_values(0) : 0.0, scale);
  int rank = 0;
  for (Eigen::Index k = 0; k < out.singular_values.size(); ++k)
    if (smax > 0 && out.singular_values(k) > rel_tol * smax) ++rank;
  out.dim = static_cast<int>(n) - rank;
  out.basis = svd.matrixV().rightCols(out.dim);
  return out;
}

}  // namespace umbilic4
