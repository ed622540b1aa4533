#pragma once

#include <Eigen/Dense>

namespace tpk {

/// n x dim array of samples; row j is the value at parameter u_j = j/n.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// How tangents are obtained from uniformly spaced samples.
enum class DerivativeRule { spectral, central_difference };

/// Trapezoid L^2 inner product on R/Z: (1/n) sum_j <f_j, g_j>.
inline double l2_inner(const Points& f, const Points& g) {
  return f.cwiseProduct(g).sum() / static_cast<double>(f.rows());
}

inline double l2_norm(const Points& f) { return std::sqrt(l2_inner(f, f)); }

}  // namespace tpk
