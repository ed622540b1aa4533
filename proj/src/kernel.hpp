#pragma once

// Shared helpers for the O(n^2) double sums.

#include <vector>

#include "tpk/points.hpp"

#include "tpk/parallel.hpp"

namespace tpk::detail {

/// Signed offset w in (-1/2, 1/2] for index step m in [1, n).
inline double offset(int m, int n) {
  return 2 * m <= n ? double(m) / n : double(m) / n - 1.0;
}

/// Squared distance below which two samples count as the same point: (1e-12 times the
/// bounding-box diagonal)^2.
inline double coincidence_sq(const Points& x) {
  double diag = (x.colwise().maxCoeff() - x.colwise().minCoeff()).norm();
  return 1e-24 * diag * diag;
}

/// sum_i row(i), rows evaluated in parallel and combined with a fixed tree.
template <class Row>
double sum_rows(int n, Row&& row) {
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t i) { rows[i] = row(static_cast<int>(i)); });
  return pairwise_sum(rows);
}

}  // namespace tpk::detail
