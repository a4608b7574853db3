#pragma once

#include <vector>

#include "lnv/netsys.hpp"
#include "oracles.hpp"

namespace testing_helpers {

/// Samples of a data matrix as per-sample vectors for the oracle.
inline std::vector<std::vector<double>> columns(const lnv::RealMatrix& m) {
  std::vector<std::vector<double>> out(m.cols, std::vector<double>(m.rows));
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) out[c][r] = m(r, c);
  return out;
}

inline std::vector<oracle::cd> to_oracle(std::span<const lnv::Complex> v) { return {v.begin(), v.end()}; }

inline lnv::TrainingSet single_datum(double x, double y) {
  lnv::TrainingSet t{lnv::RealMatrix(1, 1), lnv::RealMatrix(1, 1)};
  t.x(0, 0) = x;
  t.y(0, 0) = y;
  return t;
}

}  // namespace testing_helpers
