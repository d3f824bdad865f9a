#include "disenlink/sparse.hpp"

namespace disenlink {

CsrMatrix CsrMatrix::from_dense(const Tensor& dense) {
  CsrMatrix m;
  m.rows = dense.rows();
  m.cols = dense.cols();
  m.offsets.assign(static_cast<size_t>(m.rows) + 1, 0);
  for (int64_t i = 0; i < m.rows; ++i) {
    for (int64_t j = 0; j < m.cols; ++j) {
      double v = dense.at(i, j);
      if (v != 0.0) {
        m.col_idx.push_back(static_cast<int32_t>(j));
        m.values.push_back(v);
      }
    }
    m.offsets[static_cast<size_t>(i) + 1] = static_cast<int64_t>(m.values.size());
  }
  return m;
}

}  // namespace disenlink
