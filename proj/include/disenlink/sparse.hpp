#pragma once

#include <cstdint>
#include <vector>

#include "disenlink/tensor.hpp"

namespace disenlink {

/// Compressed sparse rows. Used as a constant left operand in the tape's
/// sparse-times-dense product; feature matrices of bag-of-words graphs are
/// typically 1-5% dense, which makes the projection step dramatically
/// cheaper than a dense product.
struct CsrMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<int64_t> offsets;  // size rows+1
  std::vector<int32_t> col_idx;
  std::vector<double> values;

  static CsrMatrix from_dense(const Tensor& dense);

  int64_t nnz() const { return static_cast<int64_t>(values.size()); }
  double density() const {
    return rows * cols == 0 ? 0.0 : static_cast<double>(nnz()) / static_cast<double>(rows * cols);
  }
};

}  // namespace disenlink
