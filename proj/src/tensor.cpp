#include "disenlink/tensor.hpp"

#include <cmath>
#include <sstream>

#include "disenlink/errors.hpp"

namespace disenlink {

namespace {

int64_t shape_product(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

}  // namespace

Tensor Tensor::zeros(std::vector<int64_t> shape) {
  Tensor t;
  t.shape = std::move(shape);
  t.data.assign(static_cast<size_t>(shape_product(t.shape)), 0.0);
  return t;
}

Tensor Tensor::full(std::vector<int64_t> shape, double value) {
  Tensor t;
  t.shape = std::move(shape);
  t.data.assign(static_cast<size_t>(shape_product(t.shape)), value);
  return t;
}

Tensor Tensor::scalar(double value) {
  Tensor t;
  t.shape = {1};
  t.data = {value};
  return t;
}

Tensor Tensor::from_rows(int64_t rows, int64_t cols, std::vector<double> values) {
  if (static_cast<int64_t>(values.size()) != rows * cols) {
    fail("shape_mismatch", "from_rows: value count does not match rows*cols");
  }
  Tensor t;
  t.shape = {rows, cols};
  t.data = std::move(values);
  return t;
}

Tensor Tensor::from_vector(std::vector<double> values) {
  Tensor t;
  t.shape = {static_cast<int64_t>(values.size())};
  t.data = std::move(values);
  return t;
}

int64_t Tensor::size() const { return static_cast<int64_t>(data.size()); }

int64_t Tensor::rows() const {
  if (rank() != 2) fail("shape_mismatch", "rows() on tensor of rank " + std::to_string(rank()));
  return shape[0];
}

int64_t Tensor::cols() const {
  if (rank() != 2) fail("shape_mismatch", "cols() on tensor of rank " + std::to_string(rank()));
  return shape[1];
}

double& Tensor::at(int64_t i, int64_t j) {
  return data[static_cast<size_t>(i * shape[1] + j)];
}

double Tensor::at(int64_t i, int64_t j) const {
  return data[static_cast<size_t>(i * shape[1] + j)];
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

Tensor glorot_init(int64_t rows, int64_t cols, Rng& rng) {
  if (rows <= 0 || cols <= 0) {
    fail("invalid_config", "glorot_init requires positive dimensions");
  }
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t = Tensor::zeros({rows, cols});
  for (double& v : t.data) v = rng.next_uniform(-a, a);
  return t;
}

Tensor glorot_init(int64_t rows, int64_t cols, uint64_t seed) {
  Rng rng(seed);
  return glorot_init(rows, cols, rng);
}

}  // namespace disenlink
