#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disenlink/rng.hpp"

namespace disenlink {

/// Dense row-major tensor of doubles. Rank 1 and 2 cover everything the
/// engine needs; the shape is kept dynamic so checkpoints round-trip
/// arbitrary parameter shapes.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(std::vector<int64_t> shape);
  static Tensor full(std::vector<int64_t> shape, double value);
  static Tensor scalar(double value);  // shape {1}
  static Tensor from_rows(int64_t rows, int64_t cols, std::vector<double> values);
  static Tensor from_vector(std::vector<double> values);

  int64_t size() const;
  int64_t rank() const { return static_cast<int64_t>(shape.size()); }
  int64_t rows() const;
  int64_t cols() const;

  double& at(int64_t i, int64_t j);
  double at(int64_t i, int64_t j) const;
  double& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;
  std::string shape_str() const;
};

/// Uniform init on [-a, a] with a = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_init(int64_t rows, int64_t cols, uint64_t seed);
Tensor glorot_init(int64_t rows, int64_t cols, Rng& rng);

}  // namespace disenlink
