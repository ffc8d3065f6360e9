// SPDX-License-Identifier: Apache-2.0

#ifndef BCDDI_NN_TENSOR_H_
#define BCDDI_NN_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace bcddi::nn {

using Shape = std::vector<std::size_t>;

// Dense row-major tensor of 64-bit floats.
//
// Rank-1 tensors of length n behave as 1 x n row vectors wherever a matrix
// is expected, and rank-0 tensors as 1 x 1.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Scalar(double value);
  static Tensor Vector(std::vector<double> values);
  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);
  static Tensor Matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor ZerosLike(const Tensor& other);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Matrix view of the tensor; throws ShapeError for rank > 2.
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return data_[i]; }
  const double& operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  const double& at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<const double> row(std::size_t r) const;
  std::span<double> row(std::size_t r);
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  void Fill(double value);
  bool AllFinite() const;
  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }

  Tensor& operator+=(const Tensor& other);

  std::string ShapeString() const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

std::size_t ShapeSize(const Shape& shape);
std::string ShapeToString(const Shape& shape);

}  // namespace bcddi::nn

#endif  // BCDDI_NN_TENSOR_H_
