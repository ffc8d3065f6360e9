// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/tensor.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "bcddi/errors.h"

namespace bcddi::nn {

std::size_t ShapeSize(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(ShapeSize(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != ShapeSize(shape_)) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + ShapeToString(shape_));
  }
}

Tensor Tensor::Scalar(double value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::Vector(std::vector<double> values) {
  Shape shape{values.size()};
  return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

Tensor Tensor::Matrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(values));
}

Tensor Tensor::ZerosLike(const Tensor& other) { return Tensor(other.shape_); }

std::size_t Tensor::rows() const {
  switch (shape_.size()) {
    case 0:
    case 1:
      return 1;
    case 2:
      return shape_[0];
    default:
      throw ShapeError("matrix view of rank-" + std::to_string(rank()) +
                       " tensor " + ShapeString());
  }
}

std::size_t Tensor::cols() const {
  switch (shape_.size()) {
    case 0:
      return 1;
    case 1:
      return shape_[0];
    case 2:
      return shape_[1];
    default:
      throw ShapeError("matrix view of rank-" + std::to_string(rank()) +
                       " tensor " + ShapeString());
  }
}

std::span<const double> Tensor::row(std::size_t r) const {
  std::size_t c = cols();
  return std::span<const double>(data_).subspan(r * c, c);
}

std::span<double> Tensor::row(std::size_t r) {
  std::size_t c = cols();
  return std::span<double>(data_).subspan(r * c, c);
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (other.size() != size()) {
    throw ShapeError("cannot accumulate " + other.ShapeString() + " into " +
                     ShapeString());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

std::string Tensor::ShapeString() const { return ShapeToString(shape_); }

}  // namespace bcddi::nn
