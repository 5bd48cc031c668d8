/*
 * Copyright 2026 The qcmine Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QCMINE_NN_TENSOR_H_
#define QCMINE_NN_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qcmine::nn {

using Vector = std::vector<double>;

// Dense row-major tensor of doubles; only 1-D and 2-D shapes are used.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> data);

  static Tensor Zeros(int n) { return Tensor({n}); }
  static Tensor Zeros(int rows, int cols) { return Tensor({rows, cols}); }
  static Tensor ZerosLike(const Tensor& other) { return Tensor(other.shape_); }

  const std::vector<int>& shape() const { return shape_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  int rows() const { return shape_.empty() ? 0 : shape_[0]; }
  int cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols() + c];
  }

  std::span<double> row(int r) {
    return {data_.data() + static_cast<size_t>(r) * cols(),
            static_cast<size_t>(cols())};
  }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<size_t>(r) * cols(),
            static_cast<size_t>(cols())};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void Fill(double value);
  bool AllFinite() const;
  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string ShapeString() const;

  bool operator==(const Tensor& other) const = default;

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

// y += W x for W (rows x cols), x of length cols.
void MatVecAccumulate(const Tensor& w, std::span<const double> x,
                      std::span<double> y);
// x_grad += W^T dy
void MatTransposeVecAccumulate(const Tensor& w, std::span<const double> dy,
                               std::span<double> x_grad);
// W_grad += dy x^T
void OuterAccumulate(std::span<const double> dy, std::span<const double> x,
                     Tensor& w_grad);

double Sigmoid(double x);

}  // namespace qcmine::nn

#endif  // QCMINE_NN_TENSOR_H_
