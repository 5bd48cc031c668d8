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

#include "qcmine/nn/tensor.h"

#include <cmath>
#include <functional>
#include <numeric>

#include "qcmine/error.h"

namespace qcmine::nn {

namespace {
size_t ShapeProduct(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw Error(ErrorCode::kShapeMismatch, "negative dimension");
    n *= static_cast<size_t>(d);
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(ShapeProduct(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (ShapeProduct(shape_) != data_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "data size " + std::to_string(data_.size()) +
                    " does not match shape " + ShapeString());
  }
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::AllFinite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::ShapeString() const {
  std::string s = "[";
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

void MatVecAccumulate(const Tensor& w, std::span<const double> x,
                      std::span<double> y) {
  const int rows = w.rows();
  const int cols = w.cols();
  const double* wd = w.data().data();
  for (int r = 0; r < rows; ++r) {
    const double* wr = wd + static_cast<size_t>(r) * cols;
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] += acc;
  }
}

void MatTransposeVecAccumulate(const Tensor& w, std::span<const double> dy,
                               std::span<double> x_grad) {
  const int rows = w.rows();
  const int cols = w.cols();
  const double* wd = w.data().data();
  for (int r = 0; r < rows; ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    const double* wr = wd + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) x_grad[c] += wr[c] * g;
  }
}

void OuterAccumulate(std::span<const double> dy, std::span<const double> x,
                     Tensor& w_grad) {
  const int rows = w_grad.rows();
  const int cols = w_grad.cols();
  double* gd = w_grad.data().data();
  for (int r = 0; r < rows; ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    double* gr = gd + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) gr[c] += g * x[c];
  }
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace qcmine::nn
