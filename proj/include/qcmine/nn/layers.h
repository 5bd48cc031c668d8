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

#ifndef QCMINE_NN_LAYERS_H_
#define QCMINE_NN_LAYERS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "qcmine/nn/random.h"
#include "qcmine/nn/tensor.h"

namespace qcmine::nn {

// GRU cell over the concatenated input [x, h]:
//   r  = sigmoid(W_r [x, h] + b_r)
//   u  = sigmoid(W_u [x, h] + b_u)
//   h~ = tanh(W [x, r * h] + b)
//   h' = u * h + (1 - u) * h~
// u close to 1 keeps the previous state.
struct GruParams {
  Tensor w_r, w_u, w;  // hidden x (input + hidden)
  Tensor b_r, b_u, b;  // hidden

  static GruParams Zeros(int input_dim, int hidden_dim);
  int input_dim() const { return w.cols() - w.rows(); }
  int hidden_dim() const { return w.rows(); }
};

enum class Activation { kNone, kTanh };

struct DenseParams {
  Tensor w;  // out x in
  Tensor b;  // out
  Activation activation = Activation::kNone;

  static DenseParams Zeros(int in_dim, int out_dim, Activation activation);
  int in_dim() const { return w.cols(); }
  int out_dim() const { return w.rows(); }
};

struct GruStepCache {
  Vector xh;    // [x, h_prev]
  Vector xrh;   // [x, r * h_prev]
  Vector h_prev, r, u, candidate;
};

// Throws kShapeMismatch / kNonFiniteInput.
Vector GruStep(std::span<const double> x, std::span<const double> h_prev,
               const GruParams& p, GruStepCache* cache = nullptr);

// Accumulates parameter gradients into `grads` (may be null) and input
// gradients into dx / dh_prev.
void GruStepBackward(const GruStepCache& cache, std::span<const double> dh,
                     const GruParams& p, GruParams* grads,
                     std::span<double> dx, std::span<double> dh_prev);

struct BiGruOutput {
  std::vector<Vector> forward;   // forward[t] after reading x_0..x_t
  std::vector<Vector> backward;  // backward[t] after reading x_{T-1}..x_t
  const Vector& forward_last() const { return forward.back(); }
  const Vector& backward_first() const { return backward.front(); }
};

// Both directions start from zero. Throws kEmptySequence for no inputs.
BiGruOutput BiGruEncode(const std::vector<Vector>& xs, const GruParams& fwd,
                        const GruParams& bwd);

Vector Dense(std::span<const double> x, const DenseParams& p);
// `y` is the forward output. Accumulates into grads (nullable) and dx.
void DenseBackward(std::span<const double> x, std::span<const double> y,
                   std::span<const double> dy, const DenseParams& p,
                   DenseParams* grads, std::span<double> dx);

struct SoftmaxXentResult {
  Vector probs;
  double loss = 0.0;
};

// Max-subtracted softmax over the logits followed by -log(probs[gold]).
SoftmaxXentResult SoftmaxXent(std::span<const double> logits, int gold);
// d loss / d logits = probs - onehot(gold).
Vector SoftmaxXentGrad(const SoftmaxXentResult& result, int gold);

struct AdamState {
  int64_t step = 0;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

// Bias-corrected Adam. Moments are allocated on first use; afterwards the
// parameter list must keep the same shapes (kShapeMismatch otherwise).
void AdamUpdate(std::span<Tensor* const> params,
                std::span<const Tensor* const> grads, AdamState& state);

// uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)); fan_in = cols,
// fan_out = rows.
Tensor GlorotInit(int rows, int cols, Rng& rng);
Tensor GlorotInit(const std::vector<int>& shape, uint64_t seed);

}  // namespace qcmine::nn

#endif  // QCMINE_NN_LAYERS_H_
