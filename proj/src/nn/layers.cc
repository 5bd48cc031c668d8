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

#include "qcmine/nn/layers.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcmine/error.h"

namespace qcmine::nn {
namespace {

void RequireFinite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFiniteInput, std::string(what) + " not finite");
    }
  }
}

void RequireSize(size_t got, size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + ": got " + std::to_string(got) +
                    ", expected " + std::to_string(want));
  }
}

}  // namespace

GruParams GruParams::Zeros(int input_dim, int hidden_dim) {
  const int cols = input_dim + hidden_dim;
  return {Tensor::Zeros(hidden_dim, cols), Tensor::Zeros(hidden_dim, cols),
          Tensor::Zeros(hidden_dim, cols), Tensor::Zeros(hidden_dim),
          Tensor::Zeros(hidden_dim),       Tensor::Zeros(hidden_dim)};
}

DenseParams DenseParams::Zeros(int in_dim, int out_dim,
                               Activation activation) {
  return {Tensor::Zeros(out_dim, in_dim), Tensor::Zeros(out_dim), activation};
}

Vector GruStep(std::span<const double> x, std::span<const double> h_prev,
               const GruParams& p, GruStepCache* cache) {
  const size_t dx = static_cast<size_t>(p.input_dim());
  const size_t dh = static_cast<size_t>(p.hidden_dim());
  RequireSize(x.size(), dx, "gru input");
  RequireSize(h_prev.size(), dh, "gru hidden");
  RequireFinite(x, "gru input");
  RequireFinite(h_prev, "gru hidden");

  Vector xh(dx + dh);
  std::copy(x.begin(), x.end(), xh.begin());
  std::copy(h_prev.begin(), h_prev.end(), xh.begin() + dx);

  Vector r(p.b_r.data());
  Vector u(p.b_u.data());
  MatVecAccumulate(p.w_r, xh, r);
  MatVecAccumulate(p.w_u, xh, u);
  for (size_t j = 0; j < dh; ++j) {
    r[j] = Sigmoid(r[j]);
    u[j] = Sigmoid(u[j]);
  }
  Vector xrh(xh);
  for (size_t j = 0; j < dh; ++j) xrh[dx + j] = r[j] * h_prev[j];
  Vector candidate(p.b.data());
  MatVecAccumulate(p.w, xrh, candidate);
  for (double& c : candidate) c = std::tanh(c);

  Vector h(dh);
  for (size_t j = 0; j < dh; ++j) {
    h[j] = u[j] * h_prev[j] + (1.0 - u[j]) * candidate[j];
  }
  if (cache != nullptr) {
    cache->xh = std::move(xh);
    cache->xrh = std::move(xrh);
    cache->h_prev.assign(h_prev.begin(), h_prev.end());
    cache->r = std::move(r);
    cache->u = std::move(u);
    cache->candidate = std::move(candidate);
  }
  return h;
}

void GruStepBackward(const GruStepCache& cache, std::span<const double> dh,
                     const GruParams& p, GruParams* grads,
                     std::span<double> dx, std::span<double> dh_prev) {
  const size_t in = static_cast<size_t>(p.input_dim());
  const size_t hid = static_cast<size_t>(p.hidden_dim());
  const Vector& h = cache.h_prev;

  Vector da_c(hid), da_u(hid);
  for (size_t j = 0; j < hid; ++j) {
    const double c = cache.candidate[j];
    const double u = cache.u[j];
    da_c[j] = dh[j] * (1.0 - u) * (1.0 - c * c);
    da_u[j] = dh[j] * (h[j] - c) * u * (1.0 - u);
    dh_prev[j] += dh[j] * u;
  }

  Vector d_xrh(in + hid, 0.0);
  MatTransposeVecAccumulate(p.w, da_c, d_xrh);
  Vector da_r(hid);
  for (size_t j = 0; j < hid; ++j) {
    const double d_rh = d_xrh[in + j];
    const double r = cache.r[j];
    dh_prev[j] += d_rh * r;
    da_r[j] = d_rh * h[j] * r * (1.0 - r);
  }
  for (size_t i = 0; i < in; ++i) dx[i] += d_xrh[i];

  Vector d_xh(in + hid, 0.0);
  MatTransposeVecAccumulate(p.w_u, da_u, d_xh);
  MatTransposeVecAccumulate(p.w_r, da_r, d_xh);
  for (size_t i = 0; i < in; ++i) dx[i] += d_xh[i];
  for (size_t j = 0; j < hid; ++j) dh_prev[j] += d_xh[in + j];

  if (grads != nullptr) {
    OuterAccumulate(da_c, cache.xrh, grads->w);
    OuterAccumulate(da_u, cache.xh, grads->w_u);
    OuterAccumulate(da_r, cache.xh, grads->w_r);
    for (size_t j = 0; j < hid; ++j) {
      grads->b[j] += da_c[j];
      grads->b_u[j] += da_u[j];
      grads->b_r[j] += da_r[j];
    }
  }
}

BiGruOutput BiGruEncode(const std::vector<Vector>& xs, const GruParams& fwd,
                        const GruParams& bwd) {
  if (xs.empty()) throw Error(ErrorCode::kEmptySequence, "bigru input empty");
  const size_t n = xs.size();
  BiGruOutput out;
  out.forward.resize(n);
  out.backward.resize(n);
  Vector h(static_cast<size_t>(fwd.hidden_dim()), 0.0);
  for (size_t t = 0; t < n; ++t) {
    h = GruStep(xs[t], h, fwd);
    out.forward[t] = h;
  }
  h.assign(static_cast<size_t>(bwd.hidden_dim()), 0.0);
  for (size_t t = n; t-- > 0;) {
    h = GruStep(xs[t], h, bwd);
    out.backward[t] = h;
  }
  return out;
}

Vector Dense(std::span<const double> x, const DenseParams& p) {
  RequireSize(x.size(), static_cast<size_t>(p.in_dim()), "dense input");
  RequireFinite(x, "dense input");
  Vector y(p.b.data());
  MatVecAccumulate(p.w, x, y);
  if (p.activation == Activation::kTanh) {
    for (double& v : y) v = std::tanh(v);
  }
  return y;
}

void DenseBackward(std::span<const double> x, std::span<const double> y,
                   std::span<const double> dy, const DenseParams& p,
                   DenseParams* grads, std::span<double> dx) {
  Vector da(dy.begin(), dy.end());
  if (p.activation == Activation::kTanh) {
    for (size_t j = 0; j < da.size(); ++j) da[j] *= 1.0 - y[j] * y[j];
  }
  MatTransposeVecAccumulate(p.w, da, dx);
  if (grads != nullptr) {
    OuterAccumulate(da, x, grads->w);
    for (size_t j = 0; j < da.size(); ++j) grads->b[j] += da[j];
  }
}

SoftmaxXentResult SoftmaxXent(std::span<const double> logits, int gold) {
  if (gold < 0 || static_cast<size_t>(gold) >= logits.size()) {
    throw Error(ErrorCode::kShapeMismatch, "gold label out of range");
  }
  RequireFinite(logits, "logits");
  const double max = *std::max_element(logits.begin(), logits.end());
  SoftmaxXentResult result;
  result.probs.resize(logits.size());
  double sum = 0.0;
  for (size_t k = 0; k < logits.size(); ++k) {
    result.probs[k] = std::exp(logits[k] - max);
    sum += result.probs[k];
  }
  for (double& p : result.probs) p /= sum;
  // log-sum-exp keeps the loss exact even when probs[gold] underflows.
  result.loss = std::log(sum) - (logits[gold] - max);
  return result;
}

Vector SoftmaxXentGrad(const SoftmaxXentResult& result, int gold) {
  Vector grad(result.probs);
  grad[gold] -= 1.0;
  return grad;
}

void AdamUpdate(std::span<Tensor* const> params,
                std::span<const Tensor* const> grads, AdamState& state) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::kShapeMismatch, "params/grads count differ");
  }
  if (state.lr <= 0.0) throw Error(ErrorCode::kConfigInvalid, "lr must be > 0");
  if (state.first_moment.empty() && state.step == 0) {
    for (const Tensor* p : params) {
      state.first_moment.push_back(Tensor::ZerosLike(*p));
      state.second_moment.push_back(Tensor::ZerosLike(*p));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "adam state size differs");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->SameShape(*grads[i]) ||
        !params[i]->SameShape(state.first_moment[i])) {
      throw Error(ErrorCode::kShapeMismatch,
                  "adam tensor " + std::to_string(i) + " shape " +
                      params[i]->ShapeString());
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    std::vector<double>& p = params[i]->data();
    const std::vector<double>& g = grads[i]->data();
    std::vector<double>& m = state.first_moment[i].data();
    std::vector<double>& v = state.second_moment[i].data();
    for (size_t k = 0; k < p.size(); ++k) {
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      p[k] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

Tensor GlorotInit(int rows, int cols, Rng& rng) {
  Tensor t = Tensor::Zeros(rows, cols);
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& v : t.data()) v = rng.Uniform(-a, a);
  return t;
}

Tensor GlorotInit(const std::vector<int>& shape, uint64_t seed) {
  if (shape.size() != 2) {
    throw Error(ErrorCode::kShapeMismatch, "glorot init needs a 2-D shape");
  }
  Rng rng(seed);
  return GlorotInit(shape[0], shape[1], rng);
}

}  // namespace qcmine::nn
