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

#include "qcmine/nn/graph.h"

#include <memory>
#include <string>

#include "qcmine/error.h"

namespace qcmine::nn {

Graph::Node Graph::Push(Vector value,
                        std::function<void(Graph&, Node)> backward) {
  NodeData node;
  node.value = std::move(value);
  if (record_) {
    node.grad.assign(node.value.size(), 0.0);
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return static_cast<Node>(nodes_.size() - 1);
}

Graph::Node Graph::Constant(Vector value) {
  return Push(std::move(value), nullptr);
}

Graph::Node Graph::EmbeddingRow(const Tensor& table, Tensor* grad, int row,
                                bool skip_grad) {
  if (row < 0 || row >= table.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "embedding row " + std::to_string(row) + " out of range");
  }
  auto values = table.row(row);
  Vector value(values.begin(), values.end());
  if (grad == nullptr || skip_grad) return Push(std::move(value), nullptr);
  return Push(std::move(value), [grad, row](Graph& g, Node self) {
    auto dst = grad->row(row);
    const Vector& src = g.nodes_[self].grad;
    for (size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
  });
}

Graph::Node Graph::Parameter(const Tensor& value, Tensor* grad) {
  if (grad == nullptr) return Push(value.data(), nullptr);
  return Push(value.data(), [grad](Graph& g, Node self) {
    const Vector& src = g.nodes_[self].grad;
    for (size_t k = 0; k < src.size(); ++k) (*grad)[k] += src[k];
  });
}

Graph::Node Graph::Gru(Node x, Node h, const GruParams& p, GruParams* grads) {
  if (!record_) return Push(GruStep(Value(x), Value(h), p), nullptr);
  auto cache = std::make_shared<GruStepCache>();
  Vector out = GruStep(Value(x), Value(h), p, cache.get());
  return Push(std::move(out), [x, h, &p, grads, cache](Graph& g, Node self) {
    GruStepBackward(*cache, g.nodes_[self].grad, p, grads, g.nodes_[x].grad,
                    g.nodes_[h].grad);
  });
}

Graph::Node Graph::Dense(Node x, const DenseParams& p, DenseParams* grads) {
  Vector out = nn::Dense(Value(x), p);
  if (!record_) return Push(std::move(out), nullptr);
  return Push(std::move(out), [x, &p, grads](Graph& g, Node self) {
    DenseBackward(g.nodes_[x].value, g.nodes_[self].value,
                  g.nodes_[self].grad, p, grads, g.nodes_[x].grad);
  });
}

Graph::Node Graph::Concat(std::span<const Node> parts) {
  Vector out;
  for (Node part : parts) {
    const Vector& v = Value(part);
    out.insert(out.end(), v.begin(), v.end());
  }
  if (!record_) return Push(std::move(out), nullptr);
  std::vector<Node> inputs(parts.begin(), parts.end());
  return Push(std::move(out), [inputs](Graph& g, Node self) {
    const Vector& src = g.nodes_[self].grad;
    size_t offset = 0;
    for (Node part : inputs) {
      Vector& dst = g.nodes_[part].grad;
      for (size_t k = 0; k < dst.size(); ++k) dst[k] += src[offset + k];
      offset += dst.size();
    }
  });
}

Graph::Node Graph::SoftmaxXent(Node logits, int gold) {
  SoftmaxXentResult result = nn::SoftmaxXent(Value(logits), gold);
  Vector probs = result.probs;
  Node self = Push({result.loss}, nullptr);
  nodes_[self].aux = std::move(probs);
  if (record_) {
    nodes_[self].backward = [logits, gold](Graph& g, Node self) {
      const double upstream = g.nodes_[self].grad[0];
      const Vector& probs = g.nodes_[self].aux;
      Vector& dst = g.nodes_[logits].grad;
      for (size_t k = 0; k < probs.size(); ++k) {
        dst[k] += upstream * (probs[k] - (static_cast<int>(k) == gold ? 1.0 : 0.0));
      }
    };
  }
  return self;
}

void Graph::Backward(Node loss, double scale) {
  if (!record_) {
    throw Error(ErrorCode::kConfigInvalid, "graph was built without a tape");
  }
  nodes_[loss].grad.assign(nodes_[loss].value.size(), scale);
  for (Node n = loss; n >= 0; --n) {
    if (nodes_[n].backward) nodes_[n].backward(*this, n);
  }
}

BiGruNodes BiGru(Graph& g, std::span<const Graph::Node> xs,
                 const GruParams& fwd, GruParams* fwd_grads,
                 const GruParams& bwd, GruParams* bwd_grads) {
  if (xs.empty()) throw Error(ErrorCode::kEmptySequence, "bigru input empty");
  BiGruNodes out;
  out.forward.resize(xs.size());
  out.backward.resize(xs.size());
  Graph::Node h = g.Zeros(fwd.hidden_dim());
  for (size_t t = 0; t < xs.size(); ++t) {
    h = g.Gru(xs[t], h, fwd, fwd_grads);
    out.forward[t] = h;
  }
  h = g.Zeros(bwd.hidden_dim());
  for (size_t t = xs.size(); t-- > 0;) {
    h = g.Gru(xs[t], h, bwd, bwd_grads);
    out.backward[t] = h;
  }
  return out;
}

}  // namespace qcmine::nn
