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

#ifndef QCMINE_NN_GRAPH_H_
#define QCMINE_NN_GRAPH_H_

#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "qcmine/nn/layers.h"
#include "qcmine/nn/tensor.h"

namespace qcmine::nn {

// Single-owner reverse-mode tape over vector-valued nodes. Nodes are
// appended in evaluation order, so Backward() replays them in reverse.
// With `record = false` only values are computed (inference).
class Graph {
 public:
  using Node = int;

  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Node Constant(Vector value);
  Node Zeros(int n) { return Constant(Vector(static_cast<size_t>(n), 0.0)); }
  // Row `row` of `table`. Gradients flow into grad->row(row) unless grad is
  // null or `row` is listed as frozen by the caller (skip_grad).
  Node EmbeddingRow(const Tensor& table, Tensor* grad, int row,
                    bool skip_grad = false);
  // Whole 1-D parameter tensor.
  Node Parameter(const Tensor& value, Tensor* grad);
  Node Gru(Node x, Node h, const GruParams& p, GruParams* grads);
  Node Dense(Node x, const DenseParams& p, DenseParams* grads);
  Node Concat(std::span<const Node> parts);
  Node Concat(std::initializer_list<Node> parts) {
    return Concat(std::span<const Node>(parts.begin(), parts.size()));
  }
  // Scalar node holding -log softmax(logits)[gold]; Probs() exposes the
  // softmax of the same node.
  Node SoftmaxXent(Node logits, int gold);

  const Vector& Value(Node n) const { return nodes_[n].value; }
  const Vector& Grad(Node n) const { return nodes_[n].grad; }
  const Vector& Probs(Node loss) const { return nodes_[loss].aux; }

  // Seeds d(loss) = scale and propagates to every parameter gradient.
  void Backward(Node loss, double scale = 1.0);

  size_t size() const { return nodes_.size(); }

 private:
  struct NodeData {
    Vector value;
    Vector grad;
    Vector aux;
    std::function<void(Graph&, Node)> backward;
  };

  Node Push(Vector value, std::function<void(Graph&, Node)> backward);

  bool record_;
  std::vector<NodeData> nodes_;
};

struct BiGruNodes {
  std::vector<Graph::Node> forward;
  std::vector<Graph::Node> backward;
};

// Bidirectional GRU over `xs` with zero initial states. Throws
// kEmptySequence for no inputs.
BiGruNodes BiGru(Graph& g, std::span<const Graph::Node> xs,
                 const GruParams& fwd, GruParams* fwd_grads,
                 const GruParams& bwd, GruParams* bwd_grads);

}  // namespace qcmine::nn

#endif  // QCMINE_NN_GRAPH_H_
