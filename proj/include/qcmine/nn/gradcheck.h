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

#ifndef QCMINE_NN_GRADCHECK_H_
#define QCMINE_NN_GRADCHECK_H_

#include <cstddef>
#include <functional>
#include <string>

#include "qcmine/nn/random.h"
#include "qcmine/nn/tensor.h"

namespace qcmine::nn {

// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true
// gradient is ~0 from dividing round-off by round-off.
double RelativeError(double analytic, double numeric, double floor = 1e-6);

struct GradCheckReport {
  double max_relative_error = 0.0;
  size_t checked = 0;
  size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Central differences of `loss` with respect to entries of `param`, compared
// with `analytic` (same shape). `loss` must read the current values of
// `param`. When max_entries > 0 and smaller than the tensor, a random subset
// drawn from `rng` is checked.
GradCheckReport CheckGradient(Tensor& param, const Tensor& analytic,
                              const std::function<double()>& loss,
                              double step = 1e-5, size_t max_entries = 0,
                              Rng* rng = nullptr);

}  // namespace qcmine::nn

#endif  // QCMINE_NN_GRADCHECK_H_
