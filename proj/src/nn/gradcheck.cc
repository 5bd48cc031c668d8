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

#include "qcmine/nn/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qcmine::nn {

double RelativeError(double analytic, double numeric, double floor) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport CheckGradient(Tensor& param, const Tensor& analytic,
                              const std::function<double()>& loss,
                              double step, size_t max_entries, Rng* rng) {
  std::vector<size_t> indices(param.size());
  std::iota(indices.begin(), indices.end(), 0);
  if (max_entries > 0 && max_entries < indices.size() && rng != nullptr) {
    rng->Shuffle(indices);
    indices.resize(max_entries);
    std::sort(indices.begin(), indices.end());
  }
  GradCheckReport report;
  for (size_t i : indices) {
    const double original = param[i];
    param[i] = original + step;
    const double plus = loss();
    param[i] = original - step;
    const double minus = loss();
    param[i] = original;
    const double numeric = (plus - minus) / (2.0 * step);
    const double err = RelativeError(analytic[i], numeric);
    ++report.checked;
    if (report.checked == 1 || err > report.max_relative_error) {
      report.max_relative_error = err;
      report.worst_index = i;
      report.worst_analytic = analytic[i];
      report.worst_numeric = numeric;
    }
  }
  return report;
}

}  // namespace qcmine::nn
