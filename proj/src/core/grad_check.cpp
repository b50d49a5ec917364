/* Copyright 2026 The ChromaFlow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cmath>

#include "chromaflow/diff_op.hpp"
#include "chromaflow/rng.hpp"

namespace chromaflow {
namespace {

void require_finite(const std::vector<TensorD>& outputs) {
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    if (!outputs[k].all_finite()) {
      throw NumericError("grad_check: forward output " + std::to_string(k) +
                         " contains non-finite values");
    }
  }
}

}  // namespace

GradCheckReport grad_check_report(DiffOp<double>& op,
                                  std::vector<TensorD> inputs,
                                  const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw UsageError("grad_check: step must be > 0");

  std::vector<TensorD> outputs = op.forward(inputs);
  require_finite(outputs);
  auto project = [](const std::vector<TensorD>& outs, const std::vector<TensorD>& r) {
    double acc = 0.0;
    for (std::size_t o = 0; o < outs.size(); ++o) {
      for (std::size_t j = 0; j < outs[o].size(); ++j) acc += r[o][j] * outs[o][j];
    }
    return acc;
  };

  Rng rng(options.seed);
  std::vector<TensorD> projection;
  projection.reserve(outputs.size());
  for (const auto& out : outputs) {
    TensorD r(out.shape());
    for (double& v : r.data()) v = rng.uniform(-1.0, 1.0);
    projection.push_back(std::move(r));
  }
  const std::vector<TensorD> analytic = op.backward(projection);
  const double center = project(outputs, projection);

  std::vector<std::size_t> which = options.check_inputs;
  if (which.empty()) {
    for (std::size_t k = 0; k < inputs.size(); ++k) which.push_back(k);
  }

  GradCheckReport report;
  for (std::size_t k : which) {
    TensorD& x = inputs.at(k);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double original = x[i];
      const double plus = original + options.step;
      const double minus = original - options.step;
      // Divide by the step actually taken after rounding.
      const double taken = plus - minus;

      x[i] = plus;
      const std::vector<TensorD> out_plus = op.forward(inputs);
      x[i] = minus;
      const std::vector<TensorD> out_minus = op.forward(inputs);
      x[i] = original;
      require_finite(out_plus);
      require_finite(out_minus);

      double numeric = 0.0;
      for (std::size_t o = 0; o < out_plus.size(); ++o) {
        for (std::size_t j = 0; j < out_plus[o].size(); ++j) {
          numeric += projection[o][j] *
                     ((out_plus[o][j] - out_minus[o][j]) / taken);
        }
      }
      if (options.skip_kinks) {
        const double forward = (project(out_plus, projection) - center) / (plus - original);
        const double backward = (center - project(out_minus, projection)) / (original - minus);
        const double scale = std::max({std::abs(forward), std::abs(backward), 1e-8});
        if (std::abs(forward - backward) > options.kink_tolerance * scale) {
          ++report.skipped;
          continue;
        }
      }
      ++report.checked;
      const double a = analytic[k][i];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double err = std::abs(a - numeric) / denom;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_input = k;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  // Leave the op holding context for the unperturbed inputs.
  op.forward(inputs);
  return report;
}

}  // namespace chromaflow
