/* Copyright 2026 The duplexflow Authors. All Rights Reserved.

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

#include "dflow/interleave/projector.h"

#include <algorithm>
#include <string>

#include "dflow/core/error.h"

namespace dflow::interleave {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix data size " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows_) + "x" +
                     std::to_string(cols_));
  }
}

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void copy_pair(const Matrix& left, const Matrix& right, Matrix& out,
               std::size_t row_offset) {
  const std::size_t width = left.cols();
  for (std::size_t r = 0; r < left.rows(); ++r) {
    auto dst = out.row(row_offset + r);
    std::copy(left.row(r).begin(), left.row(r).end(), dst.begin());
    std::copy(right.row(r).begin(), right.row(r).end(), dst.begin() + width);
  }
}

}  // namespace

ProjectorInputShape projector_input_shape(std::size_t query_rows,
                                          std::size_t text_rows,
                                          std::size_t hidden_width) {
  return {query_rows + text_rows, 2 * hidden_width};
}

Matrix assemble_projector_input(const Matrix& user_embeds, const Matrix& user_hidden,
                                const Matrix& text_embeds, const Matrix& text_hidden) {
  if (user_embeds.rows() != user_hidden.rows()) {
    throw ShapeError("user embeds " + dims(user_embeds) + " and user hidden " +
                     dims(user_hidden) + " disagree on rows");
  }
  if (text_embeds.rows() != text_hidden.rows()) {
    throw ShapeError("text embeds " + dims(text_embeds) + " and text hidden " +
                     dims(text_hidden) + " disagree on rows");
  }
  if (text_embeds.rows() == 0) throw ShapeError("text batch has no rows");
  const std::size_t width = text_embeds.cols();
  for (const Matrix* m : {&user_embeds, &user_hidden, &text_hidden}) {
    if (m->cols() != width) {
      throw ShapeError("width mismatch: " + dims(*m) + " vs hidden width " +
                       std::to_string(width));
    }
  }
  if (width == 0) throw ShapeError("hidden width must be >= 1");

  const auto shape = projector_input_shape(user_embeds.rows(), text_embeds.rows(), width);
  Matrix out(shape.rows, shape.cols);
  copy_pair(user_embeds, user_hidden, out, 0);
  copy_pair(text_embeds, text_hidden, out, user_embeds.rows());
  return out;
}

Matrix assemble_projector_input(const Matrix& user_embeds, const Matrix& user_hidden,
                                const Matrix& text_embeds, const Matrix& text_hidden,
                                const RatioPolicy& policy, bool final_batch) {
  validate(policy);
  const std::size_t n = text_embeds.rows();
  const bool ok = final_batch ? (n >= 1 && n <= policy.n_semantic)
                              : n == policy.n_semantic;
  if (!ok) {
    throw ShapeError("text batch of " + std::to_string(n) + " rows under a " +
                     std::to_string(policy.n_semantic) + "-token policy" +
                     (final_batch ? " (final batch)" : ""));
  }
  return assemble_projector_input(user_embeds, user_hidden, text_embeds, text_hidden);
}

}  // namespace dflow::interleave
