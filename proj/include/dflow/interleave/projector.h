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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dflow/core/types.h"

namespace dflow::interleave {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct ProjectorInputShape {
  std::size_t rows = 0;  // query rows + text rows
  std::size_t cols = 0;  // 2 * hidden width
};

/// Output projector input for one text batch. Query rows are
/// (user_embeds | user_hidden) concatenated along features; text rows are
/// (text_embeds | text_hidden); the query rows come first. Values are copied.
///
/// Throws ShapeError when row counts disagree pairwise, any width differs from
/// the others, or there are no text rows.
Matrix assemble_projector_input(const Matrix& user_embeds, const Matrix& user_hidden,
                                const Matrix& text_embeds, const Matrix& text_hidden);

/// Same, additionally requiring the text batch to hold exactly n_semantic rows,
/// or 1..n_semantic rows when it is the final batch of the turn.
Matrix assemble_projector_input(const Matrix& user_embeds, const Matrix& user_hidden,
                                const Matrix& text_embeds, const Matrix& text_hidden,
                                const RatioPolicy& policy, bool final_batch);

ProjectorInputShape projector_input_shape(std::size_t query_rows,
                                          std::size_t text_rows,
                                          std::size_t hidden_width);

}  // namespace dflow::interleave
