// Copyright 2026 The rdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace rdp {

/// Dense row-major matrix of 64-bit floats. Rows are data points.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline Vector row_of(const Matrix& m, std::size_t i) {
  return m.row(static_cast<Eigen::Index>(i)).transpose();
}

inline std::size_t rows(const Matrix& m) { return static_cast<std::size_t>(m.rows()); }
inline std::size_t cols(const Matrix& m) { return static_cast<std::size_t>(m.cols()); }

}  // namespace rdp
