// Copyright 2026 The tracer authors
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

#include <Eigen/Dense>

namespace tracer {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Symmetric square root S with S*S = m for a symmetric nonnegative-definite
/// matrix. Eigenvalues in [-tol*scale, 0) are clamped to zero; anything more
/// negative throws NumericalError.
Mat symmetric_sqrt(const Mat& m, double tol = 1e-10);

/// True when m is symmetric to `tol` (absolute, scaled by max |m_ij|).
bool is_symmetric(const Mat& m, double tol = 1e-12);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Mat& m);

}  // namespace tracer
