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

#include "tracer/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "tracer/error.hpp"

namespace tracer {

bool is_symmetric(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

Mat symmetric_sqrt(const Mat& m, double tol) {
  if (!is_symmetric(m, 1e-10)) {
    throw NumericalError("square root requested for a non-symmetric matrix");
  }
  if (m.size() == 0) return m;
  if (m.rows() == 1) {
    const double v = m(0, 0);
    if (v < -tol * std::max(1.0, std::abs(v))) {
      throw NumericalError("matrix is not nonnegative definite");
    }
    return Mat::Constant(1, 1, std::sqrt(std::max(v, 0.0)));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigen decomposition failed");
  }
  Vec ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol * scale) {
      throw NumericalError("matrix is not nonnegative definite");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace tracer
