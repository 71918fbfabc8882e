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

#include "tracer/fields.hpp"

namespace tracer {

ScalarField::ScalarField(PeriodicFunction f) {
  // A function with only the zero mode is a constant.
  if (f.support_radius() == 0) {
    repr_ = f.mean();
  } else {
    repr_ = std::move(f);
  }
}

double ScalarField::operator()(std::span<const double> x) const {
  switch (repr_.index()) {
    case 0:
      return std::get<0>(repr_);
    case 1:
      return std::get<1>(repr_).evaluate(x);
    default:
      return std::get<2>(repr_)(x);
  }
}

std::optional<double> ScalarField::constant_value() const {
  if (const double* v = std::get_if<double>(&repr_)) return *v;
  return std::nullopt;
}

}  // namespace tracer
