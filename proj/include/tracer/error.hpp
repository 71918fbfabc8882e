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

#include <stdexcept>
#include <string>

namespace tracer {

/// Base for all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model, function or tracer definition violates one of its invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// An operation was asked for something it cannot do with the given input
/// (non-Levy model where one is required, sampler-only jump law, ...).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Quadrature budget exhausted, factorization failure and friends.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tracer
