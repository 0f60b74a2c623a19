// Copyright 2026 The detmetrics Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef DETMETRICS_ERRORS_H_
#define DETMETRICS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace detmetrics {

// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, dangling references, out-of-range values.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A metric or filter was requested that the inputs cannot support.
class ConfigurationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Nothing to evaluate, e.g. every class in an aggregation is undefined.
class UndefinedError : public Error {
 public:
  using Error::Error;
};

// A caller broke a precondition that well-formed pipelines guarantee.
// The CLI maps this to the internal-failure exit code.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace detmetrics

#endif  // DETMETRICS_ERRORS_H_
