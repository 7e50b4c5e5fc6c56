/*
 * Copyright 2026 The bsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace bsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, value out of range).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A cost guard refused work that would not finish at desk scale.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a numerical residue above tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace bsim
