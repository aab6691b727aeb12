/* Copyright 2026 The krobust Authors. All Rights Reserved.

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

#ifndef KROBUST_ERROR_HPP_
#define KROBUST_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace krobust {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Jamo indices outside (19, 21, 28).
class InvalidDecomposition : public Error {
 public:
  using Error::Error;
};

// Asked for the standalone glyph of the empty final slot.
class NoFinalError : public Error {
 public:
  using Error::Error;
};

// Character index outside the word.
class PositionError : public Error {
 public:
  using Error::Error;
};

// Matrix / vector dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Cosine schedule needs at least two layers.
class DegenerateScheduleError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Bad arguments to metrics, voting, splitting, configs.
class InputError : public Error {
 public:
  using Error::Error;
};

// Relative degradation against a zero baseline.
class UndefinedBaselineError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Duplicate ids, misaligned conditions, files that contradict each other.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace krobust

#endif  // KROBUST_ERROR_HPP_
