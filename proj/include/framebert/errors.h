// Copyright 2026 The FrameBERT Authors.
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

#ifndef FRAMEBERT_ERRORS_H_
#define FRAMEBERT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace framebert {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor extents do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Value outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// API misuse: wrong call order, missing argument, bad option value.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Token id outside the vocabulary.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Malformed input record. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input that violates a semantic invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Checkpoint and data disagree (vocabulary, frame inventory, shapes).
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

// File system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace framebert

#endif  // FRAMEBERT_ERRORS_H_
