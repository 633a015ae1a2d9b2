// Copyright 2026 The amrperturb Authors.
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

#ifndef AMRPERTURB_ERROR_HPP
#define AMRPERTURB_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace amrperturb {

// Root of every error raised by the library. The command line maps these to
// exit code 1 (data/validation errors).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Position inside PENMAN input, 1-based line and column.
struct TextPosition {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;
};

class GraphError : public Error {
 public:
  enum class Kind {
    kSyntax,
    kDuplicateVariable,
    kUndefinedVariable,
    kCycle,
    kUnreachable,
    kInvalid,
  };

  GraphError(Kind kind, const std::string& message,
             std::optional<TextPosition> position = std::nullopt)
      : Error(Format(message, position)), kind_(kind), position_(position) {}

  Kind kind() const { return kind_; }
  const std::optional<TextPosition>& position() const { return position_; }

 private:
  static std::string Format(const std::string& message,
                            const std::optional<TextPosition>& position) {
    if (!position) return message;
    return "line " + std::to_string(position->line) + ", column " +
           std::to_string(position->column) + ": " + message;
  }

  Kind kind_;
  std::optional<TextPosition> position_;
};

class PerturbError : public Error {
 public:
  enum class Kind { kInapplicableSite, kDegenerateEdit };

  PerturbError(Kind kind, const std::string& message)
      : Error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// A candidate without a score, or with more than one.
class JoinError : public Error {
 public:
  JoinError(const std::string& id, const std::string& message)
      : Error(message + ": " + id), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Violations of the line-delimited adapter protocol, including timeouts.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Balanced accuracy and friends are undefined when only one class is present.
class MetricError : public Error {
 public:
  using Error::Error;
};

// Malformed input files, empty corpora, unbalanced inputs.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace amrperturb

#endif  // AMRPERTURB_ERROR_HPP
