// Copyright 2026, The rio Authors
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

/**
 * \file errors.hpp
 * \brief Exception types shared by every module.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rio {

enum class ErrorCode {
  DegenerateGeometry,
  EmptyStream,
  NonMonotonicTimestamps,
  EmptyScan,
  ZeroRangePoint,
  EmptyGrid,
  BinConfigMismatch,
  ParseError,
  EmptyFile,
  NoAssociations,
  InvalidConfig,
  InvalidArgument,
  SolverDiverged,
};

const char *to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Error tied to a line of an input file (1-based). line == 0 means the
/// problem is not attributable to a single line.
class ParseError : public Error {
 public:
  ParseError(const std::string &file, std::size_t line, const std::string &msg)
      : Error(ErrorCode::ParseError,
              file + ":" + std::to_string(line) + ": " + msg),
        line_(line) {}
  ParseError(ErrorCode code, const std::string &file, std::size_t line,
             const std::string &msg)
      : Error(code, file + ":" + std::to_string(line) + ": " + msg),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rio
