/*
  Copyright (c) SDBE project contributors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace sdbe {

// Every failure surfaced by the library carries one of these categories.
// The names are stable: they are what the C API and the CLI print.
enum class ErrorCode {
  Ok = 0,
  InvalidArgument,
  DimensionMismatch,
  ZeroVector,
  LabelMismatch,
  EmptyInput,
  NotConverged,
  WrongMode,
  NumericalFailure,
  ConstantVector,
  DegenerateLabels,
  InfeasibleSpec,
  Io,
  BadMagic,
  TruncatedHeader,
  TruncatedPayload,
  TrailingBytes,
  LabelCountMismatch,
  NaNPayload,
  BadConfig,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The bare message, without the category prefix what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::WrongMode: return "WrongMode";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ConstantVector: return "ConstantVector";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::Io: return "Io";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedHeader: return "TruncatedHeader";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingBytes: return "TrailingBytes";
    case ErrorCode::LabelCountMismatch: return "LabelCountMismatch";
    case ErrorCode::NaNPayload: return "NaNPayload";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

}  // namespace sdbe
