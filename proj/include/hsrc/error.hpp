/*
Copyright 2026 The HSRC Authors

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
#include <string_view>

namespace hsrc {

enum class ErrorCode {
    InvalidArgument,
    InvalidField,
    InvalidParams,
    EmptyObject,
    TripletMismatch,
    InsufficientFragments,
    DependentFragments,
    Parse,
    EmptyTrace,
    OracleOverflow,
    Io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidField: return "InvalidField";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::EmptyObject: return "EmptyObject";
        case ErrorCode::TripletMismatch: return "TripletMismatch";
        case ErrorCode::InsufficientFragments: return "InsufficientFragments";
        case ErrorCode::DependentFragments: return "DependentFragments";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::OracleOverflow: return "OracleOverflow";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace hsrc
