// Copyright 2026 The dklock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DKLOCK_CORE_ERROR_HPP
#define DKLOCK_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dklock {

enum class ErrorCode {
    invalid_argument,
    invalid_field,
    invalid_duration,
    degraded_state,
    invalid_sequence,
    no_precession,
    plan_mismatch,
    infeasible,
    fit_failure,
    config_syntax,
    config_reference,
    config_missing,
    io,
};

const char *error_code_name(ErrorCode code);

/// Every failure raised by the core carries one of the codes above so the C
/// API and the CLI can map it without string matching.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

}  // namespace dklock

#endif
