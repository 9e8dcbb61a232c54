/*
   Copyright 2026 The AGCN Authors

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

namespace agcn {

enum class Errc {
    invalid_argument,
    shape_mismatch,
    index_out_of_range,
    self_loop,
    duplicate_edge,
    nonpositive_weight,
    non_finite,
    empty_mask,
    label_out_of_range,
    stale_cache,
    io_error,
    format_error,
    invariant_violation,
    divergence,
    no_convergence,
    undefined_statistic,
};

// Coarse grouping used by the C API and the CLI exit codes.
enum class ErrorCategory { usage, data, numerical };

constexpr ErrorCategory category_of(Errc code) noexcept {
    switch (code) {
    case Errc::io_error:
    case Errc::format_error:
    case Errc::invariant_violation:
        return ErrorCategory::data;
    case Errc::non_finite:
    case Errc::divergence:
    case Errc::no_convergence:
    case Errc::undefined_statistic:
        return ErrorCategory::numerical;
    default:
        return ErrorCategory::usage;
    }
}

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace agcn
