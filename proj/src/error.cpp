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

#include "agcn/error.hpp"

namespace agcn {

const char* errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::index_out_of_range: return "index_out_of_range";
    case Errc::self_loop: return "self_loop";
    case Errc::duplicate_edge: return "duplicate_edge";
    case Errc::nonpositive_weight: return "nonpositive_weight";
    case Errc::non_finite: return "non_finite";
    case Errc::empty_mask: return "empty_mask";
    case Errc::label_out_of_range: return "label_out_of_range";
    case Errc::stale_cache: return "stale_cache";
    case Errc::io_error: return "io_error";
    case Errc::format_error: return "format_error";
    case Errc::invariant_violation: return "invariant_violation";
    case Errc::divergence: return "divergence";
    case Errc::no_convergence: return "no_convergence";
    case Errc::undefined_statistic: return "undefined_statistic";
    }
    return "unknown";
}

}  // namespace agcn
