//
// Copyright 2026 The dpjl Authors
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
//

#ifndef DPJL_ERROR_HPP_
#define DPJL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dpjl {

// Numeric values are part of the C API (see dpjl/dpjl.h) and must not change.
enum class ErrorCode : int {
  kNotPowerOfTwo = 1,
  kInvalidScale = 2,
  kInvalidAccuracy = 3,
  kInvalidBlockStructure = 4,
  kDimMismatch = 5,
  kInvalidPrivacy = 6,
  kGaussianNeedsDelta = 7,
  kSchemeMismatch = 8,
  kIncompatibleSketches = 9,
  kTooManyConfigs = 10,
  kInvalidArgument = 11,
  kIo = 12,
  kParse = 13,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dpjl

#endif  // DPJL_ERROR_HPP_
