// Copyright 2026 The tvgd Authors. All Rights Reserved.
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

#ifndef TVGD_ERROR_HPP
#define TVGD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tvgd {

/// Base error for everything raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user data or configuration (maps to CLI exit code 2).
struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Live allocation cap exceeded; the memory benchmark aborts a run on this.
struct MemCapError : Error {
  explicit MemCapError(const std::string& msg) : Error(msg) {}
};

}  // namespace tvgd

#endif  // TVGD_ERROR_HPP
