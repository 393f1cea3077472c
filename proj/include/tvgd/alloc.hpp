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

#ifndef TVGD_ALLOC_HPP
#define TVGD_ALLOC_HPP

#include <cstddef>

namespace tvgd::alloc {

/// 64-byte aligned allocation with live/peak byte accounting.
/// All tensor buffers go through here, so peak_bytes() is the
/// high-water mark the memory benchmark reports.
void* allocate(std::size_t bytes);
void deallocate(void* p, std::size_t bytes) noexcept;

std::size_t live_bytes();
std::size_t peak_bytes();

/// Resets the high-water mark down to the current live byte count.
void reset_peak();

/// Aborts allocations (MemCapError) once live bytes would exceed the cap.
/// cap = 0 disables the guard.
void set_cap(std::size_t cap_bytes);
std::size_t cap();

}  // namespace tvgd::alloc

#endif  // TVGD_ALLOC_HPP
