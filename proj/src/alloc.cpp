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

#include "tvgd/alloc.hpp"

#include <atomic>
#include <new>
#include <string>

#include "tvgd/error.hpp"

namespace tvgd::alloc {

namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};
std::atomic<std::size_t> g_cap{0};

constexpr std::align_val_t kAlign{64};

void bump_peak(std::size_t live_now) {
  std::size_t prev = g_peak.load(std::memory_order_relaxed);
  while (prev < live_now &&
         !g_peak.compare_exchange_weak(prev, live_now,
                                       std::memory_order_relaxed)) {
  }
}

}  // namespace

void* allocate(std::size_t bytes) {
  if (bytes == 0) return nullptr;
  std::size_t cap_now = g_cap.load(std::memory_order_relaxed);
  std::size_t live_now =
      g_live.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  if (cap_now != 0 && live_now > cap_now) {
    g_live.fetch_sub(bytes, std::memory_order_relaxed);
    throw MemCapError("allocation cap exceeded: live " +
                      std::to_string(live_now) + " bytes > cap " +
                      std::to_string(cap_now));
  }
  bump_peak(live_now);
  return ::operator new(bytes, kAlign);
}

void deallocate(void* p, std::size_t bytes) noexcept {
  if (p == nullptr) return;
  g_live.fetch_sub(bytes, std::memory_order_relaxed);
  ::operator delete(p, kAlign);
}

std::size_t live_bytes() { return g_live.load(std::memory_order_relaxed); }
std::size_t peak_bytes() { return g_peak.load(std::memory_order_relaxed); }

void reset_peak() {
  g_peak.store(g_live.load(std::memory_order_relaxed),
               std::memory_order_relaxed);
}

void set_cap(std::size_t cap_bytes) {
  g_cap.store(cap_bytes, std::memory_order_relaxed);
}

std::size_t cap() { return g_cap.load(std::memory_order_relaxed); }

}  // namespace tvgd::alloc
