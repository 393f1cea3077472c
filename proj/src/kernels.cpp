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

#include "tvgd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace tvgd::kernels {

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {

const KernelTable* select_initial() {
  const KernelTable* avx2 = avx2_table();
  const char* env = std::getenv("TVGD_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_table();
    if (std::strcmp(env, "avx2") == 0 && avx2 != nullptr &&
        cpu_supports_avx2()) {
      return avx2;
    }
    return &scalar_table();
  }
  if (avx2 != nullptr && cpu_supports_avx2()) return avx2;
  return &scalar_table();
}

const KernelTable* g_active = nullptr;

}  // namespace

const KernelTable& active() {
  if (g_active == nullptr) g_active = select_initial();
  return *g_active;
}

void force(const KernelTable& table) { g_active = &table; }

}  // namespace tvgd::kernels
