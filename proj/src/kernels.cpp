// Copyright 2026 the adptrack authors.
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

#include "adptrack/kernels.hpp"

#include <atomic>

namespace adptrack::kernels {

namespace scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += x[i] * y[i];
  }
  return sum;
}

void rank1_update(double* m, const double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double* row = m + i * n;
    const double xi = x[i];
    for (std::size_t j = 0; j < n; ++j) {
      row[j] += xi * y[j];
    }
  }
}

}  // namespace scalar

Backend best_backend() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Backend::kAvx2;
  }
#endif
  return Backend::kScalar;
}

namespace {
std::atomic<Backend> g_backend{best_backend()};
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::kAvx2 && best_backend() != Backend::kAvx2) {
    b = Backend::kScalar;
  }
  g_backend.store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kAvx2:
      return "avx2";
    case Backend::kScalar:
    default:
      return "scalar";
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::kAvx2) {
    avx2::axpy(a, x, y, n);
    return;
  }
#endif
  scalar::axpy(a, x, y, n);
}

double dot(const double* x, const double* y, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::kAvx2) {
    return avx2::dot(x, y, n);
  }
#endif
  return scalar::dot(x, y, n);
}

void rank1_update(double* m, const double* x, const double* y, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::kAvx2) {
    avx2::rank1_update(m, x, y, n);
    return;
  }
#endif
  scalar::rank1_update(m, x, y, n);
}

}  // namespace adptrack::kernels
