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

#pragma once

#include <cstddef>

// Dense inner-loop primitives behind the batch policy evaluation. Scalar
// reference implementations are always available; an AVX2/FMA variant is
// selected at runtime on capable x86-64 hosts. Results may differ from the
// scalar path only by floating-point reassociation.

namespace adptrack::kernels {

enum class Backend { kScalar, kAvx2 };

/// Best backend supported by the executing CPU.
Backend best_backend();

/// Backend used by the dispatching entry points below.
Backend active_backend();

/// Forces a backend; requests beyond the CPU's capability clamp to scalar.
void set_backend(Backend b);

const char* backend_name(Backend b);

/// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);

/// Returns sum_i x[i] * y[i].
double dot(const double* x, const double* y, std::size_t n);

/// m (row-major, n-by-n) += x * y^T
void rank1_update(double* m, const double* x, const double* y, std::size_t n);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void rank1_update(double* m, const double* x, const double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void rank1_update(double* m, const double* x, const double* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace adptrack::kernels
