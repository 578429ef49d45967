#pragma once

#include <string>

#include "sgl/types.hpp"

// Batched node kernels. The scalar versions are the reference; the AVX2
// versions perform the same IEEE operations in the same order, so results
// agree bit for bit when both are available.
namespace sgl::kernels {

enum class Isa { Scalar, Avx2 };

bool avx2_available();
Isa active_isa();
// Override the runtime choice (tests, benchmarking). Falls back to scalar if AVX2 is absent.
void force_isa(Isa isa);
std::string isa_name(Isa isa);

// out[j] = prod_k (a[k] - z[j]) * inv_d[k],  j < N
void node_product(const cplx* a, const double* inv_d, int K, const cplx* z, int N, cplx* out);
// out[r] = sum_j c[j] / (a[r] - z[j]),  r < R
void cauchy_sum(const cplx* a, int R, const cplx* z, const cplx* c, int N, cplx* out);

namespace scalar {
void node_product(const cplx* a, const double* inv_d, int K, const cplx* z, int N, cplx* out);
void cauchy_sum(const cplx* a, int R, const cplx* z, const cplx* c, int N, cplx* out);
}  // namespace scalar

namespace avx2 {
void node_product(const cplx* a, const double* inv_d, int K, const cplx* z, int N, cplx* out);
void cauchy_sum(const cplx* a, int R, const cplx* z, const cplx* c, int N, cplx* out);
}  // namespace avx2

}  // namespace sgl::kernels
