#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace ris::simd {

using cplx = std::complex<double>;

// Flat complex-array kernels used by the dense matrix layer. All arrays are
// contiguous, interleaved re/im (the std::complex<double> memory layout).
struct Kernels {
    // y[i] += a * x[i]
    void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
    // sum_i conj(x[i]) * y[i]
    cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
    // out[i] = x[i] * y[i]
    void (*hadamard)(std::size_t n, const cplx* x, const cplx* y, cplx* out);
    // x[i] *= a
    void (*scale)(std::size_t n, cplx a, cplx* x);
    // sum_i |x[i]|^2
    double (*norm2sq)(std::size_t n, const cplx* x);
    std::string_view name;
};

const Kernels& scalar_kernels();

// Returns nullptr when the CPU lacks AVX2 support.
const Kernels* avx2_kernels();

// Kernel set selected once at startup: AVX2 when available, scalar otherwise.
const Kernels& active_kernels();

}  // namespace ris::simd
