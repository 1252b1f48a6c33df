#include "ris/simd.hpp"

namespace ris::simd {
namespace {

void axpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

cplx dotc_scalar(std::size_t n, const cplx* x, const cplx* y) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx v = std::conj(x[i]) * y[i];
        re += v.real();
        im += v.imag();
    }
    return {re, im};
}

void hadamard_scalar(std::size_t n, const cplx* x, const cplx* y, cplx* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_scalar(std::size_t n, cplx a, cplx* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double norm2sq_scalar(std::size_t n, const cplx* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{axpy_scalar, dotc_scalar, hadamard_scalar,
                           scale_scalar, norm2sq_scalar, "scalar"};
    return k;
}

const Kernels& active_kernels() {
    static const Kernels& k = []() -> const Kernels& {
        if (const Kernels* v = avx2_kernels()) return *v;
        return scalar_kernels();
    }();
    return k;
}

}  // namespace ris::simd
