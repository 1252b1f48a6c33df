#include "ris/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace ris::simd {
namespace {

// Two interleaved complex<double> per __m256d lane group.

inline __m256d cmul(__m256d a, __m256d b) {
    // (ar*br - ai*bi, ar*bi + ai*br) for each complex pair
    const __m256d ar = _mm256_permute_pd(a, 0b0000);
    const __m256d ai = _mm256_permute_pd(a, 0b1111);
    const __m256d bswap = _mm256_permute_pd(b, 0b0101);
    return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bswap));
}

void axpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const std::size_t n2 = n / 2 * 2;
    const __m256d av =
        _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        __m256d yv = _mm256_loadu_pd(reinterpret_cast<double*>(const_cast<cplx*>(y + i)));
        yv = _mm256_add_pd(yv, cmul(av, xv));
        _mm256_storeu_pd(reinterpret_cast<double*>(y + i), yv);
    }
    for (std::size_t i = n2; i < n; ++i) y[i] += a * x[i];
}

cplx dotc_avx2(std::size_t n, const cplx* x, const cplx* y) {
    const std::size_t n2 = n / 2 * 2;
    __m256d acc_p = _mm256_setzero_pd();  // lanes: xr*yr, xi*yi
    __m256d acc_q = _mm256_setzero_pd();  // lanes: xi*yr, xr*yi
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        const __m256d yv = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
        acc_p = _mm256_fmadd_pd(xv, yv, acc_p);
        acc_q = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0b0101), yv, acc_q);
    }
    alignas(32) double p[4], q[4];
    _mm256_store_pd(p, acc_p);
    _mm256_store_pd(q, acc_q);
    double re = p[0] + p[1] + p[2] + p[3];
    double im = (q[1] - q[0]) + (q[3] - q[2]);
    for (std::size_t i = n2; i < n; ++i) {
        const cplx v = std::conj(x[i]) * y[i];
        re += v.real();
        im += v.imag();
    }
    return {re, im};
}

void hadamard_avx2(std::size_t n, const cplx* x, const cplx* y, cplx* out) {
    const std::size_t n2 = n / 2 * 2;
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        const __m256d yv = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
        _mm256_storeu_pd(reinterpret_cast<double*>(out + i), cmul(xv, yv));
    }
    for (std::size_t i = n2; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_avx2(std::size_t n, cplx a, cplx* x) {
    const std::size_t n2 = n / 2 * 2;
    const __m256d av =
        _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        _mm256_storeu_pd(reinterpret_cast<double*>(x + i), cmul(av, xv));
    }
    for (std::size_t i = n2; i < n; ++i) x[i] *= a;
}

double norm2sq_avx2(std::size_t n, const cplx* x) {
    const std::size_t n2 = n / 2 * 2;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n2; i += 2) {
        const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    alignas(32) double p[4];
    _mm256_store_pd(p, acc);
    double s = p[0] + p[1] + p[2] + p[3];
    for (std::size_t i = n2; i < n; ++i)
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

}  // namespace

const Kernels* avx2_kernels() {
    static const Kernels k{axpy_avx2, dotc_avx2, hadamard_avx2, scale_avx2,
                           norm2sq_avx2, "avx2"};
    static const bool supported = __builtin_cpu_supports("avx2") &&
                                  __builtin_cpu_supports("fma");
    return supported ? &k : nullptr;
}

}  // namespace ris::simd

#else

namespace ris::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace ris::simd

#endif
