#include "tsb/simd.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#if defined(__x86_64__) || defined(_M_X64)
#define TSB_X86 1
#include <immintrin.h>
#else
#define TSB_X86 0
#endif

namespace tsb::simd {

namespace {

// ---- scalar reference kernels ------------------------------------------
// std::fma keeps per-element rounding identical to the AVX2 fmadd path.

void scale_scalar(std::size_t n, double *x, double c) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

void axpy_scalar(std::size_t n, double *y, double c, const double *x) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(c, x[i], y[i]);
}

void lincomb2_scalar(std::size_t n, double *out, double c1, const double *x,
                     double c2, const double *y) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(c2, y[i], c1 * x[i]);
}

void lincomb4_scalar(std::size_t n, double *out, double c1, const double *x1,
                     double c2, const double *x2, double c3, const double *x3,
                     double c4, const double *x4) {
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::fma(c2, x2[i], c1 * x1[i]);
        t = std::fma(c3, x3[i], t);
        out[i] = std::fma(c4, x4[i], t);
    }
}

void axpby_acc_scalar(std::size_t n, double *out, double c1, const double *x,
                      double c2, const double *y) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::fma(c1, x[i], std::fma(c2, y[i], out[i]));
}

double dot_scalar(std::size_t n, const double *x, const double *y) {
    // Mirrors the 4-lane vector accumulation so both backends agree bitwise.
    double acc[4] = {0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int l = 0; l < 4; ++l) acc[l] = std::fma(x[i + l], y[i + l], acc[l]);
    double tail = 0;
    for (; i < n; ++i) tail = std::fma(x[i], y[i], tail);
    return ((acc[0] + acc[2]) + (acc[1] + acc[3])) + tail;
}

#if TSB_X86

// ---- AVX2 kernels --------------------------------------------------------

__attribute__((target("avx2,fma"))) void scale_avx2(std::size_t n, double *x,
                                                    double c) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vc));
    for (; i < n; ++i) x[i] *= c;
}

__attribute__((target("avx2,fma"))) void axpy_avx2(std::size_t n, double *y,
                                                   double c, const double *x) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = std::fma(c, x[i], y[i]);
}

__attribute__((target("avx2,fma"))) void lincomb2_avx2(std::size_t n, double *out,
                                                       double c1, const double *x,
                                                       double c2, const double *y) {
    const __m256d v1 = _mm256_set1_pd(c1), v2 = _mm256_set1_pd(c2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(v1, _mm256_loadu_pd(x + i));
        t = _mm256_fmadd_pd(v2, _mm256_loadu_pd(y + i), t);
        _mm256_storeu_pd(out + i, t);
    }
    for (; i < n; ++i) out[i] = std::fma(c2, y[i], c1 * x[i]);
}

__attribute__((target("avx2,fma"))) void
lincomb4_avx2(std::size_t n, double *out, double c1, const double *x1, double c2,
              const double *x2, double c3, const double *x3, double c4,
              const double *x4) {
    const __m256d v1 = _mm256_set1_pd(c1), v2 = _mm256_set1_pd(c2),
                  v3 = _mm256_set1_pd(c3), v4 = _mm256_set1_pd(c4);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(v1, _mm256_loadu_pd(x1 + i));
        t = _mm256_fmadd_pd(v2, _mm256_loadu_pd(x2 + i), t);
        t = _mm256_fmadd_pd(v3, _mm256_loadu_pd(x3 + i), t);
        t = _mm256_fmadd_pd(v4, _mm256_loadu_pd(x4 + i), t);
        _mm256_storeu_pd(out + i, t);
    }
    for (; i < n; ++i) {
        double t = std::fma(c2, x2[i], c1 * x1[i]);
        t = std::fma(c3, x3[i], t);
        out[i] = std::fma(c4, x4[i], t);
    }
}

__attribute__((target("avx2,fma"))) void axpby_acc_avx2(std::size_t n, double *out,
                                                        double c1, const double *x,
                                                        double c2, const double *y) {
    const __m256d v1 = _mm256_set1_pd(c1), v2 = _mm256_set1_pd(c2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_loadu_pd(out + i);
        t = _mm256_fmadd_pd(v2, _mm256_loadu_pd(y + i), t);
        t = _mm256_fmadd_pd(v1, _mm256_loadu_pd(x + i), t);
        _mm256_storeu_pd(out + i, t);
    }
    for (; i < n; ++i) out[i] = std::fma(c1, x[i], std::fma(c2, y[i], out[i]));
}

__attribute__((target("avx2,fma"))) double dot_avx2(std::size_t n, const double *x,
                                                    const double *y) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double tail = 0;
    for (; i < n; ++i) tail = std::fma(x[i], y[i], tail);
    return ((lanes[0] + lanes[2]) + (lanes[1] + lanes[3])) + tail;
}

const Kernels kAvx2 = {scale_avx2,    axpy_avx2,      lincomb2_avx2,
                       lincomb4_avx2, axpby_acc_avx2, dot_avx2};

#endif // TSB_X86

const Kernels kScalar = {scale_scalar,    axpy_scalar,      lincomb2_scalar,
                         lincomb4_scalar, axpby_acc_scalar, dot_scalar};

Backend select_backend() {
    const char *env = std::getenv("TSB_SIMD");
    std::string mode = env ? env : "auto";
    if (mode == "scalar") return Backend::Scalar;
    if (mode == "avx2") {
        if (!avx2_supported())
            throw std::runtime_error("TSB_SIMD=avx2 requested but CPU lacks AVX2+FMA");
        return Backend::Avx2;
    }
    return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

} // namespace

const Kernels &scalar_kernels() { return kScalar; }

bool avx2_supported() {
#if TSB_X86
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() {
    static const Backend b = select_backend();
    return b;
}

const char *backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

const Kernels &active() {
#if TSB_X86
    return active_backend() == Backend::Avx2 ? kAvx2 : kScalar;
#else
    return kScalar;
#endif
}

} // namespace tsb::simd
