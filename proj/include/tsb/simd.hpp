// Runtime-dispatched kernels for the dense array arithmetic behind jet
// propagation. Every kernel exists in a scalar reference version and an AVX2
// version; both use fused multiply-add per element, so the two backends are
// required (and tested) to produce bit-identical results.
#pragma once

#include <cstddef>
#include <string>

namespace tsb::simd {

struct Kernels {
    // x[i] *= c
    void (*scale)(std::size_t n, double *x, double c);
    // y[i] += c * x[i]
    void (*axpy)(std::size_t n, double *y, double c, const double *x);
    // out[i] = c1*x[i] + c2*y[i]
    void (*lincomb2)(std::size_t n, double *out, double c1, const double *x,
                     double c2, const double *y);
    // out[i] = c1*x1[i] + c2*x2[i] + c3*x3[i] + c4*x4[i]
    void (*lincomb4)(std::size_t n, double *out, double c1, const double *x1,
                     double c2, const double *x2, double c3, const double *x3,
                     double c4, const double *x4);
    // out[i] += c1*x[i] + c2*y[i]
    void (*axpby_acc)(std::size_t n, double *out, double c1, const double *x,
                      double c2, const double *y);
    // sum_i x[i]*y[i], fixed 4-lane accumulation order
    double (*dot)(std::size_t n, const double *x, const double *y);
};

enum class Backend { Scalar, Avx2 };

const Kernels &scalar_kernels();
bool avx2_supported();

// Active backend: TSB_SIMD={scalar|avx2|auto} overrides auto-detection.
// Selected once on first use.
Backend active_backend();
const char *backend_name(Backend b);
const Kernels &active();

} // namespace tsb::simd
