// Small dense helpers for the chart dimensions that occur here (n <= 8).
// The factorizations are templated on the scalar so they can run on jets.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsb/jet.hpp"

namespace tsb {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0, cols = 0;
    Vec a;
    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double &operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

struct Ten3 {
    int n1 = 0, n2 = 0, n3 = 0;
    Vec a;
    Ten3() = default;
    Ten3(int a1, int a2, int a3)
        : n1(a1), n2(a2), n3(a3), a(static_cast<std::size_t>(a1) * a2 * a3, 0.0) {}
    double &operator()(int i, int j, int k) {
        return a[(static_cast<std::size_t>(i) * n2 + j) * n3 + k];
    }
    double operator()(int i, int j, int k) const {
        return a[(static_cast<std::size_t>(i) * n2 + j) * n3 + k];
    }
};

struct Ten4 {
    int n1 = 0, n2 = 0, n3 = 0, n4 = 0;
    Vec a;
    Ten4() = default;
    Ten4(int a1, int a2, int a3, int a4)
        : n1(a1), n2(a2), n3(a3), n4(a4),
          a(static_cast<std::size_t>(a1) * a2 * a3 * a4, 0.0) {}
    double &operator()(int i, int j, int k, int l) {
        return a[((static_cast<std::size_t>(i) * n2 + j) * n3 + k) * n4 + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return a[((static_cast<std::size_t>(i) * n2 + j) * n3 + k) * n4 + l];
    }
};

inline double scalar_value(double x) { return x; }
inline double scalar_value(const Jet &x) { return x.value(); }

// Lower Cholesky factor of a SPD matrix (row-major n x n). Returns false if a
// pivot is non-positive.
template <class T>
bool cholesky_lower(int n, const T *g, T *L) {
    for (int i = 0; i < n * n; ++i) L[i] = g[i] * 0.0; // zero of correct jet dim
    for (int j = 0; j < n; ++j) {
        T s = g[j * n + j];
        for (int k = 0; k < j; ++k) s -= L[j * n + k] * L[j * n + k];
        if (scalar_value(s) <= 0.0) return false;
        using std::sqrt;
        L[j * n + j] = sqrt(s);
        for (int i = j + 1; i < n; ++i) {
            T t = g[i * n + j];
            for (int k = 0; k < j; ++k) t -= L[i * n + k] * L[j * n + k];
            L[i * n + j] = t / L[j * n + j];
        }
    }
    return true;
}

// x = L^{-1} b for lower-triangular L.
template <class T>
void solve_lower(int n, const T *L, const T *b, T *x) {
    for (int i = 0; i < n; ++i) {
        T s = b[i];
        for (int k = 0; k < i; ++k) s -= L[i * n + k] * x[k];
        x[i] = s / L[i * n + i];
    }
}

// x = L^{-T} b for lower-triangular L.
template <class T>
void solve_lower_transposed(int n, const T *L, const T *b, T *x) {
    for (int i = n - 1; i >= 0; --i) {
        T s = b[i];
        for (int k = i + 1; k < n; ++k) s -= L[k * n + i] * x[k];
        x[i] = s / L[i * n + i];
    }
}

// inv = g^{-1} via Cholesky; throws if g is not SPD.
template <class T>
void invert_spd(int n, const T *g, T *inv, const char *what = "matrix") {
    std::vector<T> L(static_cast<std::size_t>(n) * n, g[0] * 0.0);
    if (!cholesky_lower(n, g, L.data()))
        throw std::runtime_error(std::string(what) + " is not positive definite");
    std::vector<T> e(n, g[0] * 0.0), y(n, g[0] * 0.0), col(n, g[0] * 0.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) e[i] = g[0] * 0.0;
        e[j] = g[0] * 0.0 + 1.0;
        solve_lower(n, L.data(), e.data(), y.data());
        solve_lower_transposed(n, L.data(), y.data(), col.data());
        for (int i = 0; i < n; ++i) inv[i * n + j] = col[i];
    }
}

inline bool is_spd(const Mat &g) {
    Mat L(g.rows, g.rows);
    return cholesky_lower(g.rows, g.a.data(), L.a.data());
}

inline Mat spd_inverse(const Mat &g, const char *what = "matrix") {
    Mat inv(g.rows, g.rows);
    invert_spd(g.rows, g.a.data(), inv.a.data(), what);
    return inv;
}

inline Mat mat_mul(const Mat &a, const Mat &b) {
    Mat c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double v = a(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += v * b(k, j);
        }
    return c;
}

inline Mat mat_transpose(const Mat &a) {
    Mat t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

inline Vec mat_vec(const Mat &a, std::span<const double> x) {
    Vec y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) y[i] += a(i, j) * x[j];
    return y;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double bilinear(const Mat &g, std::span<const double> x, std::span<const double> y) {
    double s = 0;
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) s += x[i] * g(i, j) * y[j];
    return s;
}

inline double max_abs(std::span<const double> v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double frobenius_norm(const Mat &m) {
    double s = 0;
    for (double x : m.a) s += x * x;
    return std::sqrt(s);
}

} // namespace tsb
