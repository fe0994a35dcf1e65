#include "tsb/curvature.hpp"

namespace tsb {

CurvatureData curvature_from_coeffs(const ConnectionCoeffs &c, const Mat &g_inv,
                                    std::span<const double> x) {
    const int d = c.d;
    CurvatureData out;
    out.point.assign(x.begin(), x.end());
    out.christoffels = c.gamma;
    out.torsion = Ten3(d, d, d);
    out.riemann = Ten4(d, d, d, d);
    out.ricci = Mat(d, d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out.torsion(k, i, j) = c.gamma(k, i, j) - c.gamma(k, j, i);
    // R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
    //           + Gamma^l_ia Gamma^a_jk - Gamma^l_ja Gamma^a_ik
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double s = c.dgamma(l, j, k, i) - c.dgamma(l, i, k, j);
                    for (int a = 0; a < d; ++a)
                        s += c.gamma(l, i, a) * c.gamma(a, j, k) -
                             c.gamma(l, j, a) * c.gamma(a, i, k);
                    out.riemann(l, i, j, k) = s;
                }
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double s = 0;
            for (int i = 0; i < d; ++i) s += out.riemann(i, i, j, k);
            out.ricci(j, k) = s;
        }
    double scal = 0;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) scal += g_inv(j, k) * out.ricci(j, k);
    out.scalar = scal;
    return out;
}

CurvatureData curvature(const ChartedManifold &M, const ConnectionSpec &spec,
                        std::span<const double> x) {
    ConnectionCoeffs c = connection_coeffs(M, spec, x);
    Mat g = base_metric_at(M, spec, x);
    return curvature_from_coeffs(c, spd_inverse(g, "base metric"), x);
}

double sectional_curvature(const ChartedManifold &M, const ConnectionSpec &spec,
                           std::span<const double> x, std::span<const double> X,
                           std::span<const double> Y) {
    const int d = M.dim();
    CurvatureData cd = curvature(M, spec, x);
    Mat g = base_metric_at(M, spec, x);
    const double xx = bilinear(g, X, X), yy = bilinear(g, Y, Y), xy = bilinear(g, X, Y);
    const double denom = xx * yy - xy * xy;
    if (denom <= 1e-12 * std::max(1.0, xx * yy))
        throw GeometryError("degenerate plane for sectional curvature at " + format_point(x));
    // <R(X,Y)Y, X>
    double num = 0;
    for (int l = 0; l < d; ++l) {
        double rl = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    rl += cd.riemann(l, i, j, k) * X[i] * Y[j] * Y[k];
        for (int m = 0; m < d; ++m) num += g(l, m) * rl * X[m];
    }
    return num / denom;
}

MetricJet2 fd_metric_jets(const MetricGradField &field, std::span<const double> z,
                          double step) {
    MetricGrad center = field(z);
    const int d = center.d;
    MetricJet2 out;
    out.d = d;
    out.g = center.g;
    out.dg = center.dg;
    out.d2g = Ten4(d, d, d, d);
    Vec zp(z.begin(), z.end());
    for (int l = 0; l < d; ++l) {
        zp[l] = z[l] + step;
        MetricGrad plus = field(zp);
        zp[l] = z[l] - step;
        MetricGrad minus = field(zp);
        zp[l] = z[l];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    out.d2g(i, j, k, l) +=
                        (plus.dg(i, j, k) - minus.dg(i, j, k)) / (2.0 * step);
    }
    // symmetrize the finite-difference layer
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = k + 1; l < d; ++l) {
                    const double s = 0.5 * (out.d2g(i, j, k, l) + out.d2g(i, j, l, k));
                    out.d2g(i, j, k, l) = out.d2g(i, j, l, k) = s;
                }
    return out;
}

CurvatureData levi_civita_curvature(const MetricJet2 &mj, std::span<const double> x) {
    ConnectionCoeffs c = levi_civita_coeffs(mj);
    return curvature_from_coeffs(c, spd_inverse(mj.g, "metric"), x);
}

double einstein_residual_of(const CurvatureData &cd, const Mat &g) {
    const int d = g.rows;
    Mat dev(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            dev(i, j) = cd.ricci(i, j) - (cd.scalar / d) * g(i, j);
    return frobenius_norm(dev) / frobenius_norm(g);
}

} // namespace tsb
