#include "tsb/integrability.hpp"

namespace tsb {

Vec nijenhuis(const WeightedSasakiMetric &W, const BundlePoint &p,
              std::span<const double> X, std::span<const double> Y) {
    Vec z = pack_point(p);
    MatGrad I = tm_complex_structure_grad(W, z);
    const int d = I.value.rows;
    // For constant fields: N(X,Y) = [IX,IY] - I[IX,Y] - I[X,IY] - [X,Y] with
    // [A,B]^k = A^C d_C B^k - B^C d_C A^k. Assemble per coordinate pair and
    // contract with X, Y.
    Vec out(d, 0.0);
    for (int A = 0; A < d; ++A)
        for (int B = 0; B < d; ++B) {
            const double w = X[A] * Y[B];
            if (w == 0.0) continue;
            for (int k = 0; k < d; ++k) {
                double s = 0;
                for (int C = 0; C < d; ++C)
                    s += I.value(C, A) * I.grad(k, B, C) - I.value(C, B) * I.grad(k, A, C) +
                         I.value(k, C) * I.grad(C, A, B) - I.value(k, C) * I.grad(C, B, A);
                out[k] += w * s;
            }
        }
    return out;
}

double nijenhuis_max(const WeightedSasakiMetric &W, const BundlePoint &p) {
    Vec z = pack_point(p);
    MatGrad I = tm_complex_structure_grad(W, z);
    const int d = I.value.rows;
    double worst = 0;
    for (int A = 0; A < d; ++A)
        for (int B = A + 1; B < d; ++B)
            for (int k = 0; k < d; ++k) {
                double s = 0;
                for (int C = 0; C < d; ++C)
                    s += I.value(C, A) * I.grad(k, B, C) - I.value(C, B) * I.grad(k, A, C) +
                         I.value(k, C) * I.grad(C, A, B) - I.value(k, C) * I.grad(C, B, A);
                worst = std::max(worst, std::abs(s));
            }
    return worst;
}

double symplectic_residual(const WeightedSasakiMetric &W, const BundlePoint &p) {
    Vec z = pack_point(p);
    Ten3 dw = exterior_derivative(tm_fundamental_form_grad(W, z, false));
    double worst = 0;
    for (int A = 0; A < dw.n1; ++A)
        for (int B = A + 1; B < dw.n2; ++B)
            for (int C = B + 1; C < dw.n3; ++C)
                worst = std::max(worst, std::abs(dw(A, B, C)));
    return worst;
}

double dmu_identity_residual(const WeightedSasakiMetric &W, const BundlePoint &p) {
    Vec z = pack_point(p);
    const int m = p.m(), d = 2 * m;
    Mat dmu = exterior_derivative(tm_mu_grad(W, z));
    Mat omega_s = tm_fundamental_form_grad(W, z, true).value;
    // mu o T: only the x-x block is nonzero
    ConnectionCoeffs cc = connection_coeffs(W.M, W.conn, p.x);
    Mat g = base_metric_at(W.M, W.conn, p.x);
    Mat mut(d, d);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0;
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    s += (cc.gamma(k, i, j) - cc.gamma(k, j, i)) * g(k, l) * p.u[l];
            mut(i, j) = s;
        }
    double worst = 0;
    for (int A = 0; A < d; ++A)
        for (int B = 0; B < d; ++B)
            worst = std::max(worst, std::abs(dmu(A, B) - omega_s(A, B) - mut(A, B)));
    return worst;
}

double product_torsion_residual(const ChartedManifold &M, const ConnectionSpec &spec,
                                const BundlePoint &p) {
    const int m = M.dim(), d = 2 * m;
    ConnectionCoeffs cc = connection_coeffs(M, spec, p.x);
    CurvatureData cd =
        curvature_from_coeffs(cc, spd_inverse(base_metric_at(M, spec, p.x), "base"), p.x);
    // N and its derivatives over the 2m chart
    Mat N(m, m);
    Ten3 dNx(m, m, m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i) {
            double s = 0;
            for (int j = 0; j < m; ++j) s += cc.gamma(k, i, j) * p.u[j];
            N(k, i) = s;
            for (int l = 0; l < m; ++l) {
                double t = 0;
                for (int j = 0; j < m; ++j) t += cc.dgamma(k, i, j, l) * p.u[j];
                dNx(k, i, l) = t;
            }
        }
    auto dN_dir = [&](int k, int j, int D) {
        return D < m ? dNx(k, j, D) : cc.gamma(k, j, D - m);
    };
    double worst = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            // lhs = nabla*_{delta_i} delta_j - nabla*_{delta_j} delta_i - [delta_i, delta_j]
            Vec lhs(d, 0.0);
            for (int k = 0; k < m; ++k) {
                const double tk = cc.gamma(k, i, j) - cc.gamma(k, j, i);
                lhs[k] += tk;                       // horizontal components of T^k delta_k
                for (int a = 0; a < m; ++a) lhs[m + a] -= N(a, k) * tk;
            }
            for (int k = 0; k < m; ++k) {
                // [delta_i, delta_j]^{m+k} = -sum_D (delta_i^D dN(k,j,D) - delta_j^D dN(k,i,D))
                double br = 0;
                br -= dNx(k, j, i) - dNx(k, i, j);
                for (int a = 0; a < m; ++a)
                    br += N(a, i) * dN_dir(k, j, m + a) - N(a, j) * dN_dir(k, i, m + a);
                lhs[m + k] -= br;
            }
            // rhs = lift(T(d_i, d_j)) + vertical(R(d_i, d_j) u)
            Vec rhs(d, 0.0);
            for (int k = 0; k < m; ++k) {
                const double tk = cd.torsion(k, i, j);
                rhs[k] += tk;
                for (int a = 0; a < m; ++a) rhs[m + a] -= N(a, k) * tk;
                double ru = 0;
                for (int l = 0; l < m; ++l) ru += cd.riemann(k, i, j, l) * p.u[l];
                rhs[m + k] += ru;
            }
            for (int A = 0; A < d; ++A) worst = std::max(worst, std::abs(lhs[A] - rhs[A]));
        }
    return worst;
}

double tm_scalar_curvature(const WeightedSasakiMetric &W, const BundlePoint &p, double step) {
    Vec z = pack_point(p);
    MetricGradField field = [&W](std::span<const double> zz) {
        return tm_metric_grad(W, zz);
    };
    MetricJet2 mj = fd_metric_jets(field, z, step);
    return levi_civita_curvature(mj, z).scalar;
}

} // namespace tsb
