#include "tsb/bundle.hpp"

namespace tsb {

Vec pack_point(const BundlePoint &p) {
    Vec z(p.x);
    z.insert(z.end(), p.u.begin(), p.u.end());
    return z;
}

BundlePoint unpack_point(std::span<const double> z) {
    const int m = static_cast<int>(z.size()) / 2;
    BundlePoint p;
    p.x.assign(z.begin(), z.begin() + m);
    p.u.assign(z.begin() + m, z.end());
    return p;
}

namespace {

// Everything at (x, u) that the bundle tensors are assembled from.
struct TmPointData {
    int m = 0;
    Mat g;        // base metric (the one the connection preserves)
    Ten3 dg;      // d_l g_ij
    Ten3 gamma;
    Ten4 dgamma;
    double f1 = 1, f2 = 1;
    Vec df1, df2;          // gradients w.r.t. x
    double epsi = 1;       // e^{psi}, psi = phi2 - phi1
    Vec dpsi;
    Mat N;                 // N(k,i) = gamma(k,i,j) u^j
    Ten3 dNx;              // dNx(k,i,l) = d_{x^l} N(k,i)
};

TmPointData tm_point_data(const WeightedSasakiMetric &W, std::span<const double> x,
                          std::span<const double> u) {
    const int m = W.M.dim();
    TmPointData D;
    D.m = m;
    MetricJet2 mj = base_metric_jets(W.M, W.conn, x);
    D.g = mj.g;
    D.dg = mj.dg;
    ConnectionCoeffs cc = connection_coeffs(W.M, W.conn, x);
    D.gamma = std::move(cc.gamma);
    D.dgamma = std::move(cc.dgamma);

    JetValue p1 = W.phi1.eval_jet(x), p2 = W.phi2.eval_jet(x);
    D.f1 = std::exp(2.0 * p1.value);
    D.f2 = std::exp(2.0 * p2.value);
    D.df1.resize(m);
    D.df2.resize(m);
    D.dpsi.resize(m);
    for (int i = 0; i < m; ++i) {
        D.df1[i] = 2.0 * p1.gradient[i] * D.f1;
        D.df2[i] = 2.0 * p2.gradient[i] * D.f2;
        D.dpsi[i] = p2.gradient[i] - p1.gradient[i];
    }
    D.epsi = std::exp(p2.value - p1.value);

    D.N = Mat(m, m);
    D.dNx = Ten3(m, m, m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i) {
            double s = 0;
            for (int j = 0; j < m; ++j) s += D.gamma(k, i, j) * u[j];
            D.N(k, i) = s;
            for (int l = 0; l < m; ++l) {
                double t = 0;
                for (int j = 0; j < m; ++j) t += D.dgamma(k, i, j, l) * u[j];
                D.dNx(k, i, l) = t;
            }
        }
    return D;
}

// d_C N(k,i) over the 2m chart coordinates.
double dN(const TmPointData &D, int k, int i, int C) {
    return C < D.m ? D.dNx(k, i, C) : D.gamma(k, i, C - D.m);
}

Mat assemble_metric(const TmPointData &D, double f1, double f2) {
    const int m = D.m;
    Mat G(2 * m, 2 * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double nn = 0, ng = 0, gn = 0;
            for (int a = 0; a < m; ++a) {
                gn += D.g(i, a) * D.N(a, j);
                ng += D.N(a, i) * D.g(a, j);
                for (int b = 0; b < m; ++b) nn += D.N(a, i) * D.g(a, b) * D.N(b, j);
            }
            G(i, j) = f1 * D.g(i, j) + f2 * nn;
            G(i, m + j) = f2 * ng;
            G(m + i, j) = f2 * gn;
            G(m + i, m + j) = f2 * D.g(i, j);
        }
    return G;
}

struct WeightChoice {
    double f1, f2;
    const Vec *df1, *df2;
};

MetricGrad metric_grad_impl(const TmPointData &D, const WeightChoice &w) {
    const int m = D.m, d = 2 * m;
    MetricGrad out;
    out.d = d;
    out.g = assemble_metric(D, w.f1, w.f2);
    out.dg = Ten3(d, d, d);
    const Vec zero(m, 0.0);
    const Vec &df1 = w.df1 ? *w.df1 : zero;
    const Vec &df2 = w.df2 ? *w.df2 : zero;
    for (int C = 0; C < d; ++C) {
        const bool xdir = C < m;
        const int l = xdir ? C : C - m;
        // derivatives of the ingredients in direction C
        // dgC(i,j), dNC(k,i), df1C, df2C
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double dgij = xdir ? D.dg(i, j, l) : 0.0;
                double nn = 0, dnn = 0, ng = 0, dng = 0, gn = 0, dgn = 0;
                for (int a = 0; a < m; ++a) {
                    const double dNa_i = dN(D, a, i, C), dNa_j = dN(D, a, j, C);
                    const double dga_j = xdir ? D.dg(a, j, l) : 0.0;
                    const double dgi_a = xdir ? D.dg(i, a, l) : 0.0;
                    ng += D.N(a, i) * D.g(a, j);
                    dng += dNa_i * D.g(a, j) + D.N(a, i) * dga_j;
                    gn += D.g(i, a) * D.N(a, j);
                    dgn += dgi_a * D.N(a, j) + D.g(i, a) * dNa_j;
                    for (int b = 0; b < m; ++b) {
                        const double dgab = xdir ? D.dg(a, b, l) : 0.0;
                        nn += D.N(a, i) * D.g(a, b) * D.N(b, j);
                        dnn += dNa_i * D.g(a, b) * D.N(b, j) +
                               D.N(a, i) * dgab * D.N(b, j) +
                               D.N(a, i) * D.g(a, b) * dN(D, b, j, C);
                    }
                }
                const double df1C = xdir ? df1[l] : 0.0;
                const double df2C = xdir ? df2[l] : 0.0;
                out.dg(i, j, C) = df1C * D.g(i, j) + w.f1 * dgij + df2C * nn + w.f2 * dnn;
                out.dg(i, m + j, C) = df2C * ng + w.f2 * dng;
                out.dg(m + i, j, C) = df2C * gn + w.f2 * dgn;
                out.dg(m + i, m + j, C) = df2C * D.g(i, j) + w.f2 * dgij;
            }
    }
    return out;
}

// I = [[ c1 N, c1 I ], [ -c1 N^2 - c2 I, -c1 N ]] with c1 = e^psi, c2 = e^-psi
// (c1 = c2 = 1 gives I^S).
MatGrad complex_structure_impl(const TmPointData &D, bool weighted) {
    const int m = D.m, d = 2 * m;
    const double c1 = weighted ? D.epsi : 1.0;
    const double c2 = weighted ? 1.0 / D.epsi : 1.0;
    MatGrad out;
    out.value = Mat(d, d);
    out.grad = Ten3(d, d, d);
    Mat N2(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0;
            for (int a = 0; a < m; ++a) s += D.N(i, a) * D.N(a, j);
            N2(i, j) = s;
        }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            out.value(i, j) = c1 * D.N(i, j);
            out.value(i, m + j) = (i == j) ? c1 : 0.0;
            out.value(m + i, j) = -c1 * N2(i, j) - ((i == j) ? c2 : 0.0);
            out.value(m + i, m + j) = -c1 * D.N(i, j);
        }
    for (int C = 0; C < d; ++C) {
        const bool xdir = C < m;
        const double dc1 = (weighted && xdir) ? c1 * D.dpsi[C] : 0.0;
        const double dc2 = (weighted && xdir) ? -c2 * D.dpsi[C] : 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const double dNij = dN(D, i, j, C);
                double dN2 = 0;
                for (int a = 0; a < m; ++a)
                    dN2 += dN(D, i, a, C) * D.N(a, j) + D.N(i, a) * dN(D, a, j, C);
                out.grad(i, j, C) = dc1 * D.N(i, j) + c1 * dNij;
                out.grad(i, m + j, C) = (i == j) ? dc1 : 0.0;
                out.grad(m + i, j, C) = -dc1 * N2(i, j) - c1 * dN2 - ((i == j) ? dc2 : 0.0);
                out.grad(m + i, m + j, C) = -dc1 * D.N(i, j) - c1 * dNij;
            }
    }
    return out;
}

} // namespace

SplittingFrame splitting_frame(const ChartedManifold &M, const ConnectionSpec &spec,
                               const BundlePoint &p) {
    WeightedSasakiMetric W = WeightedSasakiMetric::sasaki(M, spec);
    TmPointData D = tm_point_data(W, p.x, p.u);
    const int m = D.m, d = 2 * m;
    SplittingFrame F;
    F.m = m;
    F.horizontal = Mat(d, m);
    F.vertical = Mat(d, m);
    F.theta = Mat(d, d);
    F.theta_t = Mat(d, d);
    F.proj_h = Mat(d, d);
    F.proj_v = Mat(d, d);
    F.xi.assign(d, 0.0);
    F.spray.assign(d, 0.0);
    for (int i = 0; i < m; ++i) {
        F.horizontal(i, i) = 1.0;
        F.vertical(m + i, i) = 1.0;
        for (int k = 0; k < m; ++k) F.horizontal(m + k, i) = -D.N(k, i);
        F.xi[m + i] = p.u[i];
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            // theta: (a,b) -> (0, a)
            F.theta(m + i, j) = (i == j) ? 1.0 : 0.0;
            // theta_t: (a,b) -> (Na + b, -N(Na + b))
            F.theta_t(i, j) = D.N(i, j);
            F.theta_t(i, m + j) = (i == j) ? 1.0 : 0.0;
            double nn = 0;
            for (int a = 0; a < m; ++a) nn += D.N(i, a) * D.N(a, j);
            F.theta_t(m + i, j) = -nn;
            F.theta_t(m + i, m + j) = -D.N(i, j);
            // projectors
            F.proj_h(i, j) = (i == j) ? 1.0 : 0.0;
            F.proj_h(m + i, j) = -D.N(i, j);
            F.proj_v(m + i, j) = D.N(i, j);
            F.proj_v(m + i, m + j) = (i == j) ? 1.0 : 0.0;
        }
    // spray = theta_t xi = (u, -Nu)
    for (int i = 0; i < m; ++i) {
        F.spray[i] = p.u[i];
        double s = 0;
        for (int a = 0; a < m; ++a) s += D.N(i, a) * p.u[a];
        F.spray[m + i] = -s;
    }
    return F;
}

MetricGrad tm_metric_grad(const WeightedSasakiMetric &W, std::span<const double> z) {
    BundlePoint p = unpack_point(z);
    TmPointData D = tm_point_data(W, p.x, p.u);
    WeightChoice w{D.f1, D.f2, &D.df1, &D.df2};
    return metric_grad_impl(D, w);
}

Mat tm_metric_matrix(const WeightedSasakiMetric &W, const BundlePoint &p) {
    TmPointData D = tm_point_data(W, p.x, p.u);
    Mat G = assemble_metric(D, D.f1, D.f2);
    if (!is_spd(G))
        throw GeometryError("weighted Sasaki metric not positive definite at " +
                            format_point(pack_point(p)));
    return G;
}

MatGrad tm_complex_structure_grad(const WeightedSasakiMetric &W, std::span<const double> z) {
    BundlePoint p = unpack_point(z);
    TmPointData D = tm_point_data(W, p.x, p.u);
    return complex_structure_impl(D, true);
}

MatGrad tm_fundamental_form_grad(const WeightedSasakiMetric &W, std::span<const double> z,
                                 bool sasaki_normalized) {
    BundlePoint p = unpack_point(z);
    TmPointData D = tm_point_data(W, p.x, p.u);
    MatGrad I = complex_structure_impl(D, !sasaki_normalized);
    MetricGrad G;
    if (sasaki_normalized) {
        WeightChoice w{1.0, 1.0, nullptr, nullptr};
        G = metric_grad_impl(D, w);
    } else {
        WeightChoice w{D.f1, D.f2, &D.df1, &D.df2};
        G = metric_grad_impl(D, w);
    }
    const int d = 2 * D.m;
    MatGrad out;
    out.value = Mat(d, d);
    out.grad = Ten3(d, d, d);
    // omega_AB = I^C_A G_CB
    for (int A = 0; A < d; ++A)
        for (int B = 0; B < d; ++B) {
            double s = 0;
            for (int C = 0; C < d; ++C) s += I.value(C, A) * G.g(C, B);
            out.value(A, B) = s;
            for (int E = 0; E < d; ++E) {
                double t = 0;
                for (int C = 0; C < d; ++C)
                    t += I.grad(C, A, E) * G.g(C, B) + I.value(C, A) * G.dg(C, B, E);
                out.grad(A, B, E) = t;
            }
        }
    return out;
}

CovGrad tm_mu_grad(const WeightedSasakiMetric &W, std::span<const double> z) {
    BundlePoint p = unpack_point(z);
    TmPointData D = tm_point_data(W, p.x, p.u);
    const int m = D.m, d = 2 * m;
    CovGrad out;
    out.value.assign(d, 0.0);
    out.grad = Mat(d, d);
    for (int i = 0; i < m; ++i) {
        double s = 0;
        for (int j = 0; j < m; ++j) s += D.g(i, j) * p.u[j];
        out.value[i] = s;
        for (int l = 0; l < m; ++l) {
            double t = 0;
            for (int j = 0; j < m; ++j) t += D.dg(i, j, l) * p.u[j];
            out.grad(i, l) = t;            // x-derivative
            out.grad(i, m + l) = D.g(i, l); // u-derivative
        }
    }
    return out;
}

CovGrad tm_eta_grad(const WeightedSasakiMetric &W, std::span<const double> z) {
    BundlePoint p = unpack_point(z);
    TmPointData D = tm_point_data(W, p.x, p.u);
    const int m = D.m, d = 2 * m;
    // eta(d_A) = g(vertical fiber part of d_A, u):
    //   eta_{x_i} = g_ab N^a_i u^b,   eta_{u_i} = g_ib u^b
    CovGrad out;
    out.value.assign(d, 0.0);
    out.grad = Mat(d, d);
    for (int i = 0; i < m; ++i) {
        double sx = 0, su = 0;
        for (int b = 0; b < m; ++b) {
            su += D.g(i, b) * p.u[b];
            for (int a = 0; a < m; ++a) sx += D.g(a, b) * D.N(a, i) * p.u[b];
        }
        out.value[i] = sx;
        out.value[m + i] = su;
        for (int C = 0; C < d; ++C) {
            const bool xdir = C < m;
            const int l = xdir ? C : C - m;
            double dx = 0, du = 0;
            for (int b = 0; b < m; ++b) {
                const double dgib = xdir ? D.dg(i, b, l) : 0.0;
                du += dgib * p.u[b] + ((!xdir && b == l) ? D.g(i, b) : 0.0);
                for (int a = 0; a < m; ++a) {
                    const double dgab = xdir ? D.dg(a, b, l) : 0.0;
                    dx += dgab * D.N(a, i) * p.u[b] + D.g(a, b) * dN(D, a, i, C) * p.u[b] +
                          ((!xdir && b == l) ? D.g(a, b) * D.N(a, i) : 0.0);
                }
            }
            out.grad(i, C) = dx;
            out.grad(m + i, C) = du;
        }
    }
    return out;
}

CanonicalForms canonical_forms(const WeightedSasakiMetric &W, const BundlePoint &p) {
    Vec z = pack_point(p);
    CanonicalForms F;
    F.mu = tm_mu_grad(W, z).value;
    F.eta = tm_eta_grad(W, z).value;
    F.I_g = tm_complex_structure_grad(W, z).value;
    TmPointData D = tm_point_data(W, p.x, p.u);
    F.I_s = complex_structure_impl(D, false).value;
    F.omega_g = tm_fundamental_form_grad(W, z, false).value;
    F.omega_s = tm_fundamental_form_grad(W, z, true).value;
    return F;
}

Mat exterior_derivative(const CovGrad &form) {
    const int d = static_cast<int>(form.value.size());
    Mat out(d, d);
    for (int A = 0; A < d; ++A)
        for (int B = 0; B < d; ++B) out(A, B) = form.grad(B, A) - form.grad(A, B);
    return out;
}

Ten3 exterior_derivative(const MatGrad &form) {
    const int d = form.value.rows;
    Ten3 out(d, d, d);
    for (int A = 0; A < d; ++A)
        for (int B = 0; B < d; ++B)
            for (int C = 0; C < d; ++C)
                out(A, B, C) = form.grad(B, C, A) - form.grad(A, C, B) + form.grad(A, B, C);
    return out;
}

} // namespace tsb
