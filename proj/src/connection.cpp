#include "tsb/connection.hpp"

namespace tsb {

namespace {

struct InverseJet {
    Mat inv;
    Ten3 dinv; // dinv(i,j,k) = d_k (g^{-1})_ij = -(g^{-1} dg_k g^{-1})_ij
};

InverseJet inverse_with_grad(const MetricJet2 &mj) {
    const int d = mj.d;
    InverseJet out;
    out.inv = spd_inverse(mj.g, "metric");
    out.dinv = Ten3(d, d, d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        s += out.inv(i, a) * mj.dg(a, b, k) * out.inv(b, j);
                out.dinv(i, j, k) = -s;
            }
    return out;
}

} // namespace

ConnectionCoeffs levi_civita_coeffs(const MetricJet2 &mj) {
    const int d = mj.d;
    InverseJet gi = inverse_with_grad(mj);
    ConnectionCoeffs c;
    c.d = d;
    c.gamma = Ten3(d, d, d);
    c.dgamma = Ten4(d, d, d, d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0;
                for (int m = 0; m < d; ++m)
                    s += gi.inv(k, m) * (mj.dg(j, m, i) + mj.dg(i, m, j) - mj.dg(i, j, m));
                c.gamma(k, i, j) = 0.5 * s;
                for (int l = 0; l < d; ++l) {
                    double t = 0;
                    for (int m = 0; m < d; ++m) {
                        t += gi.dinv(k, m, l) * (mj.dg(j, m, i) + mj.dg(i, m, j) - mj.dg(i, j, m));
                        t += gi.inv(k, m) * (mj.d2g(j, m, i, l) + mj.d2g(i, m, j, l) -
                                             mj.d2g(i, j, m, l));
                    }
                    c.dgamma(k, i, j, l) = 0.5 * t;
                }
            }
    return c;
}

ConnectionCoeffs connection_coeffs(const ChartedManifold &M, const ConnectionSpec &spec,
                                   std::span<const double> x) {
    const int d = M.dim();
    MetricJet2 mj = M.metric_jets(x);
    ConnectionCoeffs c = levi_civita_coeffs(mj);
    InverseJet gi = inverse_with_grad(mj);

    // Conformal correction: C^k_ij = d_i(phi) delta^k_j + d_j(phi) delta^k_i
    //                               - g_ij (grad phi)^k    (all w.r.t. g)
    if (spec.conformal_phi) {
        JetValue ph = spec.conformal_phi->eval_jet(x);
        Vec gradp(d, 0.0), dgradp(d * d, 0.0); // dgradp[k*d+l] = d_l (grad phi)^k
        for (int k = 0; k < d; ++k) {
            for (int m = 0; m < d; ++m) gradp[k] += gi.inv(k, m) * ph.gradient[m];
            for (int l = 0; l < d; ++l) {
                double s = 0;
                for (int m = 0; m < d; ++m)
                    s += gi.dinv(k, m, l) * ph.gradient[m] + gi.inv(k, m) * ph.hessian[m * d + l];
                dgradp[k * d + l] = s;
            }
        }
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double add = 0;
                    if (k == j) add += ph.gradient[i];
                    if (k == i) add += ph.gradient[j];
                    add -= mj.g(i, j) * gradp[k];
                    c.gamma(k, i, j) += add;
                    for (int l = 0; l < d; ++l) {
                        double dd = 0;
                        if (k == j) dd += ph.hessian[i * d + l];
                        if (k == i) dd += ph.hessian[j * d + l];
                        dd -= mj.dg(i, j, l) * gradp[k] + mj.g(i, j) * dgradp[k * d + l];
                        c.dgamma(k, i, j, l) += dd;
                    }
                }
    }

    // Vectorial torsion: A^k_ij = g_ij (grad psi)^k - d_j(psi) delta^k_i.
    // The first term is conformally invariant, so g here may be the
    // unweighted chart metric.
    if (spec.torsion_potential) {
        JetValue ps = spec.torsion_potential->eval_jet(x);
        Vec gradp(d, 0.0), dgradp(d * d, 0.0);
        for (int k = 0; k < d; ++k) {
            for (int m = 0; m < d; ++m) gradp[k] += gi.inv(k, m) * ps.gradient[m];
            for (int l = 0; l < d; ++l) {
                double s = 0;
                for (int m = 0; m < d; ++m)
                    s += gi.dinv(k, m, l) * ps.gradient[m] + gi.inv(k, m) * ps.hessian[m * d + l];
                dgradp[k * d + l] = s;
            }
        }
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double add = mj.g(i, j) * gradp[k];
                    if (k == i) add -= ps.gradient[j];
                    c.gamma(k, i, j) += add;
                    for (int l = 0; l < d; ++l) {
                        double dd = mj.dg(i, j, l) * gradp[k] + mj.g(i, j) * dgradp[k * d + l];
                        if (k == i) dd -= ps.hessian[j * d + l];
                        c.dgamma(k, i, j, l) += dd;
                    }
                }
    }
    return c;
}

MetricJet2 base_metric_jets(const ChartedManifold &M, const ConnectionSpec &spec,
                            std::span<const double> x) {
    MetricJet2 mj = M.metric_jets(x);
    if (!spec.conformal_phi) return mj;
    const int d = mj.d;
    JetValue ph = spec.conformal_phi->eval_jet(x);
    const double lam = std::exp(2.0 * ph.value);
    // lambda g with lambda = e^{2 phi}:
    //   d(lam g)   = lam (2 phi_k g + dg)
    //   d2(lam g)  = lam (4 phi_k phi_l g + 2 phi_kl g + 2 phi_k dg_l
    //                     + 2 phi_l dg_k + d2g)
    MetricJet2 out;
    out.d = d;
    out.g = Mat(d, d);
    out.dg = Ten3(d, d, d);
    out.d2g = Ten4(d, d, d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            out.g(i, j) = lam * mj.g(i, j);
            for (int k = 0; k < d; ++k) {
                out.dg(i, j, k) = lam * (2.0 * ph.gradient[k] * mj.g(i, j) + mj.dg(i, j, k));
                for (int l = 0; l < d; ++l)
                    out.d2g(i, j, k, l) =
                        lam * (4.0 * ph.gradient[k] * ph.gradient[l] * mj.g(i, j) +
                               2.0 * ph.hessian[k * d + l] * mj.g(i, j) +
                               2.0 * ph.gradient[k] * mj.dg(i, j, l) +
                               2.0 * ph.gradient[l] * mj.dg(i, j, k) + mj.d2g(i, j, k, l));
            }
        }
    return out;
}

Mat base_metric_at(const ChartedManifold &M, const ConnectionSpec &spec,
                   std::span<const double> x) {
    Mat g = M.metric_at(x);
    if (!spec.conformal_phi) return g;
    const double lam = std::exp(2.0 * spec.conformal_phi->eval_value(x));
    for (double &v : g.a) v *= lam;
    return g;
}

Ten3 torsion_tensor(const ConnectionCoeffs &c) {
    const int d = c.d;
    Ten3 t(d, d, d);
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) t(k, i, j) = c.gamma(k, i, j) - c.gamma(k, j, i);
    return t;
}

Ten3 metric_covariant_derivative(const ConnectionCoeffs &c, const MetricJet2 &mj) {
    const int d = c.d;
    Ten3 nabla(d, d, d); // nabla(i,j,k) = (nabla_i g)_jk
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double s = mj.dg(j, k, i);
                for (int a = 0; a < d; ++a)
                    s -= c.gamma(a, i, j) * mj.g(a, k) + c.gamma(a, i, k) * mj.g(j, a);
                nabla(i, j, k) = s;
            }
    return nabla;
}

} // namespace tsb
