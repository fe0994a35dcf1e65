// Metric connections on a chart: the Levi-Civita connection of the selected
// base metric (g or e^{2 phi} g), optionally with vectorial torsion coming
// from a potential field. Coefficients carry their first derivatives so that
// curvature is available in closed form.
#pragma once

#include <optional>

#include "tsb/manifold.hpp"

namespace tsb {

struct ConnectionSpec {
    // Base metric is e^{2 conformal_phi} g; absent means g itself.
    std::optional<ScalarExpr> conformal_phi;
    // When present the connection gains the vectorial torsion d(potential) ^ 1.
    std::optional<ScalarExpr> torsion_potential;

    static ConnectionSpec levi_civita() { return {}; }
    static ConnectionSpec conformal(ScalarExpr phi) {
        ConnectionSpec c;
        c.conformal_phi = std::move(phi);
        return c;
    }
    static ConnectionSpec with_torsion(ScalarExpr potential) {
        ConnectionSpec c;
        c.torsion_potential = std::move(potential);
        return c;
    }
};

struct ConnectionCoeffs {
    int d = 0;
    Ten3 gamma;  // gamma(k,i,j)    = Gamma^k_ij
    Ten4 dgamma; // dgamma(k,i,j,l) = d_l Gamma^k_ij
};

// Levi-Civita coefficients of an arbitrary metric 2-jet.
ConnectionCoeffs levi_civita_coeffs(const MetricJet2 &mj);

// Coefficients of the connection described by spec at x, including the
// conformal correction X(phi)Y + Y(phi)X - <X,Y> grad phi and the vectorial
// torsion term <X,Y> grad psi - d psi(Y) X.
ConnectionCoeffs connection_coeffs(const ChartedManifold &M, const ConnectionSpec &spec,
                                   std::span<const double> x);

// 2-jet of the metric the connection preserves (e^{2 phi} g).
MetricJet2 base_metric_jets(const ChartedManifold &M, const ConnectionSpec &spec,
                            std::span<const double> x);
Mat base_metric_at(const ChartedManifold &M, const ConnectionSpec &spec,
                   std::span<const double> x);

// Entry evaluation of the selected base metric over an arbitrary carrier.
template <class T>
std::vector<T> base_metric_eval(const ChartedManifold &M, const ConnectionSpec &spec,
                                std::span<const T> x) {
    std::vector<T> g = M.metric_eval(x);
    if (spec.conformal_phi) {
        using detail::carrier_exp;
        T lam = carrier_exp(spec.conformal_phi->eval(x) * 2.0);
        for (T &v : g) v = v * lam;
    }
    return g;
}

// T^k_ij = Gamma^k_ij - Gamma^k_ji
Ten3 torsion_tensor(const ConnectionCoeffs &c);

// Covariant derivative of a metric under the coefficients:
// (nabla_i g)_jk = d_i g_jk - Gamma^a_ij g_ak - Gamma^a_ik g_ja.
Ten3 metric_covariant_derivative(const ConnectionCoeffs &c, const MetricJet2 &mj);

} // namespace tsb
