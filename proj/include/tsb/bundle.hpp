// Induced geometry of the tangent manifold TM over a chart: coordinates
// (x, u), the horizontal/vertical splitting of a metric connection, mirror
// maps, canonical vector field and 1-forms, weighted Sasaki metrics and the
// compatible almost complex structure.
//
// Coordinate conventions, with N^k_i = Gamma^k_ij u^j:
//   vertical part of (a, b) has fiber components b + N a
//   horizontal lift of a is (a, -N a)
#pragma once

#include "tsb/curvature.hpp"

namespace tsb {

struct BundlePoint {
    Vec x, u;
    int m() const { return static_cast<int>(x.size()); }
};

Vec pack_point(const BundlePoint &p);
BundlePoint unpack_point(std::span<const double> z);

struct SplittingFrame {
    int m = 0;
    Mat horizontal;  // 2m x m, columns are the horizontal lifts delta_i
    Mat vertical;    // 2m x m, columns are d_{u^i}
    Mat theta;       // mirror H -> V, kills V
    Mat theta_t;     // mirror V -> H, kills H
    Mat proj_h, proj_v;
    Vec xi;          // canonical vertical field at (x,u)
    Vec spray;       // theta_t xi
};

SplittingFrame splitting_frame(const ChartedManifold &M, const ConnectionSpec &spec,
                               const BundlePoint &p);

struct WeightedSasakiMetric {
    ChartedManifold M;
    ConnectionSpec conn;
    ScalarExpr phi1, phi2; // weights f_i = e^{2 phi_i}

    static WeightedSasakiMetric sasaki(ChartedManifold M, ConnectionSpec conn = {}) {
        return {std::move(M), std::move(conn), ScalarExpr::constant(0.0),
                ScalarExpr::constant(0.0)};
    }
};

// Matrix field on the 2m-chart with analytic first derivatives.
struct MatGrad {
    Mat value;
    Ten3 grad; // grad(A,B,C) = d_C value_AB
};

// 1-form field with analytic first derivatives.
struct CovGrad {
    Vec value;
    Mat grad; // grad(A,B) = d_B value_A
};

// Coordinate matrix of G = f1 pi*g  (+)  f2 pi*g at z = (x,u), with gradient.
MetricGrad tm_metric_grad(const WeightedSasakiMetric &W, std::span<const double> z);
// SPD-verified value only.
Mat tm_metric_matrix(const WeightedSasakiMetric &W, const BundlePoint &p);

// Almost complex structure I^G = e^psi theta_t - e^{-psi} theta, psi = phi2 - phi1.
MatGrad tm_complex_structure_grad(const WeightedSasakiMetric &W, std::span<const double> z);
// Fundamental 2-form omega(X,Y) = G(I X, Y); sasaki_normalized selects the
// f1 = f2 = 1 structure of the same connection.
MatGrad tm_fundamental_form_grad(const WeightedSasakiMetric &W, std::span<const double> z,
                                 bool sasaki_normalized);
// mu = xi-flat o theta (the Liouville-type 1-form g_ij u^j dx^i).
CovGrad tm_mu_grad(const WeightedSasakiMetric &W, std::span<const double> z);
// eta = xi-flat with respect to the Sasaki metric of the same connection.
CovGrad tm_eta_grad(const WeightedSasakiMetric &W, std::span<const double> z);

struct CanonicalForms {
    Vec eta, mu;
    Mat omega_s, omega_g;
    Mat I_s, I_g;
};

CanonicalForms canonical_forms(const WeightedSasakiMetric &W, const BundlePoint &p);

// Coordinate exterior derivative from analytic coefficient gradients.
Mat exterior_derivative(const CovGrad &form);   // (d form)_AB = d_A f_B - d_B f_A
Ten3 exterior_derivative(const MatGrad &form);  // cyclic sum for a 2-form

} // namespace tsb
