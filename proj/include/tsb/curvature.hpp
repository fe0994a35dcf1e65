// Brute-force curvature of metric fields: Christoffel symbols, Riemann,
// Ricci, scalar and torsion, following the conventions
//   T(X,Y) = nabla_X Y - nabla_Y X - [X,Y]
//   R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]
// with riemann(l,i,j,k) the dx^l component of R(d_i, d_j) d_k.
#pragma once

#include <functional>

#include "tsb/connection.hpp"

namespace tsb {

struct CurvatureData {
    Vec point;
    Ten3 christoffels;  // (k,i,j)
    Ten4 riemann;       // (l,i,j,k)
    Mat ricci;          // ricci(j,k) = riemann(i,i,j,k) summed over i
    double scalar = 0;
    Ten3 torsion;       // (k,i,j), antisymmetric in (i,j)
};

CurvatureData curvature_from_coeffs(const ConnectionCoeffs &c, const Mat &g_inv,
                                    std::span<const double> x);

// Curvature of the connection described by spec on the chart metric.
CurvatureData curvature(const ChartedManifold &M, const ConnectionSpec &spec,
                        std::span<const double> x);

// K = <R(X,Y)Y, X> / (|X|^2 |Y|^2 - <X,Y>^2); inner products taken in the
// connection's base metric. Throws on a degenerate plane.
double sectional_curvature(const ChartedManifold &M, const ConnectionSpec &spec,
                           std::span<const double> x, std::span<const double> X,
                           std::span<const double> Y);

// A metric field given with analytic first derivatives; the Hessian of the
// entries is completed by one central finite difference of the gradient.
struct MetricGrad {
    int d = 0;
    Mat g;
    Ten3 dg;
};
using MetricGradField = std::function<MetricGrad(std::span<const double>)>;

MetricJet2 fd_metric_jets(const MetricGradField &field, std::span<const double> z,
                          double step = 1e-4);

// Levi-Civita curvature of an arbitrary metric 2-jet.
CurvatureData levi_civita_curvature(const MetricJet2 &mj, std::span<const double> x);

// ||Ric - (Scal/d) g||_F / ||g||_F
double einstein_residual_of(const CurvatureData &cd, const Mat &g);

} // namespace tsb
