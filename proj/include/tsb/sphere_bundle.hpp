// Local charts of the tangent sphere bundle of radius r(x): the fiber is
// parametrized through the angular chart of S^{m-1} mapped by the inverse
// transpose Cholesky factor of the base metric, so |u|_g = r(x) holds by
// construction. Induced metrics, their scalar curvature, the closed-form
// space-form value and the curvature-sign radius search live here.
#pragma once

#include "tsb/bundle.hpp"

namespace tsb {

struct SphereBundleChart {
    ChartedManifold M;
    ConnectionSpec conn;   // supplies the base metric (g or e^{2 phi} g)
    ScalarExpr radius;     // r(x) > 0
    double angular_margin = 0.1; // radians kept away from the chart poles

    int m() const { return M.dim(); }
    int n() const { return M.dim() - 1; }
    int param_dim() const { return 2 * M.dim() - 1; }
};

// Embedding (x, a) -> (x, u) with u = r(x) L(x) sigma(a); first and second
// derivatives come from jet evaluation of the whole construction.
struct EmbeddingJet {
    Vec z;     // 2m
    Mat jac;   // 2m x (2m-1)
    Ten3 hess; // (2m) x (2m-1) x (2m-1)
};

Vec embed_value(const SphereBundleChart &chart, std::span<const double> q);
EmbeddingJet embed_jet(const SphereBundleChart &chart, std::span<const double> q);

// Pullback of the weighted Sasaki metric through the embedding; W must use
// the same base metric selector as the chart.
MetricGrad induced_metric_grad(const SphereBundleChart &chart,
                               const WeightedSasakiMetric &W, std::span<const double> q);
// SPD-verified value; a Cholesky failure names q (rank-deficient embedding).
Mat induced_metric(const SphereBundleChart &chart, const WeightedSasakiMetric &W,
                   std::span<const double> q);

double srm_scalar_curvature(const SphereBundleChart &chart, const WeightedSasakiMetric &W,
                            std::span<const double> q, double step = 1e-4);

// ||Ric - (Scal/(2m-1)) h||_F / ||h||_F of the induced metric.
double srm_einstein_residual(const SphereBundleChart &chart, const WeightedSasakiMetric &W,
                             std::span<const double> q, double step = 1e-4);

// Closed form for constant weights and constant radius:
//   Scal = Scal_M / f1 - (f2 / 4 f1^2) sum_{ijk} (R^xi_ijk)^2 + (n-1) n / (f2 s^2)
// with R^xi_ijk = <R(e_i,e_j) u, e_k> in a g-orthonormal frame and |u|_g = s.
double scal_formula_general(const ChartedManifold &M, const ConnectionSpec &spec,
                            double f1, double f2, double s, std::span<const double> x,
                            std::span<const double> fiber_dir);

// Space forms of curvature sign/R^2:
//   sign * n(n+1)/(f1 R^2) - (f2/4f1^2)(s^2/R^4) 2n + (n-1)n/(f2 s^2)
double scal_formula_spaceform(int sign, double R, double s, double f1, double f2, int n);

struct RadiusSearchResult {
    double s = 0;
    double value = 0;      // formula value at s
    double boundary = 0;   // refined sign-change radius when one exists
    bool had_sign_change = false;
};

// Logarithmic grid over s in [1e-4, 1e4], bisection refinement on a sign
// change; throws GeometryError when the requested sign is unreachable (which
// happens for n = 1 on negative-curvature bases: all three terms are <= 0).
RadiusSearchResult find_radius_for_sign(int sign, double R, double f1, double f2, int n,
                                        bool want_positive);

// Uniform sample in the chart parameter box (base box shrunk by `margin`
// fraction, angles kept `angular_margin` away from the poles).
Vec sample_chart_point(const SphereBundleChart &chart, const CounterRng &rng,
                       std::uint64_t counter, double margin = 0.05);

} // namespace tsb
