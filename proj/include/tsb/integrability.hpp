// Integrability diagnostics on TM: the Nijenhuis tensor of the weighted
// almost complex structure, closedness of the fundamental 2-form, the
// d(mu) = omega^S + mu o T identity and the torsion of the direct-sum
// connection on TTM.
#pragma once

#include "tsb/bundle.hpp"

namespace tsb {

// N(X,Y) for constant-coefficient coordinate extensions of X, Y.
Vec nijenhuis(const WeightedSasakiMetric &W, const BundlePoint &p,
              std::span<const double> X, std::span<const double> Y);

// max |N(d_A, d_B)| over all coordinate pairs at p.
double nijenhuis_max(const WeightedSasakiMetric &W, const BundlePoint &p);

// max coefficient of d(omega^G) at p.
double symplectic_residual(const WeightedSasakiMetric &W, const BundlePoint &p);

// max coefficient of d(mu) - omega^S - mu o T at p; mu o T pairs the base
// projections of both slots: (X,Y) -> g(T(dpi X, dpi Y), u).
double dmu_identity_residual(const WeightedSasakiMetric &W, const BundlePoint &p);

// Torsion of the direct-sum pullback connection evaluated on horizontal
// lifts, compared against lift(T(d_i,d_j)) + vertical(R(d_i,d_j)u).
// Returns the max component deviation over all (i,j).
double product_torsion_residual(const ChartedManifold &M, const ConnectionSpec &spec,
                                const BundlePoint &p);

// Scalar curvature of the 2m-dimensional metric G at p (finite-difference
// completion of the metric Hessian with the given step).
double tm_scalar_curvature(const WeightedSasakiMetric &W, const BundlePoint &p,
                           double step = 1e-4);

} // namespace tsb
