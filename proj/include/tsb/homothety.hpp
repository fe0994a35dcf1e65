// The fiberwise map h(u) = e^{-phi} t u between tangent (sphere) bundles of
// conformally related metrics: closed-form and Jacobian pushforwards,
// pullback-metric comparison against psi G, and verdicts with concrete
// witnesses for the negative cases.
#pragma once

#include <optional>

#include "tsb/sphere_bundle.hpp"

namespace tsb {

struct HomothetySide {
    ScalarExpr conformal_phi; // base metric e^{2 phi} g0, Levi-Civita connection
    ScalarExpr phi1, phi2;    // weights
    ScalarExpr radius;        // sphere-bundle radius (ignored for the TM case)

    static HomothetySide plain() {
        return {ScalarExpr::constant(0.0), ScalarExpr::constant(0.0),
                ScalarExpr::constant(0.0), ScalarExpr::constant(1.0)};
    }
};

struct HomothetySpec {
    ChartedManifold base;
    HomothetySide source, target;
    ScalarExpr scale_t = ScalarExpr::constant(1.0); // TM case; S_rM derives t = s/r
    std::optional<double> expected_psi;

    // e^{2 phi_rel} = lambda_target / lambda_source
    ScalarExpr relative_phi() const;
};

WeightedSasakiMetric side_metric(const HomothetySpec &spec, const HomothetySide &side);

// h as a coordinate map: (x, u) -> (x, hhat(x) u).
Vec map_point(const HomothetySpec &spec, std::span<const double> z, bool srm);
// Jacobian of the coordinate map applied to X (jet-evaluated scale field).
Vec pushforward_numeric(const HomothetySpec &spec, const BundlePoint &p,
                        std::span<const double> X, bool srm);
// Closed-form pushforward: X^{h'} + hhat( (X(t)/t) xi + X^v + dphi(u) theta X
//                                         - mu(X) theta grad phi ).
Vec pushforward_closed_form(const HomothetySpec &spec, const BundlePoint &p,
                            std::span<const double> X, bool srm);

enum class Verdict { Homothety, Isometry, NotHomothety };
const char *verdict_name(Verdict v);

struct Witness {
    Vec z;
    int i = 0, j = 0;
    double measured = 0, expected = 0, deviation = 0;
};

struct VerdictReport {
    Verdict verdict = Verdict::NotHomothety;
    double fitted_psi = 0;
    double psi_spread = 0;         // relative spread of the vertical ratios
    double max_rel_deviation = 0;
    std::optional<Witness> witness;
    int samples = 0;
    bool dim2_raw_only = false;    // sphere-bundle verdict with dim M = 2
};

struct SampleParams {
    int count = 100;
    std::uint64_t seed = 0;
    double fiber_min = 0.4;
    double fiber_max = 1.6;
    double margin = 0.05;
};

BundlePoint sample_bundle_point(const ChartedManifold &M, const ConnectionSpec &conn,
                                const CounterRng &rng, std::uint64_t counter,
                                double fiber_min, double fiber_max, double margin);

VerdictReport tm_homothety_verdict(const HomothetySpec &spec, const SampleParams &sp,
                                   double tol = 1e-8);
VerdictReport srm_homothety_verdict(const HomothetySpec &spec, const SampleParams &sp,
                                    double tol = 1e-8);

// Scaling map between space-form charts: F(x, u) = (R/R1)(x, u) pulls the
// Sasaki metric of M_R back to g^{f,f} on S_sM_{R1} with f = R^2/R1^2 and
// s = R1 r / R. Returns the max relative deviation over samples.
struct SpaceformCheck {
    double max_deviation = 0;
    double f = 0, s = 0;
    int samples = 0;
};
SpaceformCheck spaceform_isometry_check(int dim, double R1, double R, double r,
                                        const SampleParams &sp);

} // namespace tsb
