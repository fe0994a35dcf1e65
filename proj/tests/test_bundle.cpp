#include <doctest.h>

#include "tsb/bundle.hpp"
#include "tsb/homothety.hpp"
#include "tsb/rng.hpp"

using namespace tsb;

namespace {

const ConnectionSpec kLC = ConnectionSpec::levi_civita();

ChartedManifold sphere2() {
    return ChartedManifold::sphere_stereographic(2, 1.0, Box::cube(2, -0.5, 0.5));
}

} // namespace

TEST_SUITE("bundle") {

TEST_CASE("euclidean splitting: horizontal lifts are coordinate fields") {
    ChartedManifold M = ChartedManifold::euclidean(2, Box::cube(2, -1, 1));
    BundlePoint p{{0.3, -0.4}, {0.7, 0.2}};
    SplittingFrame F = splitting_frame(M, kLC, p);
    for (int i = 0; i < 2; ++i)
        for (int A = 0; A < 4; ++A)
            CHECK(F.horizontal(A, i) == (A == i ? 1.0 : 0.0));
    // theta maps d_{x^i} to d_{u^i}
    for (int i = 0; i < 2; ++i) {
        Vec e(4, 0.0);
        e[i] = 1.0;
        Vec te = mat_vec(F.theta, e);
        CHECK(te[2 + i] == 1.0);
        CHECK(te[i] == 0.0);
    }
}

TEST_CASE("frame identities hold on a curved base") {
    ChartedManifold M = sphere2();
    CounterRng rng(3, 0);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        BundlePoint p = sample_bundle_point(M, kLC, rng, t, 0.4, 1.6, 0.05);
        SplittingFrame F = splitting_frame(M, kLC, p);
        const int d = 4;
        // theta^2 = 0, theta_t theta + theta theta_t = identity
        Mat t2 = mat_mul(F.theta, F.theta);
        worst = std::max(worst, max_abs(t2.a));
        Mat sum = mat_mul(F.theta_t, F.theta);
        Mat vt = mat_mul(F.theta, F.theta_t);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double id = i == j ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(sum(i, j) + vt(i, j) - id));
                // projector split and idempotency
                worst = std::max(worst,
                                 std::abs(F.proj_h(i, j) + F.proj_v(i, j) - id));
            }
        Mat hh = mat_mul(F.proj_h, F.proj_h);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                worst = std::max(worst, std::abs(hh(i, j) - F.proj_h(i, j)));
        // d pi (theta_t xi) = u
        for (int i = 0; i < 2; ++i)
            worst = std::max(worst, std::abs(F.spray[i] - p.u[i]));
        // vertical projector formula (X^v)^k = X_u^k + Gamma^k_ij X_x^i u^j
        ConnectionCoeffs cc = connection_coeffs(M, kLC, p.x);
        for (int A = 0; A < d; ++A) {
            Vec e(d, 0.0);
            e[A] = 1.0;
            Vec v = mat_vec(F.proj_v, e);
            for (int k = 0; k < 2; ++k) {
                double want = (A >= 2 && A - 2 == k) ? 1.0 : 0.0;
                if (A < 2)
                    for (int j = 0; j < 2; ++j) want += cc.gamma(k, A, j) * p.u[j];
                worst = std::max(worst, std::abs(v[2 + k] - want));
            }
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("conformal connections move the horizontal subspace") {
    ChartedManifold M = sphere2();
    ConnectionSpec conf = ConnectionSpec::conformal(ScalarExpr::parse("0.4*x1", 2));
    BundlePoint p{{0.3, -0.2}, {0.9, 0.5}};
    SplittingFrame F = splitting_frame(M, kLC, p);
    SplittingFrame Fp = splitting_frame(M, conf, p);
    // some primed horizontal lift has a nonzero vertical part in the old split
    double biggest = 0;
    for (int i = 0; i < 2; ++i) {
        Vec col(4);
        for (int A = 0; A < 4; ++A) col[A] = Fp.horizontal(A, i);
        Vec v = mat_vec(F.proj_v, col);
        biggest = std::max(biggest, max_abs(v));
    }
    CHECK(biggest > 1e-3);
}

TEST_CASE("weighted metric blocks: identity and constant scaling") {
    ChartedManifold M = ChartedManifold::euclidean(2, Box::cube(2, -1, 1));
    BundlePoint p{{0.1, 0.4}, {0.6, -0.3}};
    {
        WeightedSasakiMetric W = WeightedSasakiMetric::sasaki(M);
        Mat G = tm_metric_matrix(W, p);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(G(i, j) == (i == j ? 1.0 : 0.0));
    }
    {
        // f2 = 4 constant
        WeightedSasakiMetric W{M, kLC, ScalarExpr::constant(0.0),
                               ScalarExpr::parse("0.69314718055994531", 2)};
        Mat G = tm_metric_matrix(W, p);
        for (int i = 0; i < 2; ++i) {
            CHECK(G(i, i) == doctest::Approx(1.0));
            CHECK(G(2 + i, 2 + i) == doctest::Approx(4.0));
        }
    }
}

TEST_CASE("frame congruence recovers the f1 g, f2 g blocks on the sphere") {
    ChartedManifold M = sphere2();
    WeightedSasakiMetric W{M, kLC, ScalarExpr::parse("0.2*x1", 2),
                           ScalarExpr::parse("-0.1*x2", 2)};
    CounterRng rng(7, 0);
    double worst = 0;
    for (int t = 0; t < 10; ++t) {
        BundlePoint p = sample_bundle_point(M, kLC, rng, t, 0.6, 1.4, 0.05);
        Mat G = tm_metric_matrix(W, p);
        SplittingFrame F = splitting_frame(M, kLC, p);
        Mat g = M.metric_at(p.x);
        const double f1 = std::exp(2.0 * W.phi1.eval_value(p.x));
        const double f2 = std::exp(2.0 * W.phi2.eval_value(p.x));
        // off-block coordinate entries are generically nonzero for u != 0
        // but the (delta_i, d_{u^i}) frame diagonalizes G into f1 g, f2 g
        Mat S(4, 4);
        for (int i = 0; i < 2; ++i)
            for (int A = 0; A < 4; ++A) {
                S(A, i) = F.horizontal(A, i);
                S(A, 2 + i) = F.vertical(A, i);
            }
        Mat GS = mat_mul(mat_transpose(S), mat_mul(G, S));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                worst = std::max(worst, std::abs(GS(i, j) - f1 * g(i, j)));
                worst = std::max(worst, std::abs(GS(2 + i, 2 + j) - f2 * g(i, j)));
                worst = std::max(worst, std::abs(GS(i, 2 + j)));
            }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("canonical structures: I^2 = -1, compatibility, omega relation") {
    ChartedManifold M = sphere2();
    WeightedSasakiMetric W{M, kLC, ScalarExpr::parse("0.3*x1", 2),
                           ScalarExpr::parse("0.1*x1 + 0.2*x2", 2)};
    CounterRng rng(11, 0);
    double worst_i2 = 0, worst_compat = 0, worst_rel = 0, worst_anti = 0;
    for (int t = 0; t < 10; ++t) {
        BundlePoint p = sample_bundle_point(M, kLC, rng, t, 0.4, 1.6, 0.05);
        CanonicalForms F = canonical_forms(W, p);
        Mat G = tm_metric_matrix(W, p);
        Mat I2 = mat_mul(F.I_g, F.I_g);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                worst_i2 = std::max(worst_i2, std::abs(I2(i, j) + (i == j ? 1.0 : 0.0)));
        // G(IX, IY) = G(X, Y) on 50 random pairs
        const CounterRng sub = rng.substream(100 + t);
        for (int k = 0; k < 50; ++k) {
            Vec X(4), Y(4);
            for (int a = 0; a < 4; ++a) {
                X[a] = sub.uniform(k * 8 + a, -1.0, 1.0);
                Y[a] = sub.uniform(k * 8 + 4 + a, -1.0, 1.0);
            }
            Vec IX = mat_vec(F.I_g, X), IY = mat_vec(F.I_g, Y);
            worst_compat = std::max(worst_compat,
                                    std::abs(bilinear(G, IX, IY) - bilinear(G, X, Y)));
        }
        // omega^G = e^{psibar} omega^S entrywise, omega antisymmetric
        const double psibar = W.phi1.eval_value(p.x) + W.phi2.eval_value(p.x);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                worst_rel = std::max(worst_rel, std::abs(F.omega_g(i, j) -
                                                         std::exp(psibar) * F.omega_s(i, j)));
                worst_anti = std::max(worst_anti, std::abs(F.omega_g(i, j) + F.omega_g(j, i)));
            }
    }
    CHECK(worst_i2 < 1e-12);
    CHECK(worst_compat < 1e-10);
    CHECK(worst_rel < 1e-10);
    CHECK(worst_anti < 1e-12);
}

TEST_CASE("equal weights collapse I^G to the plain mirror structure") {
    ChartedManifold M = sphere2();
    WeightedSasakiMetric W{M, kLC, ScalarExpr::parse("0.3*x2", 2),
                           ScalarExpr::parse("0.3*x2", 2)};
    BundlePoint p{{0.2, 0.1}, {0.5, 0.8}};
    CanonicalForms F = canonical_forms(W, p);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(F.I_g(i, j) == doctest::Approx(F.I_s(i, j)));
}

TEST_CASE("mu is independent of the metric connection used for the splitting") {
    ChartedManifold M = sphere2();
    BundlePoint p{{0.25, -0.15}, {0.8, 0.3}};
    WeightedSasakiMetric W1 = WeightedSasakiMetric::sasaki(M);
    WeightedSasakiMetric W2{M, ConnectionSpec::with_torsion(ScalarExpr::parse("0.5*x1", 2)),
                            ScalarExpr::constant(0.0), ScalarExpr::constant(0.0)};
    CanonicalForms F1 = canonical_forms(W1, p);
    CanonicalForms F2 = canonical_forms(W2, p);
    for (int A = 0; A < 4; ++A) CHECK(std::abs(F1.mu[A] - F2.mu[A]) < 1e-12);
    // and mu(X) = <theta X, xi> for the coordinate basis
    SplittingFrame F = splitting_frame(M, kLC, p);
    Mat g = M.metric_at(p.x);
    for (int A = 0; A < 4; ++A) {
        Vec e(4, 0.0);
        e[A] = 1.0;
        Vec th = mat_vec(F.theta, e);
        double want = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) want += g(i, j) * th[2 + i] * p.u[j];
        CHECK(F1.mu[A] == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("exterior derivative of a constant-coefficient form vanishes") {
    CovGrad one_form;
    one_form.value = {1.0, -2.0, 0.5, 3.0};
    one_form.grad = Mat(4, 4);
    Mat d = exterior_derivative(one_form);
    CHECK(max_abs(d.a) == 0.0);
    MatGrad two_form;
    two_form.value = Mat(4, 4);
    two_form.value(0, 1) = 1.0;
    two_form.value(1, 0) = -1.0;
    two_form.grad = Ten3(4, 4, 4);
    Ten3 d2 = exterior_derivative(two_form);
    CHECK(max_abs(d2.a) == 0.0);
}

} // TEST_SUITE
