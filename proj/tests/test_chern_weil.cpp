#include <doctest.h>

#include "tsb/chern_weil.hpp"
#include "tsb/homothety.hpp"
#include "tsb/rng.hpp"
#include "tsb/tasks.hpp"

using namespace tsb;

namespace {

const ConnectionSpec kLC = ConnectionSpec::levi_civita();

} // namespace

TEST_SUITE("chern-weil") {

TEST_CASE("alternating forms wedge with the right signs") {
    // (dx0 ^ dx1) ^ (dx2 ^ dx3) with shuffled factors
    AltForm a(4, 1), b(4, 1), c(4, 1), d(4, 1);
    const int i0[1] = {0}, i1[1] = {1}, i2[1] = {2}, i3[1] = {3};
    a.coeff(i0) = 1;
    b.coeff(i1) = 1;
    c.coeff(i2) = 1;
    d.coeff(i3) = 1;
    AltForm ab = a.wedge(b);
    AltForm ba = b.wedge(a);
    const int i01[2] = {0, 1};
    CHECK(ab.coeff(i01) == 1.0);
    CHECK(ba.coeff(i01) == -1.0);
    AltForm abcd = ab.wedge(c.wedge(d));
    const int i0123[4] = {0, 1, 2, 3};
    CHECK(abcd.coeff(i0123) == 1.0);
    AltForm acbd = a.wedge(c).wedge(b.wedge(d));
    CHECK(acbd.coeff(i0123) == -1.0);
    // wedge with a repeated factor dies
    CHECK(a.wedge(a).max_abs() == 0.0);
    // 2-forms commute
    AltForm s = ab.wedge(c.wedge(d));
    AltForm t = c.wedge(d).wedge(ab);
    CHECK(s.coeff(i0123) == t.coeff(i0123));
}

TEST_CASE("curvature matrix is antisymmetric in an orthonormal frame") {
    ChartedManifold M = ChartedManifold::sphere_stereographic(3, 1.0, Box::cube(3, -0.4, 0.4));
    Vec x = {0.2, -0.1, 0.3};
    CurvatureTwoForm curv = base_tm_curvature_form(M, kLC, x);
    CHECK(curv.antisymmetry_defect() < 1e-10);
}

TEST_CASE("flat bundles have vanishing forms; odd rank is rejected") {
    ChartedManifold M = ChartedManifold::euclidean(2, Box::cube(2, -1, 1));
    Vec x = {0.3, 0.1};
    CurvatureTwoForm curv = base_tm_curvature_form(M, kLC, x);
    CHECK(euler_form(curv).max_abs() == 0.0);
    ChartedManifold M3 = ChartedManifold::euclidean(3, Box::cube(3, -1, 1));
    Vec x3 = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(euler_form(base_tm_curvature_form(M3, kLC, x3)), GeometryError);
}

TEST_CASE("pontryagin degree bounds are enforced") {
    ChartedManifold M = ChartedManifold::euclidean(2, Box::cube(2, -1, 1));
    Vec x = {0.0, 0.0};
    CurvatureTwoForm curv = base_tm_curvature_form(M, kLC, x);
    CHECK_THROWS_WITH_AS(pontryagin_form(curv, 0), doctest::Contains("out of range"),
                         GeometryError);
    CHECK_THROWS_WITH_AS(pontryagin_form(curv, 2), doctest::Contains("out of range"),
                         GeometryError);
    CHECK_NOTHROW(pontryagin_form(curv, 1)); // zero 4-form on a 2-chart
}

TEST_CASE("sphere TM: euler form is the curvature area form over 2 pi") {
    ChartedManifold M = ChartedManifold::sphere_stereographic(2, 2.0, Box::cube(2, -0.6, 0.6));
    CounterRng rng(3, 0);
    for (int t = 0; t < 10; ++t) {
        Vec x = M.domain().sample(rng, t, 0.05);
        AltForm e = euler_form(base_tm_curvature_form(M, kLC, x));
        Mat g = M.metric_at(x);
        const double K = 1.0 / 4.0;
        const int idx[2] = {0, 1};
        CHECK(e.coeff(idx) ==
              doctest::Approx(K * std::sqrt(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)) /
                              (2.0 * M_PI))
                  .epsilon(1e-10));
    }
}

TEST_CASE("euler form of TTM vanishes pointwise for one- and two-dim bases") {
    CounterRng rng(5, 0);
    for (int m : {1, 2}) {
        ChartedManifold M =
            m == 2 ? ChartedManifold::sphere_stereographic(2, 1.0, Box::cube(2, -0.5, 0.5))
                   : ChartedManifold::conformally_flat(1, ScalarExpr::parse("1 + 0.4*x1^2", 1),
                                                       Box::cube(1, -0.5, 0.5));
        for (int t = 0; t < 15; ++t) {
            BundlePoint p = sample_bundle_point(M, kLC, rng, t + 50 * m, 0.4, 1.6, 0.05);
            AltForm e = euler_form(ttm_product_curvature_form(M, kLC, pack_point(p)));
            CHECK(e.max_abs() < 1e-10);
        }
    }
}

TEST_CASE("p1 vanishes pointwise on constant-curvature charts") {
    ChartedManifold M = ChartedManifold::sphere_stereographic(4, 1.0, Box::cube(4, -0.4, 0.4));
    CounterRng rng(7, 0);
    for (int t = 0; t < 10; ++t) {
        Vec x = M.domain().sample(rng, t, 0.05);
        CHECK(pontryagin_form(base_tm_curvature_form(M, kLC, x), 1).max_abs() < 1e-10);
    }
}

TEST_CASE("p1 of the pullback bundle is the pullback of p1") {
    Scenario sc;
    sc.task = "chern-weil";
    sc.samples = 8;
    RunReport rep = task_chern_weil(sc);
    for (const CheckResult &c : rep.checks) {
        INFO(c.name, " measured=", c.measured);
        CHECK(c.pass);
    }
}

TEST_CASE("gauss-bonnet integral recovers the euler number") {
    for (double R : {1.0, 2.0}) {
        GaussBonnetResult gb = gauss_bonnet_integral(
            ChartedManifold::sphere_stereographic(2, R, Box::cube(2, -1, 1)));
        CHECK(std::abs(gb.value - 2.0) < 1e-3);
        CHECK(!gb.warning);
    }
    GaussBonnetResult flat = gauss_bonnet_integral(
        ChartedManifold::euclidean(2, Box::cube(2, -1, 1)), 10.0, 64, 8);
    CHECK(std::abs(flat.value) < 1e-12);
    // a deliberately starved grid must warn
    GaussBonnetResult coarse = gauss_bonnet_integral(
        ChartedManifold::sphere_stereographic(2, 1.0, Box::cube(2, -1, 1)), 50.0, 16, 4);
    CHECK(coarse.warning);
}

TEST_CASE("forms are invariant under orthonormal frame rotations") {
    ChartedManifold M = ChartedManifold::sphere_stereographic(4, 1.3, Box::cube(4, -0.4, 0.4));
    Vec x = {0.2, -0.1, 0.15, 0.3};
    CurvatureTwoForm curv = base_tm_curvature_form(M, kLC, x);
    CounterRng rng(11, 0);
    Mat Q = Mat::identity(4);
    {
        const double ang = rng.uniform(0, 0, 2 * M_PI);
        Q(1, 1) = std::cos(ang);
        Q(3, 3) = std::cos(ang);
        Q(1, 3) = -std::sin(ang);
        Q(3, 1) = std::sin(ang);
    }
    CurvatureTwoForm rot = rotate_frame(curv, Q);
    AltForm de = euler_form(curv);
    de.add_scaled(euler_form(rot), -1.0);
    CHECK(de.max_abs() < 1e-10);
    AltForm dp = pontryagin_form(curv, 1);
    dp.add_scaled(pontryagin_form(rot, 1), -1.0);
    CHECK(dp.max_abs() < 1e-10);
}

} // TEST_SUITE
