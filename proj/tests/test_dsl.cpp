#include <doctest.h>

#include <cmath>

#include "tsb/dsl.hpp"
#include "tsb/linalg.hpp"
#include "tsb/rng.hpp"

using namespace tsb;

TEST_SUITE("dsl") {

TEST_CASE("parses the documented grammar") {
    ScalarExpr e = ScalarExpr::parse("exp(2*x1)", 1);
    CHECK(e.pretty() == "exp(2*x1)");
    CHECK(e.eval_value(std::vector<double>{0.0}) == doctest::Approx(1.0));

    // precedence: ^ binds tighter than unary minus, which binds tighter than *
    CHECK(ScalarExpr::parse("-x1^2", 1).eval_value(std::vector<double>{3.0}) ==
          doctest::Approx(-9.0));
    CHECK(ScalarExpr::parse("-2*x1", 1).eval_value(std::vector<double>{3.0}) ==
          doctest::Approx(-6.0));
    CHECK(ScalarExpr::parse("2^x1^2", 1).eval_value(std::vector<double>{2.0}) ==
          doctest::Approx(16.0)); // right associative: 2^(2^2)
    CHECK(ScalarExpr::parse("2^-x1", 1).eval_value(std::vector<double>{1.0}) ==
          doctest::Approx(0.5));
    CHECK(ScalarExpr::parse("1 - 2 - 3", 1).eval_value(std::vector<double>{0.0}) ==
          doctest::Approx(-4.0));
    CHECK(ScalarExpr::parse("6/2/3", 1).eval_value(std::vector<double>{0.0}) ==
          doctest::Approx(1.0));
}

TEST_CASE("variable index outside the chart dimension is rejected") {
    CHECK_THROWS_AS(ScalarExpr::parse("x3", 2), ParseError);
    try {
        ScalarExpr::parse("x1 + x3", 2);
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(e.col == 6);
        CHECK(std::string(e.what()).find("out of range") != std::string::npos);
    }
}

TEST_CASE("malformed input reports the offending token position") {
    try {
        ScalarExpr::parse("1 + * 2", 1);
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(e.line == 1);
        CHECK(e.col == 5);
    }
    CHECK_THROWS_AS(ScalarExpr::parse("exp(", 1), ParseError);
    CHECK_THROWS_AS(ScalarExpr::parse("(1 + 2", 1), ParseError);
    CHECK_THROWS_AS(ScalarExpr::parse("1 2", 1), ParseError);
}

TEST_CASE("unknown identifiers and arity mismatches are named") {
    CHECK_THROWS_WITH_AS(ScalarExpr::parse("foo(x1)", 1), doctest::Contains("unknown function"),
                         ParseError);
    CHECK_THROWS_WITH_AS(ScalarExpr::parse("y + 1", 1), doctest::Contains("unknown identifier"),
                         ParseError);
    CHECK_THROWS_WITH_AS(ScalarExpr::parse("exp(x1, 2)", 1), doctest::Contains("arity"),
                         ParseError);
}

TEST_CASE("second-order jet values match analytic derivatives") {
    // x1^2 at 3: value 9, gradient 6, hessian 2
    JetValue a = ScalarExpr::parse("x1^2", 1).eval_jet(std::vector<double>{3.0});
    CHECK(a.value == doctest::Approx(9.0));
    CHECK(a.gradient[0] == doctest::Approx(6.0));
    CHECK(a.hessian[0] == doctest::Approx(2.0));

    // exp(2 x1) at 0.3
    JetValue b = ScalarExpr::parse("exp(2*x1)", 1).eval_jet(std::vector<double>{0.3});
    CHECK(b.value == doctest::Approx(std::exp(0.6)).epsilon(1e-12));
    CHECK(b.value == doctest::Approx(1.822119).epsilon(1e-6));
    CHECK(b.gradient[0] == doctest::Approx(3.644238).epsilon(1e-6));

    // a literal: exactly zero derivatives
    JetValue c = ScalarExpr::parse("5", 2).eval_jet(std::vector<double>{1.0, 2.0});
    CHECK(c.value == 5.0);
    for (double g : c.gradient) CHECK(g == 0.0);
    for (double h : c.hessian) CHECK(h == 0.0);
}

TEST_CASE("domain errors are raised, never silent NaN") {
    auto at = [](const char *src, double x) {
        return ScalarExpr::parse(src, 1).eval_value(std::vector<double>{x});
    };
    CHECK_THROWS_AS(at("ln(x1)", -1.0), DomainError);
    CHECK_THROWS_AS(at("sqrt(x1)", -1.0), DomainError);
    CHECK_THROWS_AS(at("1/x1", 0.0), DomainError);
    CHECK_THROWS_AS(at("x1^0.5", -2.0), DomainError);
    CHECK_THROWS_AS(at("exp(x1)", 1e9), DomainError); // overflow -> non-finite
    CHECK(at("x1^2", -2.0) == doctest::Approx(4.0));  // integer powers stay legal
}

namespace {

// random expression over constructors that stay inside every function domain
std::string random_expr(const CounterRng &rng, std::uint64_t &ctr, int depth) {
    const double roll = rng.uniform(ctr++);
    if (depth <= 0 || roll < 0.25) {
        if (rng.uniform(ctr++) < 0.5) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", rng.uniform(ctr++, 0.1, 3.0));
            return buf;
        }
        return "x" + std::to_string(1 + (int)(rng.uniform(ctr++) * 3) % 3);
    }
    const int pick = (int)(rng.uniform(ctr++) * 8);
    auto sub = [&]() { return random_expr(rng, ctr, depth - 1); };
    switch (pick) {
    case 0: return "(" + sub() + " + " + sub() + ")";
    case 1: return "(" + sub() + " - " + sub() + ")";
    case 2: return "(" + sub() + ")*(" + sub() + ")";
    case 3: return "(" + sub() + ") / (4 + (" + sub() + ")^2)";
    case 4: return "sin(" + sub() + ")";
    case 5: return "cos(" + sub() + ")";
    case 6: return "tanh(" + sub() + ")";
    case 7: return "exp(tanh(" + sub() + "))";
    }
    return "x1";
}

} // namespace

TEST_CASE("gradient and hessian agree with finite differences of the value") {
    CounterRng rng(11, 0);
    std::uint64_t ctr = 0;
    const double h = 1e-5;
    for (int trial = 0; trial < 30; ++trial) {
        ScalarExpr e = ScalarExpr::parse(random_expr(rng, ctr, 3), 3);
        Vec x = {rng.uniform(ctr++, -1.0, 1.0), rng.uniform(ctr++, -1.0, 1.0),
                 rng.uniform(ctr++, -1.0, 1.0)};
        JetValue jv = e.eval_jet(x);
        for (int i = 0; i < 3; ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (e.eval_value(xp) - e.eval_value(xm)) / (2 * h);
            const double scale = std::max(1.0, std::abs(fd));
            CHECK(std::abs(jv.gradient[i] - fd) / scale < 1e-6);
            for (int j = 0; j < 3; ++j) {
                Vec q1 = x, q2 = x, q3 = x, q4 = x;
                q1[i] += h; q1[j] += h;
                q2[i] += h; q2[j] -= h;
                q3[i] -= h; q3[j] += h;
                q4[i] -= h; q4[j] -= h;
                const double fd2 = (e.eval_value(q1) - e.eval_value(q2) - e.eval_value(q3) +
                                    e.eval_value(q4)) /
                                   (4 * h * h);
                CHECK(std::abs(jv.hessian[i * 3 + j] - fd2) / std::max(1.0, std::abs(fd2)) <
                      1e-4);
            }
        }
    }
}

TEST_CASE("pretty-print round trip evaluates identically") {
    CounterRng rng(23, 1);
    std::uint64_t ctr = 0;
    for (int trial = 0; trial < 40; ++trial) {
        ScalarExpr e = ScalarExpr::parse(random_expr(rng, ctr, 4), 3);
        ScalarExpr back = ScalarExpr::parse(e.pretty(), 3);
        for (int k = 0; k < 100; ++k) {
            Vec x = {rng.uniform(ctr + k * 3, -2.0, 2.0),
                     rng.uniform(ctr + k * 3 + 1, -2.0, 2.0),
                     rng.uniform(ctr + k * 3 + 2, -2.0, 2.0)};
            CHECK(e.eval_value(x) == back.eval_value(x));
        }
        ctr += 400;
    }
}

} // TEST_SUITE
