#include <doctest.h>

#include <cmath>

#include "tsb/jet.hpp"
#include "tsb/rng.hpp"

using namespace tsb;

namespace {

// reference function exercising every operation
template <class T>
T crucible(const T &x, const T &y, const T &z) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using std::tanh;
    T a = exp(x * 0.3) + sin(y) * cos(z) - tanh(x * y);
    T b = sqrt(x * x + y * y + 1.0);
    T c = log(b + 2.0) / (z + 4.0);
    return a * c + pow(b, 3.0) - (x - y) / (z * z + 1.0);
}

double crucible_d(double x, double y, double z) {
    double a = std::exp(x * 0.3) + std::sin(y) * std::cos(z) - std::tanh(x * y);
    double b = std::sqrt(x * x + y * y + 1.0);
    double c = std::log(b + 2.0) / (z + 4.0);
    return a * c + std::pow(b, 3.0) - (x - y) / (z * z + 1.0);
}

} // namespace

TEST_SUITE("jet") {

TEST_CASE("constants carry exactly zero derivatives") {
    Jet c = Jet::constant(3, 5.0);
    Jet r = exp(c) * c - 2.0 / c;
    for (int i = 0; i < 3; ++i) {
        CHECK(r.grad(i) == 0.0);
        for (int j = 0; j < 3; ++j) CHECK(r.hess(i, j) == 0.0);
    }
    CHECK(r.value() == doctest::Approx(std::exp(5.0) * 5.0 - 0.4).epsilon(1e-15));
}

TEST_CASE("gradient and hessian match central differences") {
    CounterRng rng(7, 0);
    const double h = 1e-5;
    for (int trial = 0; trial < 25; ++trial) {
        double p[3];
        for (int i = 0; i < 3; ++i) p[i] = rng.uniform(trial * 3 + i, -1.0, 1.0);
        std::vector<Jet> v = seed_point(std::span<const double>(p, 3));
        Jet r = crucible(v[0], v[1], v[2]);
        CHECK(r.value() == doctest::Approx(crucible_d(p[0], p[1], p[2])).epsilon(1e-13));
        for (int i = 0; i < 3; ++i) {
            double pp[3] = {p[0], p[1], p[2]}, pm[3] = {p[0], p[1], p[2]};
            pp[i] += h;
            pm[i] -= h;
            const double fd =
                (crucible_d(pp[0], pp[1], pp[2]) - crucible_d(pm[0], pm[1], pm[2])) / (2 * h);
            CHECK(r.grad(i) ==
                  doctest::Approx(fd).epsilon(1e-6).scale(std::max(1.0, std::abs(fd))));
            for (int j = 0; j < 3; ++j) {
                double q1[3] = {p[0], p[1], p[2]}, q2[3] = {p[0], p[1], p[2]},
                       q3[3] = {p[0], p[1], p[2]}, q4[3] = {p[0], p[1], p[2]};
                q1[i] += h; q1[j] += h;
                q2[i] += h; q2[j] -= h;
                q3[i] -= h; q3[j] += h;
                q4[i] -= h; q4[j] -= h;
                const double fd2 = (crucible_d(q1[0], q1[1], q1[2]) -
                                    crucible_d(q2[0], q2[1], q2[2]) -
                                    crucible_d(q3[0], q3[1], q3[2]) +
                                    crucible_d(q4[0], q4[1], q4[2])) /
                                   (4 * h * h);
                CHECK(r.hess(i, j) ==
                      doctest::Approx(fd2).epsilon(1e-4).scale(std::max(1.0, std::abs(fd2))));
            }
        }
    }
}

TEST_CASE("hessian is exactly symmetric") {
    double p[2] = {0.7, -0.4};
    std::vector<Jet> v = seed_point(std::span<const double>(p, 2));
    Jet r = exp(v[0] * v[1]) * sin(v[0] - v[1] * 2.0) / (v[1] + 3.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(r.hess(i, j) == r.hess(j, i));
}

TEST_CASE("integer powers accept negative bases") {
    std::vector<Jet> v = seed_point(std::vector<double>{-2.0});
    Jet r = pow(v[0], 3.0);
    CHECK(r.value() == doctest::Approx(-8.0));
    CHECK(r.grad(0) == doctest::Approx(12.0));
    CHECK(r.hess(0, 0) == doctest::Approx(-12.0));
    CHECK_THROWS_AS(pow(v[0], 0.5), DomainError);
}

TEST_CASE("domain violations raise hard errors") {
    std::vector<Jet> v = seed_point(std::vector<double>{-1.0});
    CHECK_THROWS_AS(log(v[0]), DomainError);
    CHECK_THROWS_AS(sqrt(v[0]), DomainError);
    CHECK_THROWS_AS(v[0] / Jet::constant(1, 0.0), DomainError);
}

} // TEST_SUITE
