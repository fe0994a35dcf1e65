#include "tsb/manifold.hpp"

#include <cstdio>

namespace tsb {

bool Box::contains(std::span<const double> x, double slack) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
}

Vec Box::sample(const CounterRng &rng, std::uint64_t counter, double margin) const {
    Vec x(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double w = hi[i] - lo[i];
        x[i] = rng.uniform(counter * 31 + i, lo[i] + margin * w, hi[i] - margin * w);
    }
    return x;
}

Box Box::cube(int dim, double lo, double hi) {
    Box b;
    b.lo.assign(dim, lo);
    b.hi.assign(dim, hi);
    return b;
}

std::string format_point(std::span<const double> x) {
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6g", x[i]);
        s += buf;
        if (i + 1 < x.size()) s += ", ";
    }
    return s + ")";
}

namespace {

// conformal factor c(x) * identity as an entry matrix
std::vector<ScalarExpr> conformal_entries(int dim, const ScalarExpr &factor) {
    std::vector<ScalarExpr> e(static_cast<std::size_t>(dim) * dim, ScalarExpr::constant(0.0));
    for (int i = 0; i < dim; ++i) e[i * dim + i] = factor;
    return e;
}

ScalarExpr spaceform_factor(int dim, double R, int sign) {
    // 4 R^4 / (R^2 +- |x|^2)^2
    char buf[256];
    std::string sum;
    for (int i = 1; i <= dim; ++i) {
        std::snprintf(buf, sizeof(buf), "%sx%d*x%d", i > 1 ? " + " : "", i, i);
        sum += buf;
    }
    std::snprintf(buf, sizeof(buf), "(4*%.17g) / ((%.17g %s (%s))^2)", R * R * R * R,
                  R * R, sign > 0 ? "+" : "-", sum.c_str());
    return ScalarExpr::parse(buf, dim);
}

} // namespace

ChartedManifold ChartedManifold::euclidean(int dim, Box domain) {
    ChartedManifold m;
    m.dim_ = dim;
    m.family_ = MetricFamily::Euclidean;
    m.entries_ = conformal_entries(dim, ScalarExpr::constant(1.0));
    m.domain_ = std::move(domain);
    return m;
}

ChartedManifold ChartedManifold::conformally_flat(int dim, ScalarExpr factor, Box domain) {
    ChartedManifold m;
    m.dim_ = dim;
    m.family_ = MetricFamily::ConformallyFlat;
    m.entries_ = conformal_entries(dim, std::move(factor));
    m.domain_ = std::move(domain);
    return m;
}

ChartedManifold ChartedManifold::sphere_stereographic(int dim, double R, Box domain) {
    if (R <= 0) throw GeometryError("sphere radius must be positive");
    ChartedManifold m;
    m.dim_ = dim;
    m.family_ = MetricFamily::SphereStereographic;
    m.radius_param_ = R;
    m.entries_ = conformal_entries(dim, spaceform_factor(dim, R, +1));
    m.domain_ = std::move(domain);
    return m;
}

ChartedManifold ChartedManifold::hyperbolic_ball(int dim, double R, Box domain) {
    if (R <= 0) throw GeometryError("ball radius must be positive");
    ChartedManifold m;
    m.dim_ = dim;
    m.family_ = MetricFamily::HyperbolicBall;
    m.radius_param_ = R;
    m.entries_ = conformal_entries(dim, spaceform_factor(dim, R, -1));
    m.domain_ = std::move(domain);
    // reject boxes reaching the chart boundary
    double corner = 0;
    for (int i = 0; i < dim; ++i)
        corner += std::max(m.domain_.lo[i] * m.domain_.lo[i], m.domain_.hi[i] * m.domain_.hi[i]);
    if (std::sqrt(corner) >= R)
        throw GeometryError("hyperbolic-ball domain must stay inside |x| < R");
    return m;
}

ChartedManifold ChartedManifold::explicit_metric(int dim, std::vector<ScalarExpr> entries, Box domain) {
    if (entries.size() != static_cast<std::size_t>(dim) * dim)
        throw GeometryError("explicit metric needs dim*dim entries");
    ChartedManifold m;
    m.dim_ = dim;
    m.family_ = MetricFamily::Explicit;
    m.entries_ = std::move(entries);
    m.domain_ = std::move(domain);
    return m;
}

Mat ChartedManifold::metric_at(std::span<const double> x) const {
    Mat g(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) g(i, j) = entries_[i * dim_ + j].eval_value(x);
    // symmetrize explicit input, then verify SPD by factorization
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j) {
            const double s = 0.5 * (g(i, j) + g(j, i));
            g(i, j) = g(j, i) = s;
        }
    if (!is_spd(g))
        throw GeometryError("metric is not positive definite at " + format_point(x));
    return g;
}

MetricJet2 ChartedManifold::metric_jets(std::span<const double> x) const {
    const int d = dim_;
    MetricJet2 out;
    out.d = d;
    out.g = Mat(d, d);
    out.dg = Ten3(d, d, d);
    out.d2g = Ten4(d, d, d, d);
    std::vector<Jet> vars = seed_point(x);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const ScalarExpr &e = entries_[i * d + j];
            if (e.is_constant() && family_ != MetricFamily::Explicit) {
                const double v = e.eval_value(x);
                out.g(i, j) = out.g(j, i) = v;
                continue;
            }
            Jet val = e.eval(std::span<const Jet>(vars));
            out.g(i, j) = out.g(j, i) = val.value();
            for (int k = 0; k < d; ++k) {
                out.dg(i, j, k) = out.dg(j, i, k) = val.grad(k);
                for (int l = 0; l < d; ++l)
                    out.d2g(i, j, k, l) = out.d2g(j, i, k, l) = val.hess(k, l);
            }
        }
    if (!is_spd(out.g))
        throw GeometryError("metric is not positive definite at " + format_point(x));
    return out;
}

std::string ChartedManifold::describe() const {
    char buf[64];
    switch (family_) {
    case MetricFamily::Euclidean: return "euclidean";
    case MetricFamily::ConformallyFlat: return "conformally-flat";
    case MetricFamily::SphereStereographic:
        std::snprintf(buf, sizeof(buf), "sphere-stereographic(R=%g)", radius_param_);
        return buf;
    case MetricFamily::HyperbolicBall:
        std::snprintf(buf, sizeof(buf), "hyperbolic-ball(R=%g)", radius_param_);
        return buf;
    case MetricFamily::Explicit: return "explicit";
    }
    return "?";
}

} // namespace tsb
