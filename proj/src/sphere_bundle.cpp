#include "tsb/sphere_bundle.hpp"

namespace tsb {

namespace {

// sigma: S^n angular chart, sigma(a) in R^{n+1}.
//   sigma_1 = cos a1, sigma_2 = sin a1 cos a2, ..., sigma_{n+1} = sin a1 ... sin a_n
template <class T>
std::vector<T> unit_sphere_point(std::span<const T> a) {
    const int n = static_cast<int>(a.size());
    using detail::carrier_cos;
    using detail::carrier_sin;
    std::vector<T> sigma;
    sigma.reserve(n + 1);
    T prod = a[0] * 0.0 + 1.0;
    for (int i = 0; i < n; ++i) {
        sigma.push_back(prod * carrier_cos(a[i]));
        prod = prod * carrier_sin(a[i]);
    }
    sigma.push_back(prod);
    return sigma;
}

template <class T>
std::vector<T> embed_generic(const SphereBundleChart &chart, std::span<const T> q) {
    const int m = chart.m(), n = chart.n();
    std::span<const T> x = q.subspan(0, m);
    std::span<const T> a = q.subspan(m, n);
    std::vector<T> g = base_metric_eval(chart.M, chart.conn, x);
    // lower Cholesky g = C C^T; u_dir = C^{-T} sigma is a g-unit vector
    std::vector<T> C(g.size(), q[0] * 0.0);
    if (!cholesky_lower(m, g.data(), C.data()))
        throw GeometryError("base metric not positive definite inside sphere chart");
    std::vector<T> sigma = unit_sphere_point(a);
    std::vector<T> dir(m, q[0] * 0.0);
    solve_lower_transposed(m, C.data(), sigma.data(), dir.data());
    T r = chart.radius.eval(x);
    if (scalar_value(r) <= 0.0)
        throw GeometryError("radius field must be positive");
    std::vector<T> z(q.begin(), q.begin() + m);
    for (int i = 0; i < m; ++i) z.push_back(r * dir[i]);
    return z;
}

} // namespace

Vec embed_value(const SphereBundleChart &chart, std::span<const double> q) {
    return embed_generic<double>(chart, q);
}

EmbeddingJet embed_jet(const SphereBundleChart &chart, std::span<const double> q) {
    const int m = chart.m(), pd = chart.param_dim();
    std::vector<Jet> qj = seed_point(q);
    std::vector<Jet> zj = embed_generic<Jet>(chart, qj);
    EmbeddingJet out;
    out.z.resize(2 * m);
    out.jac = Mat(2 * m, pd);
    out.hess = Ten3(2 * m, pd, pd);
    for (int A = 0; A < 2 * m; ++A) {
        out.z[A] = zj[A].value();
        for (int al = 0; al < pd; ++al) {
            out.jac(A, al) = zj[A].grad(al);
            for (int be = 0; be < pd; ++be) out.hess(A, al, be) = zj[A].hess(al, be);
        }
    }
    return out;
}

MetricGrad induced_metric_grad(const SphereBundleChart &chart,
                               const WeightedSasakiMetric &W, std::span<const double> q) {
    const int tm_d = 2 * chart.m(), pd = chart.param_dim();
    EmbeddingJet E = embed_jet(chart, q);
    MetricGrad G = tm_metric_grad(W, E.z);
    MetricGrad out;
    out.d = pd;
    out.g = Mat(pd, pd);
    out.dg = Ten3(pd, pd, pd);
    // h_ab = J^A_a G_AB J^B_b
    for (int al = 0; al < pd; ++al)
        for (int be = 0; be < pd; ++be) {
            double s = 0;
            for (int A = 0; A < tm_d; ++A)
                for (int B = 0; B < tm_d; ++B)
                    s += E.jac(A, al) * G.g(A, B) * E.jac(B, be);
            out.g(al, be) = s;
        }
    // d_c h_ab = H^A_ac G J^B_b + J^A_a G H^B_bc + J^A_a (d_C G_AB J^C_c) J^B_b
    for (int c = 0; c < pd; ++c)
        for (int al = 0; al < pd; ++al)
            for (int be = 0; be < pd; ++be) {
                double s = 0;
                for (int A = 0; A < tm_d; ++A)
                    for (int B = 0; B < tm_d; ++B) {
                        s += E.hess(A, al, c) * G.g(A, B) * E.jac(B, be);
                        s += E.jac(A, al) * G.g(A, B) * E.hess(B, be, c);
                        double dG = 0;
                        for (int C = 0; C < tm_d; ++C) dG += G.dg(A, B, C) * E.jac(C, c);
                        s += E.jac(A, al) * dG * E.jac(B, be);
                    }
                out.dg(al, be, c) = s;
            }
    return out;
}

Mat induced_metric(const SphereBundleChart &chart, const WeightedSasakiMetric &W,
                   std::span<const double> q) {
    MetricGrad mg = induced_metric_grad(chart, W, q);
    if (!is_spd(mg.g))
        throw GeometryError("induced metric rank-deficient at parameter " + format_point(q));
    return mg.g;
}

namespace {

CurvatureData induced_curvature(const SphereBundleChart &chart, const WeightedSasakiMetric &W,
                                std::span<const double> q, double step) {
    MetricGradField field = [&](std::span<const double> qq) {
        return induced_metric_grad(chart, W, qq);
    };
    MetricJet2 mj = fd_metric_jets(field, q, step);
    return levi_civita_curvature(mj, q);
}

} // namespace

double srm_scalar_curvature(const SphereBundleChart &chart, const WeightedSasakiMetric &W,
                            std::span<const double> q, double step) {
    return induced_curvature(chart, W, q, step).scalar;
}

double srm_einstein_residual(const SphereBundleChart &chart, const WeightedSasakiMetric &W,
                             std::span<const double> q, double step) {
    CurvatureData cd = induced_curvature(chart, W, q, step);
    Mat h = induced_metric(chart, W, q);
    return einstein_residual_of(cd, h);
}

double scal_formula_general(const ChartedManifold &M, const ConnectionSpec &spec,
                            double f1, double f2, double s, std::span<const double> x,
                            std::span<const double> fiber_dir) {
    const int m = M.dim(), n = m - 1;
    CurvatureData cd = curvature(M, spec, x);
    Mat g = base_metric_at(M, spec, x);
    // g-orthonormal frame from the Cholesky factor: columns of C^{-T}
    Mat C(m, m);
    if (!cholesky_lower(m, g.a.data(), C.a.data()))
        throw GeometryError("base metric not positive definite at " + format_point(x));
    Mat frame(m, m); // frame(i, a) = component i of e_a
    {
        Vec e(m), col(m);
        for (int a = 0; a < m; ++a) {
            std::fill(e.begin(), e.end(), 0.0);
            e[a] = 1.0;
            solve_lower_transposed(m, C.a.data(), e.data(), col.data());
            for (int i = 0; i < m; ++i) frame(i, a) = col[i];
        }
    }
    // u = s * normalized fiber direction
    Vec u(fiber_dir.begin(), fiber_dir.end());
    const double norm = std::sqrt(bilinear(g, u, u));
    if (norm <= 0) throw GeometryError("fiber direction is null");
    for (double &v : u) v *= s / norm;
    // sum over the frame of <R(e_i, e_j) u, e_k>^2
    double sum = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Vec Ru(m, 0.0);
            for (int l = 0; l < m; ++l) {
                double v = 0;
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        for (int c = 0; c < m; ++c)
                            v += cd.riemann(l, a, b, c) * frame(a, i) * frame(b, j) * u[c];
                Ru[l] = v;
            }
            for (int k = 0; k < m; ++k) {
                double comp = 0;
                for (int p = 0; p < m; ++p)
                    for (int qq = 0; qq < m; ++qq) comp += g(p, qq) * Ru[p] * frame(qq, k);
                sum += comp * comp;
            }
        }
    return cd.scalar / f1 - (f2 / (4.0 * f1 * f1)) * sum +
           double(n - 1) * double(n) / (f2 * s * s);
}

double scal_formula_spaceform(int sign, double R, double s, double f1, double f2, int n) {
    if (R <= 0 || s <= 0 || f1 <= 0 || f2 <= 0 || n < 1 || (sign != 1 && sign != -1))
        throw GeometryError("invalid space-form parameters");
    return sign * double(n) * double(n + 1) / (f1 * R * R) -
           (f2 / (4.0 * f1 * f1)) * (s * s / (R * R * R * R)) * 2.0 * n +
           double(n - 1) * double(n) / (f2 * s * s);
}

RadiusSearchResult find_radius_for_sign(int sign, double R, double f1, double f2, int n,
                                        bool want_positive) {
    const double lo = 1e-4, hi = 1e4;
    const int grid = 161;
    auto value = [&](double s) { return scal_formula_spaceform(sign, R, s, f1, f2, n); };
    auto achieves = [&](double v) { return want_positive ? v > 0 : v < 0; };

    Vec ss(grid), vv(grid);
    int best = -1;
    for (int i = 0; i < grid; ++i) {
        const double t = double(i) / (grid - 1);
        ss[i] = lo * std::pow(hi / lo, t);
        vv[i] = value(ss[i]);
        if (best < 0 && achieves(vv[i])) best = i;
    }
    if (best < 0)
        throw GeometryError(std::string("target sign unreachable: the space-form scalar "
                                        "curvature cannot be made ") +
                            (want_positive ? "positive" : "negative") +
                            " for n=" + std::to_string(n) +
                            (sign < 0 && n == 1 && want_positive
                                 ? " (all three closed-form terms are non-positive)"
                                 : ""));

    RadiusSearchResult out;
    // bisection refinement on the nearest sign change, when one exists
    int flip = -1;
    for (int i = 0; i + 1 < grid; ++i)
        if (achieves(vv[i]) != achieves(vv[i + 1])) {
            flip = i;
            break;
        }
    if (flip >= 0) {
        double a = ss[flip], b = ss[flip + 1];
        bool a_ok = achieves(vv[flip]);
        for (int it = 0; it < 80; ++it) {
            const double mid = std::sqrt(a * b);
            if (achieves(value(mid)) == a_ok)
                a = mid;
            else
                b = mid;
        }
        out.had_sign_change = true;
        out.boundary = std::sqrt(a * b);
        // return the achieving endpoint of the refined bracket, backed off a
        // little from the boundary so the sign is numerically unambiguous
        double s_pick = a_ok ? a : b;
        const double candidate = s_pick * (a_ok ? 0.9 : 1.1);
        if (candidate >= lo && candidate <= hi && achieves(value(candidate)))
            s_pick = candidate;
        out.s = s_pick;
        out.value = value(out.s);
        return out;
    }
    // target sign everywhere: report the extreme grid point achieving it
    out.s = ss[best];
    out.value = vv[best];
    return out;
}

Vec sample_chart_point(const SphereBundleChart &chart, const CounterRng &rng,
                       std::uint64_t counter, double margin) {
    const int m = chart.m(), n = chart.n();
    Vec q(chart.param_dim());
    Vec x = chart.M.domain().sample(rng, counter * 2, margin);
    for (int i = 0; i < m; ++i) q[i] = x[i];
    const double am = chart.angular_margin;
    const CounterRng sub = rng.substream(0xA17);
    for (int i = 0; i < n; ++i) {
        const double hi = (i == n - 1) ? 2.0 * M_PI : M_PI;
        q[m + i] = sub.uniform(counter * 2 + 1 + i * 131, am, hi - am);
    }
    return q;
}

} // namespace tsb
