#include "tsb/homothety.hpp"

#include <algorithm>

namespace tsb {

namespace {

ScalarExpr combine(const ScalarExpr &a, const ScalarExpr &b, ExprNode::Kind kind) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::make_shared<ExprNode>(ScalarExprAccess::root(a));
    n->rhs = std::make_shared<ExprNode>(ScalarExprAccess::root(b));
    const int dim = std::max(a.declared_dim(), b.declared_dim());
    // conservative upper bound on referenced variables
    return ScalarExprAccess::make(n, dim, dim);
}

struct ScaleData {
    double hhat = 0;
    Vec dhhat;      // gradient w.r.t. x
    double t = 0;
    Vec dt;
    double phi = 0; // relative conformal phi
    Vec dphi;
};

ScaleData scale_data(const HomothetySpec &spec, std::span<const double> x, bool srm) {
    ScaleData sd;
    const int m = static_cast<int>(x.size());
    JetValue phs = spec.source.conformal_phi.eval_jet(x);
    JetValue pht = spec.target.conformal_phi.eval_jet(x);
    sd.phi = pht.value - phs.value;
    sd.dphi.resize(m);
    for (int i = 0; i < m; ++i) sd.dphi[i] = pht.gradient[i] - phs.gradient[i];
    if (srm) {
        JetValue r = spec.source.radius.eval_jet(x);
        JetValue s = spec.target.radius.eval_jet(x);
        if (r.value <= 0 || s.value <= 0)
            throw GeometryError("radius fields must be positive");
        sd.t = s.value / r.value;
        sd.dt.resize(m);
        for (int i = 0; i < m; ++i)
            sd.dt[i] = (s.gradient[i] * r.value - s.value * r.gradient[i]) / (r.value * r.value);
    } else {
        JetValue t = spec.scale_t.eval_jet(x);
        if (t.value == 0) throw GeometryError("scale field t must not vanish");
        sd.t = t.value;
        sd.dt.assign(t.gradient.begin(), t.gradient.end());
    }
    const double e = std::exp(-sd.phi);
    sd.hhat = e * sd.t;
    sd.dhhat.resize(m);
    for (int i = 0; i < m; ++i) sd.dhhat[i] = e * (sd.dt[i] - sd.t * sd.dphi[i]);
    return sd;
}

double median(Vec v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// G-orthonormalizes the given columns in place (modified Gram-Schmidt).
std::vector<Vec> gram_schmidt(const std::vector<Vec> &cols, const Mat &G) {
    std::vector<Vec> out;
    for (Vec w : cols) {
        for (const Vec &e : out) {
            const double c = bilinear(G, w, e);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * e[i];
        }
        const double nn = bilinear(G, w, w);
        if (nn <= 1e-14) continue;
        const double inv = 1.0 / std::sqrt(nn);
        for (double &v : w) v *= inv;
        out.push_back(std::move(w));
    }
    return out;
}

struct PairData {
    Mat source;   // G restricted to the test vectors
    Mat pulled;   // h^* G' on the same vectors
    Vec z;
    std::vector<Vec> vertical; // vertical test vectors (for psi ratios)
};

VerdictReport judge(const std::vector<PairData> &samples, double tol,
                    std::optional<double> /*expected*/) {
    VerdictReport rep;
    rep.samples = static_cast<int>(samples.size());
    Vec ratios;
    for (const PairData &S : samples) {
        std::vector<Vec> on = gram_schmidt(S.vertical, S.source);
        for (const Vec &w : on) {
            double d = 0;
            for (std::size_t i = 0; i < w.size(); ++i)
                for (std::size_t j = 0; j < w.size(); ++j)
                    d += w[i] * S.pulled(static_cast<int>(i), static_cast<int>(j)) * w[j];
            ratios.push_back(d);
        }
    }
    if (ratios.empty()) throw GeometryError("no non-degenerate vertical pairs in sample set");
    const double psi = median(ratios);
    rep.fitted_psi = psi;
    double rmin = ratios[0], rmax = ratios[0];
    for (double r : ratios) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    rep.psi_spread = (rmax - rmin) / std::max(std::abs(psi), 1e-30);

    double worst = 0;
    Witness wit;
    for (const PairData &S : samples) {
        const int k = S.source.rows;
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                const double scale =
                    std::max(1.0, std::abs(psi)) * std::sqrt(S.source(i, i) * S.source(j, j));
                const double dev = std::abs(S.pulled(i, j) - psi * S.source(i, j)) / scale;
                if (dev > worst) {
                    worst = dev;
                    wit = Witness{S.z, i, j, S.pulled(i, j), psi * S.source(i, j), dev};
                }
            }
    }
    rep.max_rel_deviation = worst;
    const bool pass = worst <= tol && rep.psi_spread <= tol;
    if (!pass) {
        rep.verdict = Verdict::NotHomothety;
        rep.witness = wit;
    } else {
        rep.verdict = std::abs(psi - 1.0) <= 10.0 * tol ? Verdict::Isometry : Verdict::Homothety;
    }
    return rep;
}

} // namespace

ScalarExpr HomothetySpec::relative_phi() const {
    return combine(target.conformal_phi, source.conformal_phi, ExprNode::Kind::Sub);
}

WeightedSasakiMetric side_metric(const HomothetySpec &spec, const HomothetySide &side) {
    return WeightedSasakiMetric{spec.base, ConnectionSpec::conformal(side.conformal_phi),
                                side.phi1, side.phi2};
}

Vec map_point(const HomothetySpec &spec, std::span<const double> z, bool srm) {
    BundlePoint p = unpack_point(z);
    ScaleData sd = scale_data(spec, p.x, srm);
    Vec out(z.begin(), z.end());
    const int m = p.m();
    for (int i = 0; i < m; ++i) out[m + i] = sd.hhat * p.u[i];
    return out;
}

Vec pushforward_numeric(const HomothetySpec &spec, const BundlePoint &p,
                        std::span<const double> X, bool srm) {
    const int m = p.m();
    ScaleData sd = scale_data(spec, p.x, srm);
    Vec out(2 * m, 0.0);
    double dh = 0;
    for (int i = 0; i < m; ++i) {
        out[i] = X[i];
        dh += sd.dhhat[i] * X[i];
    }
    for (int i = 0; i < m; ++i) out[m + i] = sd.hhat * X[m + i] + dh * p.u[i];
    return out;
}

Vec pushforward_closed_form(const HomothetySpec &spec, const BundlePoint &p,
                            std::span<const double> X, bool srm) {
    const int m = p.m();
    ScaleData sd = scale_data(spec, p.x, srm);
    ConnectionSpec conn_src = ConnectionSpec::conformal(spec.source.conformal_phi);
    ConnectionSpec conn_tgt = ConnectionSpec::conformal(spec.target.conformal_phi);
    ConnectionCoeffs gs = connection_coeffs(spec.base, conn_src, p.x);
    ConnectionCoeffs gt = connection_coeffs(spec.base, conn_tgt, p.x);
    Mat g = base_metric_at(spec.base, conn_src, p.x);
    Mat ginv = spd_inverse(g, "source base metric");

    std::span<const double> a = X.subspan(0, m), b = X.subspan(m, m);
    // w = (dt(a)/t) u + (b + N a) + dphi(u) a - g(a,u) grad phi
    Vec w(m, 0.0);
    double dta = 0, dphiu = 0, gau = 0;
    for (int i = 0; i < m; ++i) {
        dta += sd.dt[i] * a[i];
        dphiu += sd.dphi[i] * p.u[i];
        for (int j = 0; j < m; ++j) gau += g(i, j) * a[i] * p.u[j];
    }
    for (int k = 0; k < m; ++k) {
        double Na = 0, gradphi = 0;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) Na += gs.gamma(k, i, j) * a[i] * p.u[j];
        }
        for (int l = 0; l < m; ++l) gradphi += ginv(k, l) * sd.dphi[l];
        w[k] = (dta / sd.t) * p.u[k] + b[k] + Na + dphiu * a[k] - gau * gradphi;
    }
    // H'-lift of a at the image point (x, hhat u)
    Vec out(2 * m, 0.0);
    for (int i = 0; i < m; ++i) out[i] = a[i];
    for (int k = 0; k < m; ++k) {
        double Npa = 0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Npa += gt.gamma(k, i, j) * a[i] * sd.hhat * p.u[j];
        out[m + k] = -Npa + sd.hhat * w[k];
    }
    return out;
}

const char *verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Homothety: return "homothety";
    case Verdict::Isometry: return "isometry";
    case Verdict::NotHomothety: return "not-homothety";
    }
    return "?";
}

BundlePoint sample_bundle_point(const ChartedManifold &M, const ConnectionSpec &conn,
                                const CounterRng &rng, std::uint64_t counter,
                                double fiber_min, double fiber_max, double margin) {
    const int m = M.dim();
    BundlePoint p;
    p.x = M.domain().sample(rng, counter * 7, margin);
    Mat g = base_metric_at(M, conn, p.x);
    Mat C(m, m);
    cholesky_lower(m, g.a.data(), C.a.data());
    // isotropic direction via Box-Muller on the counter stream
    const CounterRng sub = rng.substream(0xF1B);
    Vec dir(m);
    double norm2 = 0;
    for (int i = 0; i < m; ++i) {
        const double u1 = 1.0 - sub.uniform(counter * 97 + 2 * i);
        const double u2 = sub.uniform(counter * 97 + 2 * i + 1);
        dir[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        norm2 += dir[i] * dir[i];
    }
    if (norm2 < 1e-12) dir[0] = 1.0;
    const double rho = sub.uniform(counter * 97 + 2 * m, fiber_min, fiber_max);
    Vec unit(m);
    const double inv = 1.0 / std::sqrt(std::max(norm2, 1e-12));
    for (int i = 0; i < m; ++i) unit[i] = dir[i] * inv;
    p.u.assign(m, 0.0);
    solve_lower_transposed(m, C.a.data(), unit.data(), p.u.data());
    for (int i = 0; i < m; ++i) p.u[i] *= rho;
    return p;
}

VerdictReport tm_homothety_verdict(const HomothetySpec &spec, const SampleParams &sp,
                                   double tol) {
    const int m = spec.base.dim(), d = 2 * m;
    WeightedSasakiMetric W_src = side_metric(spec, spec.source);
    WeightedSasakiMetric W_tgt = side_metric(spec, spec.target);
    CounterRng rng(sp.seed, 0x7111);
    std::vector<PairData> samples;
    for (int sidx = 0; sidx < sp.count; ++sidx) {
        BundlePoint p = sample_bundle_point(spec.base, W_src.conn, rng, sidx, sp.fiber_min,
                                            sp.fiber_max, sp.margin);
        Vec z = pack_point(p);
        Vec z2 = map_point(spec, z, false);
        Mat G = tm_metric_matrix(W_src, p);
        Mat Gp = tm_metric_matrix(W_tgt, unpack_point(z2));
        // pullback through the pushforward of the coordinate basis
        Mat P(d, d); // columns P(:,A) = h_* e_A
        for (int A = 0; A < d; ++A) {
            Vec e(d, 0.0);
            e[A] = 1.0;
            Vec pe = pushforward_numeric(spec, p, e, false);
            for (int B = 0; B < d; ++B) P(B, A) = pe[B];
        }
        PairData S;
        S.z = z;
        S.source = G;
        S.pulled = Mat(d, d);
        for (int A = 0; A < d; ++A)
            for (int B = 0; B < d; ++B) {
                double s = 0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) s += P(i, A) * Gp(i, j) * P(j, B);
                S.pulled(A, B) = s;
            }
        for (int i = 0; i < m; ++i) {
            Vec v(d, 0.0);
            v[m + i] = 1.0;
            S.vertical.push_back(std::move(v));
        }
        samples.push_back(std::move(S));
    }
    return judge(samples, tol, spec.expected_psi);
}

VerdictReport srm_homothety_verdict(const HomothetySpec &spec, const SampleParams &sp,
                                    double tol) {
    const int m = spec.base.dim(), d = 2 * m, pd = 2 * m - 1;
    WeightedSasakiMetric W_src = side_metric(spec, spec.source);
    WeightedSasakiMetric W_tgt = side_metric(spec, spec.target);
    SphereBundleChart chart{spec.base, W_src.conn, spec.source.radius, 0.1};
    CounterRng rng(sp.seed, 0x5123);
    std::vector<PairData> samples;
    for (int sidx = 0; sidx < sp.count; ++sidx) {
        Vec q = sample_chart_point(chart, rng, sidx, sp.margin);
        EmbeddingJet E = embed_jet(chart, q);
        BundlePoint p = unpack_point(E.z);
        Vec z2 = map_point(spec, E.z, true);
        Mat G = tm_metric_matrix(W_src, p);
        Mat Gp = tm_metric_matrix(W_tgt, unpack_point(z2));
        PairData S;
        S.z = E.z;
        S.source = Mat(pd, pd);
        S.pulled = Mat(pd, pd);
        std::vector<Vec> tangent(pd), pushed(pd);
        for (int al = 0; al < pd; ++al) {
            Vec T(d);
            for (int A = 0; A < d; ++A) T[A] = E.jac(A, al);
            pushed[al] = pushforward_numeric(spec, p, T, true);
            tangent[al] = std::move(T);
        }
        for (int al = 0; al < pd; ++al)
            for (int be = 0; be < pd; ++be) {
                S.source(al, be) = bilinear(G, tangent[al], tangent[be]);
                S.pulled(al, be) = bilinear(Gp, pushed[al], pushed[be]);
            }
        // angular directions are the vertical tangent vectors of S_rM
        for (int al = m; al < pd; ++al) {
            Vec v(pd, 0.0);
            v[al] = 1.0;
            S.vertical.push_back(std::move(v));
        }
        samples.push_back(std::move(S));
    }
    VerdictReport rep = judge(samples, tol, spec.expected_psi);
    if (m == 2) rep.dim2_raw_only = true;
    return rep;
}

SpaceformCheck spaceform_isometry_check(int dim, double R1, double R, double r,
                                        const SampleParams &sp) {
    const double c = R / R1;
    const double f = c * c;
    const double s = R1 * r / R;
    Box box1 = Box::cube(dim, -0.35 * R1, 0.35 * R1);
    Box boxR = Box::cube(dim, -0.35 * R1 * c, 0.35 * R1 * c);
    ChartedManifold M1 = ChartedManifold::sphere_stereographic(dim, R1, box1);
    ChartedManifold MR = ChartedManifold::sphere_stereographic(dim, R, boxR);
    char weight[64];
    std::snprintf(weight, sizeof(weight), "%.17g", 0.5 * std::log(f));
    WeightedSasakiMetric W1{M1, ConnectionSpec::levi_civita(),
                            ScalarExpr::parse(weight, dim), ScalarExpr::parse(weight, dim)};
    WeightedSasakiMetric WR = WeightedSasakiMetric::sasaki(MR);
    char rad[64];
    std::snprintf(rad, sizeof(rad), "%.17g", s);
    SphereBundleChart chart{M1, ConnectionSpec::levi_civita(), ScalarExpr::parse(rad, dim), 0.1};

    SpaceformCheck out;
    out.f = f;
    out.s = s;
    out.samples = sp.count;
    CounterRng rng(sp.seed, 0xF0);
    const int d = 2 * dim;
    for (int sidx = 0; sidx < sp.count; ++sidx) {
        Vec q = sample_chart_point(chart, rng, sidx, sp.margin);
        Vec z = embed_value(chart, q);
        Vec z2(z);
        for (double &v : z2) v *= c;
        BundlePoint p1 = unpack_point(z);
        Mat Gf = tm_metric_matrix(W1, p1);
        Mat GS = tm_metric_matrix(WR, unpack_point(z2));
        // pullback of g^S through F(z) = c z is c^2 g^S(cz)
        double worst = 0;
        for (int A = 0; A < d; ++A)
            for (int B = 0; B < d; ++B) {
                const double dev = std::abs(c * c * GS(A, B) - Gf(A, B)) /
                                   std::sqrt(Gf(A, A) * Gf(B, B));
                worst = std::max(worst, dev);
            }
        out.max_deviation = std::max(out.max_deviation, worst);
    }
    return out;
}

} // namespace tsb
