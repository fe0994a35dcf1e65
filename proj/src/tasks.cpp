#include "tsb/tasks.hpp"

#include <chrono>
#include <cstdio>

namespace tsb {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8g", v);
    return buf;
}

std::string fmt_witness(const Witness &w) {
    return "z=" + format_point(w.z) + " pair=(" + std::to_string(w.i) + "," +
           std::to_string(w.j) + ") measured=" + fmt(w.measured) +
           " expected=" + fmt(w.expected);
}

ScalarExpr parse_or_default(Config &cfg, const std::string &sec, const std::string &key,
                            int dim, const std::string &fallback) {
    std::optional<std::string> src = cfg.get_expr(sec, key);
    try {
        return ScalarExpr::parse(src ? *src : fallback, dim);
    } catch (const ParseError &e) {
        throw ConfigError(cfg.name() + ": in [" + sec + "] " + key + ": " + e.what());
    }
}

ChartedManifold manifold_from_config(Config &cfg) {
    const int dim = static_cast<int>(cfg.get_int("manifold", "dim", 0));
    if (dim < 1) throw ConfigError("[manifold] dim must be a positive integer");
    const std::string family = cfg.get_string("manifold", "metric", "euclidean");
    const double R = cfg.get_number("manifold", "R", 1.0);

    Box box;
    if (cfg.has("manifold", "box_min")) {
        box.lo = cfg.require_number_list("manifold", "box_min");
        box.hi = cfg.require_number_list("manifold", "box_max");
        if ((int)box.lo.size() != dim || (int)box.hi.size() != dim)
            throw ConfigError("[manifold] box_min/box_max need " + std::to_string(dim) +
                              " entries");
    } else {
        const double half = family == "hyperbolic-ball" ? 0.3 * R : 0.5;
        box = Box::cube(dim, -half, half);
    }

    if (family == "euclidean") return ChartedManifold::euclidean(dim, box);
    if (family == "conformally-flat") {
        auto src = cfg.get_expr("manifold", "factor");
        if (!src) throw ConfigError("[manifold] conformally-flat needs factor = \"expr\"");
        return ChartedManifold::conformally_flat(dim, ScalarExpr::parse(*src, dim), box);
    }
    if (family == "sphere-stereographic")
        return ChartedManifold::sphere_stereographic(dim, R, box);
    if (family == "hyperbolic-ball") return ChartedManifold::hyperbolic_ball(dim, R, box);
    if (family == "explicit") {
        std::vector<ScalarExpr> entries(static_cast<std::size_t>(dim) * dim,
                                        ScalarExpr::constant(0.0));
        std::vector<bool> seen(entries.size(), false);
        for (const std::string &key : cfg.keys_with_prefix("manifold", "g_")) {
            int i = 0, j = 0;
            if (std::sscanf(key.c_str(), "g_%d_%d", &i, &j) != 2 || i < 1 || j < 1 ||
                i > dim || j > dim)
                throw ConfigError("[manifold] malformed metric entry key '" + key + "'");
            auto src = cfg.get_expr("manifold", key);
            ScalarExpr e = ScalarExpr::parse(*src, dim);
            entries[(i - 1) * dim + (j - 1)] = e;
            entries[(j - 1) * dim + (i - 1)] = e;
            seen[(i - 1) * dim + (j - 1)] = seen[(j - 1) * dim + (i - 1)] = true;
        }
        for (int i = 0; i < dim; ++i)
            if (!seen[i * dim + i])
                throw ConfigError("[manifold] explicit metric is missing g_" +
                                  std::to_string(i + 1) + "_" + std::to_string(i + 1));
        return ChartedManifold::explicit_metric(dim, std::move(entries), box);
    }
    throw ConfigError("[manifold] unknown metric family '" + family + "'");
}

WeightedSasakiMetric scenario_metric(const Scenario &sc) {
    if (!sc.manifold) throw ConfigError("task '" + sc.task + "' needs a [manifold] section");
    return WeightedSasakiMetric{*sc.manifold, sc.connection, sc.phi1, sc.phi2};
}

constexpr double kPos = 1e-3; // scans must exceed this where a branch is nonzero

} // namespace

const std::vector<std::string> &task_names() {
    static const std::vector<std::string> names = {
        "curvature",    "tm-homothety", "srm-homothety", "scal-spaceform",
        "radius-search", "integrability", "dmu-identity",  "chern-weil",
        "einstein-check"};
    return names;
}

Scenario scenario_from_config(Config &cfg, const CliOverrides &ov) {
    Scenario sc;
    sc.task = cfg.get_string("run", "task", "");
    sc.format = cfg.get_string("run", "format", "table");
    sc.samples = static_cast<int>(cfg.get_int("run", "samples", 100));
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("run", "seed", 0));
    if (cfg.has("run", "tol")) sc.tol = cfg.get_number("run", "tol", 0.0);

    if (ov.task) sc.task = *ov.task;
    if (ov.format) sc.format = *ov.format;
    if (ov.samples) sc.samples = *ov.samples;
    if (ov.seed) sc.seed = *ov.seed;
    if (ov.tol) sc.tol = *ov.tol;

    if (sc.task.empty())
        throw ConfigError("no task selected: set [run] task or pass --task");
    if (sc.task != "all") {
        const auto &names = task_names();
        if (std::find(names.begin(), names.end(), sc.task) == names.end())
            throw ConfigError("unknown task '" + sc.task + "'");
    }
    if (sc.format != "table" && sc.format != "json")
        throw ConfigError("format must be 'table' or 'json'");
    if (sc.samples < 1 || sc.samples > 100000)
        throw ConfigError("samples must be in [1, 100000]");

    if (cfg.has("manifold", "dim")) sc.manifold = manifold_from_config(cfg);
    const int dim = sc.manifold ? sc.manifold->dim() : 3;

    if (auto src = cfg.get_expr("connection", "conformal_phi"))
        sc.connection.conformal_phi = ScalarExpr::parse(*src, dim);
    if (auto src = cfg.get_expr("connection", "torsion_potential"))
        sc.connection.torsion_potential = ScalarExpr::parse(*src, dim);

    sc.phi1 = parse_or_default(cfg, "weights", "phi1", dim, "0");
    sc.phi2 = parse_or_default(cfg, "weights", "phi2", dim, "0");
    sc.radius_r = parse_or_default(cfg, "radius", "r", dim, "1");
    sc.radius_s = parse_or_default(cfg, "radius", "s", dim, "1");

    if (cfg.has("spaceform", "sign") || cfg.has("spaceform", "R")) {
        SpaceformParams sf;
        const std::string sign = cfg.get_string("spaceform", "sign", "+");
        if (sign != "+" && sign != "-")
            throw ConfigError("[spaceform] sign must be '+' or '-'");
        sf.sign = sign == "+" ? 1 : -1;
        sf.R = cfg.get_number("spaceform", "R", 1.0);
        sf.s = cfg.get_number("spaceform", "s", 1.0);
        sf.f1 = cfg.get_number("spaceform", "f1", 1.0);
        sf.f2 = cfg.get_number("spaceform", "f2", 1.0);
        sf.m = static_cast<int>(cfg.get_int("spaceform", "m", 3));
        if (sf.R <= 0 || sf.s <= 0 || sf.f1 <= 0 || sf.f2 <= 0 || sf.m < 2)
            throw ConfigError("[spaceform] parameters must be positive (m >= 2)");
        sc.spaceform = sf;
    }

    if (cfg.has("homothety", "t") || cfg.has("homothety", "phi")) {
        HomothetyConfig hc;
        hc.source_phi = parse_or_default(cfg, "homothety", "source_phi", dim, "0");
        hc.phi = parse_or_default(cfg, "homothety", "phi", dim, "0");
        hc.t = parse_or_default(cfg, "homothety", "t", dim, "1");
        hc.target_phi1 = parse_or_default(cfg, "homothety", "target_phi1", dim, "0");
        hc.target_phi2 = parse_or_default(cfg, "homothety", "target_phi2", dim, "0");
        if (cfg.has("homothety", "expected")) {
            hc.expected = cfg.get_string("homothety", "expected", "");
            if (*hc.expected != "homothety" && *hc.expected != "isometry" &&
                *hc.expected != "not-homothety")
                throw ConfigError("[homothety] expected must be homothety, isometry or "
                                  "not-homothety");
        }
        if (cfg.has("homothety", "expected_psi"))
            hc.expected_psi = cfg.get_number("homothety", "expected_psi", 0.0);
        sc.homothety = hc;
    }

    sc.sampling.count = static_cast<int>(cfg.get_int("sampling", "count", sc.samples));
    sc.sampling.seed = static_cast<std::uint64_t>(
        cfg.get_int("sampling", "seed", static_cast<long long>(sc.seed)));
    sc.sampling.fiber_min = cfg.get_number("sampling", "fiber_min", 0.4);
    sc.sampling.fiber_max = cfg.get_number("sampling", "fiber_max", 1.6);
    sc.sampling.margin = cfg.get_number("sampling", "margin", 0.05);
    if (!(sc.sampling.fiber_min > 0) || sc.sampling.fiber_max <= sc.sampling.fiber_min)
        throw ConfigError("[sampling] fiber box must satisfy 0 < fiber_min < fiber_max");

    cfg.reject_unknown();
    return sc;
}

// ---------------------------------------------------------------------------

RunReport task_curvature(const Scenario &sc) {
    RunReport rep;
    rep.task = "curvature";
    const ChartedManifold &M = *([&]() -> const ChartedManifold * {
        if (!sc.manifold) throw ConfigError("curvature task needs a [manifold] section");
        return &*sc.manifold;
    }());
    rep.inputs.emplace_back("manifold", M.describe());
    const int m = M.dim();
    const int n_samples = std::min(sc.samples, 50);
    CounterRng rng(sc.seed, 0xC07);

    double spd_fail = 0, compat = 0, fd_dev = 0, antisym = 0, bianchi = 0, torsion_dev = 0,
           sectional_dev = 0, conf_sym = 0;
    const bool torsion_free = !sc.connection.torsion_potential.has_value();
    const bool spaceform = M.family() == MetricFamily::SphereStereographic ||
                           M.family() == MetricFamily::HyperbolicBall;
    const double target_K =
        spaceform ? (M.family() == MetricFamily::SphereStereographic ? 1.0 : -1.0) /
                        (M.radius_param() * M.radius_param())
                  : 0.0;

    for (int i = 0; i < n_samples; ++i) {
        Vec x = M.domain().sample(rng, i, 0.05);
        Mat g = base_metric_at(M, sc.connection, x);
        if (!is_spd(g)) spd_fail = 1;
        MetricJet2 mj = base_metric_jets(M, sc.connection, x);
        ConnectionCoeffs cc = connection_coeffs(M, sc.connection, x);
        compat = std::max(compat, max_abs(metric_covariant_derivative(cc, mj).a));

        // Christoffels from jets vs from finite differences of the entries
        {
            const double h = 1e-5;
            MetricJet2 fd = mj;
            Vec xp(x);
            for (int l = 0; l < m; ++l) {
                xp[l] = x[l] + h;
                Mat gp = base_metric_at(M, sc.connection, xp);
                xp[l] = x[l] - h;
                Mat gm = base_metric_at(M, sc.connection, xp);
                xp[l] = x[l];
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        fd.dg(a, b, l) = (gp(a, b) - gm(a, b)) / (2 * h);
            }
            ConnectionCoeffs lc_jets = levi_civita_coeffs(mj);
            ConnectionCoeffs lc_fd = levi_civita_coeffs(fd);
            for (std::size_t k = 0; k < lc_jets.gamma.a.size(); ++k)
                fd_dev = std::max(fd_dev,
                                  std::abs(lc_jets.gamma.a[k] - lc_fd.gamma.a[k]));
        }

        CurvatureData cd = curvature(M, sc.connection, x);
        for (int l = 0; l < m; ++l)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    for (int c = 0; c < m; ++c) {
                        antisym = std::max(std::abs(cd.riemann(l, a, b, c) +
                                                    cd.riemann(l, b, a, c)),
                                           antisym);
                        if (torsion_free)
                            bianchi = std::max(std::abs(cd.riemann(l, a, b, c) +
                                                        cd.riemann(l, b, c, a) +
                                                        cd.riemann(l, c, a, b)),
                                               bianchi);
                    }

        if (sc.connection.torsion_potential) {
            JetValue ps = sc.connection.torsion_potential->eval_jet(x);
            // T^k_ab = dpsi(a) delta^k_b - dpsi(b) delta^k_a
            for (int k = 0; k < m; ++k)
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b) {
                        const double want = (k == b ? ps.gradient[a] : 0.0) -
                                            (k == a ? ps.gradient[b] : 0.0);
                        torsion_dev =
                            std::max(torsion_dev, std::abs(cd.torsion(k, a, b) - want));
                    }
        }

        if (sc.connection.conformal_phi) {
            ConnectionSpec plain;
            plain.torsion_potential = sc.connection.torsion_potential;
            ConnectionCoeffs lc = connection_coeffs(M, plain, x);
            for (int k = 0; k < m; ++k)
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        conf_sym = std::max(conf_sym,
                                            std::abs((cc.gamma(k, a, b) - lc.gamma(k, a, b)) -
                                                     (cc.gamma(k, b, a) - lc.gamma(k, b, a))));
        }

        if (spaceform && m >= 2) {
            const CounterRng sub = rng.substream(0x5EC);
            for (int t = 0; t < 3; ++t) {
                Vec X(m), Y(m);
                for (int k = 0; k < m; ++k) {
                    X[k] = sub.uniform(i * 811 + t * 31 + k, -1.0, 1.0);
                    Y[k] = sub.uniform(i * 811 + t * 31 + k + 97, -1.0, 1.0);
                }
                double K = sectional_curvature(M, sc.connection, x, X, Y);
                double expect = target_K;
                if (sc.connection.conformal_phi && sc.connection.conformal_phi->is_constant())
                    expect /= std::exp(2.0 * sc.connection.conformal_phi->eval_value(x));
                if (!sc.connection.conformal_phi || sc.connection.conformal_phi->is_constant())
                    sectional_dev = std::max(sectional_dev, std::abs(K - expect));
            }
        }
    }

    rep.add_max("metric-spd-violations", spd_fail, 0.0);
    rep.add_max("metric-compatibility", compat, sc.tol_or(1e-8));
    rep.add_max("christoffel-fd-consistency", fd_dev, 1e-5);
    rep.add_max("riemann-antisymmetry", antisym, 1e-10);
    if (torsion_free) rep.add_max("first-bianchi", bianchi, 1e-8);
    if (sc.connection.torsion_potential)
        rep.add_max("torsion-matches-potential", torsion_dev, 1e-10);
    if (sc.connection.conformal_phi)
        rep.add_max("conformal-correction-symmetry", conf_sym, 1e-12);
    if (spaceform)
        rep.add_max("sectional-curvature-constancy", sectional_dev, 1e-6);
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

HomothetySpec homothety_spec_from(const Scenario &sc) {
    if (!sc.manifold || !sc.homothety)
        throw ConfigError("homothety tasks need [manifold] and [homothety] sections");
    const HomothetyConfig &hc = *sc.homothety;
    HomothetySpec spec;
    spec.base = *sc.manifold;
    spec.source.conformal_phi = hc.source_phi;
    spec.source.phi1 = sc.phi1;
    spec.source.phi2 = sc.phi2;
    spec.source.radius = sc.radius_r;
    // target conformal factor is relative to the source one
    auto add = std::make_shared<ExprNode>();
    add->kind = ExprNode::Kind::Add;
    add->lhs = std::make_shared<ExprNode>(ScalarExprAccess::root(hc.source_phi));
    add->rhs = std::make_shared<ExprNode>(ScalarExprAccess::root(hc.phi));
    spec.target.conformal_phi =
        ScalarExprAccess::make(add, spec.base.dim(), spec.base.dim());
    spec.target.phi1 = hc.target_phi1;
    spec.target.phi2 = hc.target_phi2;
    spec.target.radius = sc.radius_s;
    spec.scale_t = hc.t;
    spec.expected_psi = hc.expected_psi;
    return spec;
}

void judge_report(RunReport &rep, const VerdictReport &v, const Scenario &sc) {
    const HomothetyConfig &hc = *sc.homothety;
    rep.inputs.emplace_back("fitted_psi", fmt(v.fitted_psi));
    rep.inputs.emplace_back("verdict", verdict_name(v.verdict));
    const double tol = sc.tol_or(1e-8);
    if (v.dim2_raw_only) {
        rep.add_flag("dim2-raw-only", true,
                     "dim M = 2 is outside the theorem's hypotheses; raw deviations only");
        rep.add_max("pullback-deviation-raw", v.max_rel_deviation, 1e300,
                    "informational for dim 2");
        return;
    }
    if (hc.expected) {
        const bool expect_positive = *hc.expected != "not-homothety";
        bool match;
        if (*hc.expected == "homothety")
            match = v.verdict == Verdict::Homothety || v.verdict == Verdict::Isometry;
        else if (*hc.expected == "isometry")
            match = v.verdict == Verdict::Isometry;
        else
            match = v.verdict == Verdict::NotHomothety;
        rep.add_flag("expected-verdict", match,
                     std::string("expected ") + *hc.expected + ", got " +
                         verdict_name(v.verdict));
        if (expect_positive) {
            rep.add_max("pullback-deviation", v.max_rel_deviation, tol);
            rep.add_max("psi-spread", v.psi_spread, tol);
            if (hc.expected_psi)
                rep.add_max("psi-value",
                            std::abs(v.fitted_psi - *hc.expected_psi) /
                                std::max(1.0, std::abs(*hc.expected_psi)),
                            1e-6);
        } else {
            rep.add_min("witness-deviation", v.max_rel_deviation, kPos,
                        v.witness ? fmt_witness(*v.witness) : "no witness recorded");
            rep.add_flag("witness-present", v.witness.has_value());
        }
    } else {
        rep.add_max("pullback-deviation", v.max_rel_deviation, tol,
                    v.witness ? fmt_witness(*v.witness) : "");
    }
}

} // namespace

RunReport task_tm_homothety(const Scenario &sc) {
    RunReport rep;
    rep.task = "tm-homothety";
    HomothetySpec spec = homothety_spec_from(sc);
    rep.inputs.emplace_back("manifold", spec.base.describe());
    VerdictReport v = tm_homothety_verdict(spec, sc.sampling, sc.tol_or(1e-8));
    judge_report(rep, v, sc);
    return rep;
}

RunReport task_srm_homothety(const Scenario &sc) {
    RunReport rep;
    rep.task = "srm-homothety";
    HomothetySpec spec = homothety_spec_from(sc);
    rep.inputs.emplace_back("manifold", spec.base.describe());
    VerdictReport v = srm_homothety_verdict(spec, sc.sampling, sc.tol_or(1e-8));
    judge_report(rep, v, sc);
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct SpaceformSetup {
    ChartedManifold M;
    SphereBundleChart chart;
    WeightedSasakiMetric W;
};

SpaceformSetup spaceform_setup(const SpaceformParams &sf) {
    const double half = 0.25 * sf.R;
    Box box = Box::cube(sf.m, -half, half);
    ChartedManifold M = sf.sign > 0
                            ? ChartedManifold::sphere_stereographic(sf.m, sf.R, box)
                            : ChartedManifold::hyperbolic_ball(sf.m, sf.R, box);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", sf.s);
    ScalarExpr s_expr = ScalarExpr::parse(buf, sf.m);
    std::snprintf(buf, sizeof(buf), "%.17g", 0.5 * std::log(sf.f1));
    ScalarExpr w1 = ScalarExpr::parse(buf, sf.m);
    std::snprintf(buf, sizeof(buf), "%.17g", 0.5 * std::log(sf.f2));
    ScalarExpr w2 = ScalarExpr::parse(buf, sf.m);
    SphereBundleChart chart{M, ConnectionSpec::levi_civita(), s_expr, 0.1};
    WeightedSasakiMetric W{M, ConnectionSpec::levi_civita(), w1, w2};
    return {std::move(M), std::move(chart), std::move(W)};
}

} // namespace

RunReport task_scal_spaceform(const Scenario &sc) {
    RunReport rep;
    rep.task = "scal-spaceform";
    if (!sc.spaceform) throw ConfigError("scal-spaceform needs a [spaceform] section");
    const SpaceformParams &sf = *sc.spaceform;
    const int n = sf.m - 1;
    char in[128];
    std::snprintf(in, sizeof(in), "sign=%+d R=%g s=%g f1=%g f2=%g m=%d", sf.sign, sf.R, sf.s,
                  sf.f1, sf.f2, sf.m);
    rep.inputs.emplace_back("spaceform", in);

    const double formula = scal_formula_spaceform(sf.sign, sf.R, sf.s, sf.f1, sf.f2, n);
    rep.inputs.emplace_back("formula", fmt(formula));

    SpaceformSetup setup = spaceform_setup(sf);
    const int points = std::min(sc.samples, 20);
    CounterRng rng(sc.seed, 0x5CA1);
    double worst = 0, lo = 0, hi = 0, general_dev = 0;
    for (int i = 0; i < points; ++i) {
        Vec q = sample_chart_point(setup.chart, rng, i, 0.1);
        const double brute = srm_scalar_curvature(setup.chart, setup.W, q);
        if (i == 0) lo = hi = brute;
        lo = std::min(lo, brute);
        hi = std::max(hi, brute);
        worst = std::max(worst, std::abs(formula - brute));
        Vec z = embed_value(setup.chart, q);
        BundlePoint p = unpack_point(z);
        const double general = scal_formula_general(setup.M, ConnectionSpec::levi_civita(),
                                                    sf.f1, sf.f2, sf.s, p.x, p.u);
        general_dev = std::max(general_dev, std::abs(general - formula));
    }
    rep.add_max("formula-vs-bruteforce", worst, sc.tol_or(1e-4));
    rep.add_max("bruteforce-spread", hi - lo, 1e-5);
    rep.add_max("general-vs-spaceform-formula", general_dev, 1e-8);
    if (sf.sign > 0 && sf.R == 1 && sf.s == 1 && sf.f1 == 1 && sf.f2 == 1 &&
        (n == 1 || n == 2))
        rep.add_max("anchor-value", std::abs(formula - (n == 1 ? 1.5 : 7.0)), 1e-12);
    return rep;
}

RunReport task_radius_search(const Scenario &sc) {
    RunReport rep;
    rep.task = "radius-search";
    if (!sc.spaceform) throw ConfigError("radius-search needs a [spaceform] section");
    const SpaceformParams &sf = *sc.spaceform;
    const int n = sf.m - 1;
    char in[128];
    std::snprintf(in, sizeof(in), "sign=%+d R=%g f1=%g f2=%g m=%d", sf.sign, sf.R, sf.f1,
                  sf.f2, sf.m);
    rep.inputs.emplace_back("spaceform", in);

    for (bool want_positive : {true, false}) {
        const std::string label = want_positive ? "positive" : "negative";
        if (sf.sign < 0 && n == 1 && want_positive) {
            // all three closed-form terms are non-positive here
            bool raised = false;
            try {
                find_radius_for_sign(sf.sign, sf.R, sf.f1, sf.f2, n, true);
            } catch (const GeometryError &) {
                raised = true;
            }
            rep.add_flag("positive-unreachable-documented", raised,
                         "n=1 on a negative-curvature base cannot reach positive values");
            continue;
        }
        RadiusSearchResult res = find_radius_for_sign(sf.sign, sf.R, sf.f1, sf.f2, n,
                                                      want_positive);
        rep.inputs.emplace_back("s_" + label, fmt(res.s));
        const bool sign_ok = want_positive ? res.value > 0 : res.value < 0;
        rep.add_flag(label + "-sign-by-formula", sign_ok, "s=" + fmt(res.s) +
                                                              " value=" + fmt(res.value));
        // brute-force verification at the returned radius
        SpaceformParams at = sf;
        at.s = res.s;
        SpaceformSetup setup = spaceform_setup(at);
        CounterRng rng(sc.seed, 0xAD1);
        double brute_worst = 0;
        bool brute_sign_ok = true;
        for (int i = 0; i < 3; ++i) {
            Vec q = sample_chart_point(setup.chart, rng, i, 0.1);
            const double brute = srm_scalar_curvature(setup.chart, setup.W, q);
            brute_worst = std::max(brute_worst, std::abs(brute - res.value));
            brute_sign_ok = brute_sign_ok && (want_positive ? brute > 0 : brute < 0);
        }
        rep.add_flag(label + "-sign-by-bruteforce", brute_sign_ok);
        rep.add_max(label + "-formula-vs-bruteforce", brute_worst,
                    std::max(sc.tol_or(1e-4), 1e-4 * std::abs(res.value)));
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct IntegrabilityConfig {
    std::string name;
    bool curved;
    std::string torsion;      // empty for Levi-Civita
    std::string phi1, phi2;
    bool nijenhuis_zero;
    bool domega_zero;
};

// flat/curved x torsion-free/vectorial x constant/varying weights, chosen so
// each branch of the integrability and symplectic criteria is hit.
const std::vector<IntegrabilityConfig> &integrability_matrix() {
    static const std::vector<IntegrabilityConfig> matrix = {
        {"flat-lc-const", false, "", "0", "0", true, true},
        {"flat-lc-varying", false, "", "0", "0.4*x1", false, false},
        {"flat-vectorial-const", false, "0.4*x1", "0", "0", false, false},
        {"flat-vectorial-matched", false, "0.4*x1", "0.1*x1", "0.5*x1", true, false},
        {"curved-lc-const", true, "", "0", "0", false, true},
        {"curved-lc-varying", true, "", "0", "0.4*x1", false, false},
        {"curved-vectorial-const", true, "0.4*x1", "0", "0", false, false},
        {"curved-vectorial-sum-matched", true, "0.4*x1", "0.2*x1", "0.2*x1", false, true},
    };
    return matrix;
}

WeightedSasakiMetric integrability_metric(const IntegrabilityConfig &c) {
    const int m = 2;
    Box box = Box::cube(m, -0.5, 0.5);
    ChartedManifold M = c.curved ? ChartedManifold::sphere_stereographic(m, 1.0, box)
                                 : ChartedManifold::euclidean(m, box);
    ConnectionSpec conn;
    if (!c.torsion.empty())
        conn.torsion_potential = ScalarExpr::parse(c.torsion, m);
    return WeightedSasakiMetric{M, conn, ScalarExpr::parse(c.phi1, m),
                                ScalarExpr::parse(c.phi2, m)};
}

} // namespace

RunReport task_integrability(const Scenario &sc) {
    RunReport rep;
    rep.task = "integrability";
    const int n_samples = std::max(8, std::min(sc.samples, 200));
    const double zero_tol = sc.tol_or(1e-8);
    int both_zero = 0;
    std::string both_name;
    for (const IntegrabilityConfig &c : integrability_matrix()) {
        WeightedSasakiMetric W = integrability_metric(c);
        CounterRng rng(sc.seed, splitmix64(std::hash<std::string>{}(c.name)));
        double nmax = 0, wmax = 0;
        for (int i = 0; i < n_samples; ++i) {
            BundlePoint p = sample_bundle_point(W.M, W.conn, rng, i, 0.4, 1.6, 0.05);
            nmax = std::max(nmax, nijenhuis_max(W, p));
            wmax = std::max(wmax, symplectic_residual(W, p));
        }
        if (c.nijenhuis_zero)
            rep.add_max(c.name + "/nijenhuis", nmax, zero_tol);
        else
            rep.add_min(c.name + "/nijenhuis-nonzero", nmax, kPos);
        if (c.domega_zero)
            rep.add_max(c.name + "/domega", wmax, zero_tol);
        else
            rep.add_min(c.name + "/domega-nonzero", wmax, kPos);
        if (nmax <= zero_tol && wmax <= zero_tol) {
            ++both_zero;
            both_name = c.name;
        }
    }
    rep.add_flag("kaehler-configuration-unique", both_zero == 1,
                 both_zero == 1 ? "only " + both_name : "count=" + std::to_string(both_zero));
    return rep;
}

RunReport task_dmu_identity(const Scenario &sc) {
    RunReport rep;
    rep.task = "dmu-identity";
    WeightedSasakiMetric W = scenario_metric(sc);
    rep.inputs.emplace_back("manifold", W.M.describe());
    rep.inputs.emplace_back("torsion",
                            W.conn.torsion_potential ? W.conn.torsion_potential->pretty()
                                                     : "none");
    CounterRng rng(sc.seed, 0xD30);
    double worst = 0, torsion_worst = 0;
    const int n_samples = std::min(sc.samples, 200);
    for (int i = 0; i < n_samples; ++i) {
        BundlePoint p = sample_bundle_point(W.M, W.conn, rng, i, sc.sampling.fiber_min,
                                            sc.sampling.fiber_max, sc.sampling.margin);
        worst = std::max(worst, dmu_identity_residual(W, p));
        torsion_worst = std::max(torsion_worst, product_torsion_residual(W.M, W.conn, p));
    }
    rep.add_max("dmu-identity", worst, sc.tol_or(1e-8));
    rep.add_max("product-connection-torsion", torsion_worst, 1e-8);
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

ChartedManifold generic_m4_metric() {
    const int m = 4;
    std::vector<ScalarExpr> entries(16, ScalarExpr::constant(0.0));
    auto set = [&](int i, int j, const std::string &src) {
        ScalarExpr e = ScalarExpr::parse(src, m);
        entries[i * m + j] = e;
        entries[j * m + i] = e;
    };
    set(0, 0, "1 + 0.4*x2^2");
    set(1, 1, "1 + 0.4*x3^2");
    set(2, 2, "1 + 0.4*x4^2");
    set(3, 3, "1 + 0.4*x1^2");
    set(0, 1, "0.2*x3*x4");
    return ChartedManifold::explicit_metric(m, std::move(entries), Box::cube(m, -0.4, 0.4));
}

Mat random_rotation(int n, const CounterRng &rng, std::uint64_t counter) {
    Mat Q = Mat::identity(n);
    int c = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double ang = rng.uniform(counter * 131 + c++, 0.0, 2.0 * M_PI);
            Mat G = Mat::identity(n);
            G(i, i) = std::cos(ang);
            G(j, j) = std::cos(ang);
            G(i, j) = -std::sin(ang);
            G(j, i) = std::sin(ang);
            Q = mat_mul(Q, G);
        }
    return Q;
}

} // namespace

RunReport task_chern_weil(const Scenario &sc) {
    RunReport rep;
    rep.task = "chern-weil";
    CounterRng rng(sc.seed, 0xCE11);
    ConnectionSpec lc;
    const int n_samples = std::min(sc.samples, 20);

    // Euler form of TTM vanishes pointwise for m = 1, 2
    {
        double worst = 0;
        for (int m : {1, 2}) {
            ChartedManifold M =
                m == 2 ? ChartedManifold::sphere_stereographic(2, 1.0, Box::cube(2, -0.5, 0.5))
                       : ChartedManifold::conformally_flat(
                             1, ScalarExpr::parse("1 + 0.3*x1^2", 1), Box::cube(1, -0.5, 0.5));
            for (int i = 0; i < n_samples; ++i) {
                BundlePoint p = sample_bundle_point(M, lc, rng, i + 100 * m, 0.4, 1.6, 0.05);
                AltForm e = euler_form(ttm_product_curvature_form(M, lc, pack_point(p)));
                worst = std::max(worst, e.max_abs());
            }
        }
        rep.add_max("euler-ttm-pointwise", worst, sc.tol_or(1e-10));
    }
    // flat bundle: every form vanishes
    {
        ChartedManifold M = ChartedManifold::euclidean(2, Box::cube(2, -1, 1));
        Vec x = {0.1, -0.2};
        AltForm e = euler_form(base_tm_curvature_form(M, lc, x));
        rep.add_max("euler-flat", e.max_abs(), 1e-14);
        ChartedManifold M4 = ChartedManifold::euclidean(4, Box::cube(4, -1, 1));
        Vec x4 = {0.1, 0.2, -0.1, 0.3};
        AltForm p1 = pontryagin_form(base_tm_curvature_form(M4, lc, x4), 1);
        rep.add_max("p1-flat", p1.max_abs(), 1e-14);
    }
    // Euler 2-form of the sphere is the Gauss curvature area form over 2 pi
    {
        ChartedManifold M = ChartedManifold::sphere_stereographic(2, 1.0, Box::cube(2, -0.5, 0.5));
        double worst = 0;
        for (int i = 0; i < n_samples; ++i) {
            Vec x = M.domain().sample(rng, 1000 + i, 0.05);
            AltForm e = euler_form(base_tm_curvature_form(M, lc, x));
            Mat g = M.metric_at(x);
            const double K = 1.0; // R = 1
            const double expect = K * std::sqrt(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)) /
                                  (2.0 * M_PI);
            const int idx[2] = {0, 1};
            worst = std::max(worst, std::abs(e.coeff(idx) - expect));
        }
        rep.add_max("euler-gauss-area-form", worst, 1e-10);
    }
    // Gauss-Bonnet: chi(S^2) = 2, scale invariant; flat patch integrates to 0
    for (double R : {1.0, 2.0}) {
        GaussBonnetResult gb =
            gauss_bonnet_integral(ChartedManifold::sphere_stereographic(2, R, Box::cube(2, -1, 1)));
        rep.add_max("gauss-bonnet-R" + fmt(R), std::abs(gb.value - 2.0), 1e-3,
                    gb.warning ? "grid accuracy warning" : "");
    }
    {
        GaussBonnetResult gb =
            gauss_bonnet_integral(ChartedManifold::euclidean(2, Box::cube(2, -1, 1)), 10.0, 64, 8);
        rep.add_max("gauss-bonnet-flat", std::abs(gb.value), 1e-12);
    }
    // constant-curvature p1 form vanishes pointwise
    {
        ChartedManifold M = ChartedManifold::sphere_stereographic(4, 1.0, Box::cube(4, -0.4, 0.4));
        double worst = 0;
        for (int i = 0; i < n_samples; ++i) {
            Vec x = M.domain().sample(rng, 2000 + i, 0.05);
            worst = std::max(worst, pontryagin_form(base_tm_curvature_form(M, lc, x), 1).max_abs());
        }
        rep.add_max("p1-constant-curvature", worst, sc.tol_or(1e-10));
    }
    // naturality under the bundle projection, on a metric with nonzero p1 form
    {
        ChartedManifold M = generic_m4_metric();
        double worst = 0, magnitude = 0;
        for (int i = 0; i < 5; ++i) {
            BundlePoint p = sample_bundle_point(M, lc, rng, 3000 + i, 0.4, 1.2, 0.1);
            AltForm base_p1 = pontryagin_form(base_tm_curvature_form(M, lc, p.x), 1);
            magnitude = std::max(magnitude, base_p1.max_abs());
            AltForm lifted = pullback_form_to_tm(base_p1);
            AltForm bundle_p1 =
                pontryagin_form(pullback_tm_curvature_form(M, lc, pack_point(p)), 1);
            bundle_p1.add_scaled(lifted, -1.0);
            worst = std::max(worst, bundle_p1.max_abs());
        }
        rep.add_max("p1-naturality", worst, sc.tol_or(1e-10));
        rep.add_min("p1-nontrivial", magnitude, 1e-6);
    }
    // frame independence of the invariant forms
    {
        ChartedManifold M = generic_m4_metric();
        Vec x = M.domain().sample(rng, 4000, 0.1);
        CurvatureTwoForm curv = base_tm_curvature_form(M, lc, x);
        Mat Q = random_rotation(4, rng, 4242);
        CurvatureTwoForm rot = rotate_frame(curv, Q);
        AltForm d_euler = euler_form(curv);
        d_euler.add_scaled(euler_form(rot), -1.0);
        AltForm d_p1 = pontryagin_form(curv, 1);
        d_p1.add_scaled(pontryagin_form(rot, 1), -1.0);
        rep.add_max("frame-independence",
                    std::max(d_euler.max_abs(), d_p1.max_abs()), 1e-10);
        rep.add_max("curvature-antisymmetry", curv.antisymmetry_defect(), 1e-10);
    }
    return rep;
}

RunReport task_einstein_check(const Scenario &sc) {
    RunReport rep;
    rep.task = "einstein-check";
    WeightedSasakiMetric W = sc.manifold
                                 ? scenario_metric(sc)
                                 : WeightedSasakiMetric::sasaki(
                                       ChartedManifold::sphere_stereographic(
                                           2, 1.0, Box::cube(2, -0.5, 0.5)));
    rep.inputs.emplace_back("manifold", W.M.describe());
    SphereBundleChart chart{W.M, W.conn, sc.radius_s, 0.1};
    CounterRng rng(sc.seed, 0xE15);
    const int n_samples = std::min(sc.samples, 10);
    double bundle_min = 1e300;
    for (int i = 0; i < n_samples; ++i) {
        Vec q = sample_chart_point(chart, rng, i, 0.1);
        bundle_min = std::min(bundle_min, srm_einstein_residual(chart, W, q));
    }
    rep.add_min("bundle-never-einstein", bundle_min, kPos);

    // control: the round sphere itself is Einstein
    ChartedManifold control =
        ChartedManifold::sphere_stereographic(3, 1.0, Box::cube(3, -0.4, 0.4));
    double control_worst = 0;
    for (int i = 0; i < n_samples; ++i) {
        Vec x = control.domain().sample(rng, 500 + i, 0.05);
        CurvatureData cd = curvature(control, ConnectionSpec::levi_civita(), x);
        control_worst =
            std::max(control_worst, einstein_residual_of(cd, control.metric_at(x)));
    }
    rep.add_max("round-sphere-control", control_worst, 1e-8);
    return rep;
}

// ---------------------------------------------------------------------------

RunReport run_task(const Scenario &sc) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    if (sc.task == "curvature") rep = task_curvature(sc);
    else if (sc.task == "tm-homothety") rep = task_tm_homothety(sc);
    else if (sc.task == "srm-homothety") rep = task_srm_homothety(sc);
    else if (sc.task == "scal-spaceform") rep = task_scal_spaceform(sc);
    else if (sc.task == "radius-search") rep = task_radius_search(sc);
    else if (sc.task == "integrability") rep = task_integrability(sc);
    else if (sc.task == "dmu-identity") rep = task_dmu_identity(sc);
    else if (sc.task == "chern-weil") rep = task_chern_weil(sc);
    else if (sc.task == "einstein-check") rep = task_einstein_check(sc);
    else if (sc.task == "all") {
        rep.task = "all";
        std::vector<std::string> selected = {"integrability", "chern-weil"};
        if (sc.manifold) {
            selected.insert(selected.begin(), "curvature");
            selected.push_back("dmu-identity");
            selected.push_back("einstein-check");
        }
        if (sc.spaceform) {
            selected.push_back("scal-spaceform");
            selected.push_back("radius-search");
        }
        if (sc.homothety) {
            selected.push_back("tm-homothety");
            if (sc.manifold && sc.manifold->dim() >= 3) selected.push_back("srm-homothety");
        }
        for (const std::string &name : selected) {
            Scenario sub = sc;
            sub.task = name;
            RunReport r = run_task(sub);
            for (CheckResult c : r.checks) {
                c.name = name + "/" + c.name;
                rep.add(std::move(c));
            }
        }
    } else {
        throw ConfigError("unknown task '" + sc.task + "'");
    }
    rep.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

} // namespace tsb
