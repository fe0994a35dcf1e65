#include "tsb/chern_weil.hpp"

#include <map>
#include <mutex>

namespace tsb {

namespace {

long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// lexicographic rank of a sorted k-subset of {0..n-1}
std::size_t subset_rank(int n, std::span<const int> s) {
    std::size_t rank = 0;
    int prev = -1;
    const int k = static_cast<int>(s.size());
    for (int i = 0; i < k; ++i) {
        for (int v = prev + 1; v < s[i]; ++v) rank += binom(n - 1 - v, k - 1 - i);
        prev = s[i];
    }
    return rank;
}

} // namespace

AltForm::AltForm(int dim, int degree)
    : dim_(dim), degree_(degree),
      c_(degree <= dim ? static_cast<std::size_t>(binom(dim, degree)) : 0, 0.0) {}

const std::vector<std::vector<int>> &AltForm::subsets(int dim, int degree) {
    static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, degree);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::vector<int>> out;
    if (degree <= dim) {
        std::vector<int> idx(degree);
        for (int i = 0; i < degree; ++i) idx[i] = i;
        while (true) {
            out.push_back(idx);
            int i = degree - 1;
            while (i >= 0 && idx[i] == dim - degree + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < degree; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (degree == 0) out = {{}};
    }
    return cache.emplace(key, std::move(out)).first->second;
}

double &AltForm::coeff(std::span<const int> sorted_idx) {
    return c_[subset_rank(dim_, sorted_idx)];
}

double AltForm::coeff(std::span<const int> sorted_idx) const {
    return c_[subset_rank(dim_, sorted_idx)];
}

AltForm AltForm::wedge(const AltForm &other) const {
    AltForm out(dim_, degree_ + other.degree_);
    if (out.size() == 0) return out;
    const auto &sa = subsets(dim_, degree_);
    const auto &sb = subsets(dim_, other.degree_);
    std::vector<int> merged(degree_ + other.degree_);
    for (std::size_t ia = 0; ia < sa.size(); ++ia) {
        if (c_[ia] == 0.0) continue;
        for (std::size_t ib = 0; ib < sb.size(); ++ib) {
            if (other.c_[ib] == 0.0) continue;
            // merge the two sorted subsets, counting inversions for the sign
            const auto &A = sa[ia];
            const auto &B = sb[ib];
            int i = 0, j = 0, k = 0, inversions = 0;
            bool disjoint = true;
            while (i < (int)A.size() && j < (int)B.size()) {
                if (A[i] == B[j]) {
                    disjoint = false;
                    break;
                }
                if (A[i] < B[j]) {
                    merged[k++] = A[i++];
                } else {
                    merged[k++] = B[j++];
                    inversions += (int)A.size() - i;
                }
            }
            if (!disjoint) continue;
            while (i < (int)A.size()) merged[k++] = A[i++];
            while (j < (int)B.size()) merged[k++] = B[j++];
            const double sign = (inversions % 2 == 0) ? 1.0 : -1.0;
            out.c_[subset_rank(dim_, merged)] += sign * c_[ia] * other.c_[ib];
        }
    }
    return out;
}

AltForm &AltForm::add_scaled(const AltForm &other, double s) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * other.c_[i];
    return *this;
}

AltForm &AltForm::scale(double s) {
    for (double &v : c_) v *= s;
    return *this;
}

double AltForm::max_abs() const {
    double m = 0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

double CurvatureTwoForm::antisymmetry_defect() const {
    double worst = 0;
    for (int a = 0; a < rank; ++a)
        for (int b = 0; b < rank; ++b) {
            AltForm s = at(a, b);
            s.add_scaled(at(b, a), 1.0);
            worst = std::max(worst, s.max_abs());
        }
    return worst;
}

namespace {

// connection-matrix field with analytic derivatives on a chart
struct ConnMatField {
    int rank = 0, dim = 0;
    Ten3 A;  // A(mu, a, b)
    Ten4 dA; // dA(mu, a, b, nu) = d_nu A(mu, a, b)
};

// F = dA + A ^ A, conjugated into the frame E: Omega = E^{-1} F E.
CurvatureTwoForm curvature_of(const ConnMatField &cf, const Mat &E, const Mat &Einv) {
    CurvatureTwoForm out;
    out.rank = cf.rank;
    out.dim = cf.dim;
    out.omega.assign(static_cast<std::size_t>(cf.rank) * cf.rank, AltForm(cf.dim, 2));
    Mat F(cf.rank, cf.rank); // coordinate curvature for one (mu, nu) pair
    for (int mu = 0; mu < cf.dim; ++mu)
        for (int nu = mu + 1; nu < cf.dim; ++nu) {
            const int idx[2] = {mu, nu};
            for (int p = 0; p < cf.rank; ++p)
                for (int q = 0; q < cf.rank; ++q) {
                    double f = cf.dA(nu, p, q, mu) - cf.dA(mu, p, q, nu);
                    for (int c = 0; c < cf.rank; ++c)
                        f += cf.A(mu, p, c) * cf.A(nu, c, q) - cf.A(nu, p, c) * cf.A(mu, c, q);
                    F(p, q) = f;
                }
            for (int a = 0; a < cf.rank; ++a)
                for (int b = 0; b < cf.rank; ++b) {
                    double s = 0;
                    for (int p = 0; p < cf.rank; ++p)
                        for (int q = 0; q < cf.rank; ++q) s += Einv(a, p) * F(p, q) * E(q, b);
                    out.at(a, b).coeff(idx) = s;
                }
        }
    return out;
}

Mat orthonormal_frame(const Mat &g) {
    const int m = g.rows;
    Mat C(m, m);
    if (!cholesky_lower(m, g.a.data(), C.a.data()))
        throw GeometryError("metric not positive definite while building a frame");
    Mat E(m, m); // columns E(:,a) = C^{-T} e_a, so E^T g E = I
    Vec e(m), col(m);
    for (int a = 0; a < m; ++a) {
        std::fill(e.begin(), e.end(), 0.0);
        e[a] = 1.0;
        solve_lower_transposed(m, C.a.data(), e.data(), col.data());
        for (int i = 0; i < m; ++i) E(i, a) = col[i];
    }
    return E;
}

Mat frame_inverse(const Mat &g, const Mat &E) {
    // E^{-1} = E^T g since E^T g E = I
    return mat_mul(mat_transpose(E), g);
}

ConnMatField base_conn_field(const ChartedManifold &M, const ConnectionSpec &spec,
                             std::span<const double> x) {
    const int m = M.dim();
    ConnectionCoeffs cc = connection_coeffs(M, spec, x);
    ConnMatField cf;
    cf.rank = m;
    cf.dim = m;
    cf.A = Ten3(m, m, m);
    cf.dA = Ten4(m, m, m, m);
    for (int mu = 0; mu < m; ++mu)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                cf.A(mu, a, b) = cc.gamma(a, mu, b);
                for (int nu = 0; nu < m; ++nu) cf.dA(mu, a, b, nu) = cc.dgamma(a, mu, b, nu);
            }
    return cf;
}

ConnMatField pullback_conn_field(const ChartedManifold &M, const ConnectionSpec &spec,
                                 std::span<const double> z) {
    const int m = M.dim(), d = 2 * m;
    std::span<const double> x = z.subspan(0, m);
    ConnectionCoeffs cc = connection_coeffs(M, spec, x);
    ConnMatField cf;
    cf.rank = m;
    cf.dim = d;
    cf.A = Ten3(d, m, m);
    cf.dA = Ten4(d, m, m, d);
    for (int mu = 0; mu < m; ++mu)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                cf.A(mu, a, b) = cc.gamma(a, mu, b);
                for (int nu = 0; nu < m; ++nu) cf.dA(mu, a, b, nu) = cc.dgamma(a, mu, b, nu);
            }
    return cf;
}

} // namespace

CurvatureTwoForm base_tm_curvature_form(const ChartedManifold &M, const ConnectionSpec &spec,
                                        std::span<const double> x) {
    Mat g = base_metric_at(M, spec, x);
    Mat E = orthonormal_frame(g);
    return curvature_of(base_conn_field(M, spec, x), E, frame_inverse(g, E));
}

CurvatureTwoForm pullback_tm_curvature_form(const ChartedManifold &M,
                                            const ConnectionSpec &spec,
                                            std::span<const double> z) {
    const int m = M.dim();
    std::span<const double> x = z.subspan(0, m);
    Mat g = base_metric_at(M, spec, x);
    Mat E = orthonormal_frame(g);
    return curvature_of(pullback_conn_field(M, spec, z), E, frame_inverse(g, E));
}

CurvatureTwoForm ttm_product_curvature_form(const ChartedManifold &M,
                                            const ConnectionSpec &spec,
                                            std::span<const double> z) {
    const int m = M.dim(), d = 2 * m;
    CurvatureTwoForm block = pullback_tm_curvature_form(M, spec, z);
    CurvatureTwoForm out;
    out.rank = d;
    out.dim = d;
    out.omega.assign(static_cast<std::size_t>(d) * d, AltForm(d, 2));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            out.at(a, b) = block.at(a, b);
            out.at(m + a, m + b) = block.at(a, b);
        }
    return out;
}

namespace {

AltForm pfaffian(const CurvatureTwoForm &curv, std::vector<int> &idx) {
    const int k = static_cast<int>(idx.size());
    if (k == 2) return curv.at(idx[0], idx[1]);
    AltForm acc(curv.dim, k); // degree k (each pair contributes a 2-form)
    for (int j = 1; j < k; ++j) {
        std::vector<int> rest;
        rest.reserve(k - 2);
        for (int i = 1; i < k; ++i)
            if (i != j) rest.push_back(idx[i]);
        AltForm sub = pfaffian(curv, rest);
        AltForm term = curv.at(idx[0], idx[j]).wedge(sub);
        acc.add_scaled(term, (j % 2 == 1) ? 1.0 : -1.0);
    }
    return acc;
}

} // namespace

AltForm euler_form(const CurvatureTwoForm &curv) {
    if (curv.rank % 2 != 0) throw GeometryError("Euler form needs an even-rank bundle");
    std::vector<int> idx(curv.rank);
    for (int i = 0; i < curv.rank; ++i) idx[i] = i;
    AltForm pf = pfaffian(curv, idx);
    pf.scale(1.0 / std::pow(2.0 * M_PI, curv.rank / 2));
    return pf;
}

AltForm pontryagin_form(const CurvatureTwoForm &curv, int j) {
    if (j < 1 || 2 * j > curv.rank)
        throw GeometryError("Pontryagin degree out of range: j=" + std::to_string(j) +
                            " for rank " + std::to_string(curv.rank));
    const double c = 1.0 / (2.0 * M_PI);
    // s2 = tr(Ohat^2), s4 = tr(Ohat^4) with Ohat = Omega / 2pi
    AltForm s2(curv.dim, 4);
    for (int a = 0; a < curv.rank; ++a)
        for (int b = 0; b < curv.rank; ++b)
            s2.add_scaled(curv.at(a, b).wedge(curv.at(b, a)), c * c);
    if (j == 1) {
        s2.scale(-0.5);
        return s2;
    }
    AltForm s4(curv.dim, 8);
    for (int a = 0; a < curv.rank; ++a)
        for (int b = 0; b < curv.rank; ++b)
            for (int e = 0; e < curv.rank; ++e)
                for (int f = 0; f < curv.rank; ++f) {
                    AltForm t = curv.at(a, b).wedge(curv.at(b, e));
                    t = t.wedge(curv.at(e, f));
                    t = t.wedge(curv.at(f, a));
                    s4.add_scaled(t, c * c * c * c);
                }
    // p2 = (s2 ^ s2 - 2 s4) / 8
    AltForm p2 = s2.wedge(s2);
    p2.add_scaled(s4, -2.0);
    p2.scale(1.0 / 8.0);
    return p2;
}

CurvatureTwoForm rotate_frame(const CurvatureTwoForm &curv, const Mat &Q) {
    CurvatureTwoForm out;
    out.rank = curv.rank;
    out.dim = curv.dim;
    out.omega.assign(curv.omega.size(), AltForm(curv.dim, 2));
    for (int a = 0; a < curv.rank; ++a)
        for (int b = 0; b < curv.rank; ++b) {
            AltForm &dst = out.at(a, b);
            for (int p = 0; p < curv.rank; ++p)
                for (int q = 0; q < curv.rank; ++q)
                    dst.add_scaled(curv.at(p, q), Q(p, a) * Q(q, b));
        }
    return out;
}

AltForm pullback_form_to_tm(const AltForm &base_form) {
    const int m = base_form.dim(), k = base_form.degree();
    AltForm out(2 * m, k);
    const auto &subs = AltForm::subsets(m, k);
    for (std::size_t i = 0; i < subs.size(); ++i)
        out.coeff(subs[i]) = base_form[i];
    return out;
}

GaussBonnetResult gauss_bonnet_integral(const ChartedManifold &M, double rho_max, int n_r,
                                        int n_theta) {
    if (M.dim() != 2) throw GeometryError("Gauss-Bonnet integral needs a 2-dimensional chart");
    if (n_r % 2) ++n_r;
    ConnectionSpec lc = ConnectionSpec::levi_civita();
    auto integrand = [&](double rho, double theta) {
        const Vec x = {rho * std::cos(theta), rho * std::sin(theta)};
        AltForm e = euler_form(base_tm_curvature_form(M, lc, x));
        const int idx[2] = {0, 1};
        return e.coeff(idx) * rho;
    };
    auto run = [&](int nr, int nt) {
        // Simpson in rho, rectangle rule in theta (periodic)
        const double hr = rho_max / nr;
        const double ht = 2.0 * M_PI / nt;
        double total = 0;
        for (int i = 0; i <= nr; ++i) {
            const double rho = i * hr;
            double wr = (i == 0 || i == nr) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            double ring = 0;
            for (int jt = 0; jt < nt; ++jt) ring += integrand(rho, (jt + 0.5) * ht);
            total += wr * ring * ht;
        }
        return total * hr / 3.0;
    };
    GaussBonnetResult out;
    const double full = run(n_r, n_theta);
    const double half = run(n_r / 2, std::max(4, n_theta / 2));
    if (M.family() == MetricFamily::SphereStereographic) {
        const double R = M.radius_param();
        out.tail = 2.0 * R * R / (R * R + rho_max * rho_max);
    }
    out.value = full + out.tail;
    out.error_estimate = std::abs(full - half);
    out.warning = out.error_estimate > 5e-4;
    return out;
}

} // namespace tsb
