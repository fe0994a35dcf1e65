// Chart-based Riemannian metrics: a coordinate box plus a matrix of scalar
// expressions, with shortcuts for the flat, conformally flat and constant
// curvature families.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsb/dsl.hpp"
#include "tsb/linalg.hpp"
#include "tsb/rng.hpp"

namespace tsb {

struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string &msg) : std::runtime_error(msg) {}
};

struct Box {
    Vec lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(std::span<const double> x, double slack = 1e-12) const;
    Vec sample(const CounterRng &rng, std::uint64_t counter, double margin = 0.0) const;
    static Box cube(int dim, double lo, double hi);
};

enum class MetricFamily { Euclidean, ConformallyFlat, SphereStereographic, HyperbolicBall, Explicit };

// Metric entries evaluated at a point, with first and second derivatives.
struct MetricJet2 {
    int d = 0;
    Mat g;
    Ten3 dg;  // dg(i,j,k)    = d_k g_ij
    Ten4 d2g; // d2g(i,j,k,l) = d_k d_l g_ij
};

class ChartedManifold {
  public:
    ChartedManifold() = default; // empty placeholder; build via the factories

    static ChartedManifold euclidean(int dim, Box domain);
    static ChartedManifold conformally_flat(int dim, ScalarExpr factor, Box domain);
    // Stereographic chart of the sphere of radius R: curvature +1/R^2.
    static ChartedManifold sphere_stereographic(int dim, double R, Box domain);
    // Poincare ball of radius R: curvature -1/R^2. The domain must stay
    // strictly inside |x| < R.
    static ChartedManifold hyperbolic_ball(int dim, double R, Box domain);
    static ChartedManifold explicit_metric(int dim, std::vector<ScalarExpr> entries, Box domain);

    int dim() const { return dim_; }
    MetricFamily family() const { return family_; }
    double radius_param() const { return radius_param_; }
    const Box &domain() const { return domain_; }

    // SPD-verified metric value; throws GeometryError naming the point if the
    // matrix fails the Cholesky factorization.
    Mat metric_at(std::span<const double> x) const;
    MetricJet2 metric_jets(std::span<const double> x) const;

    // Row-major m x m entry evaluation over an arbitrary carrier.
    template <class T>
    std::vector<T> metric_eval(std::span<const T> x) const {
        std::vector<T> g(static_cast<std::size_t>(dim_) * dim_, x[0] * 0.0);
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) {
                T v = entries_[i * dim_ + j].eval(x);
                g[i * dim_ + j] = v;
                g[j * dim_ + i] = v;
            }
        return g;
    }

    std::string describe() const;

  private:
    int dim_ = 0;
    MetricFamily family_ = MetricFamily::Euclidean;
    double radius_param_ = 0;
    std::vector<ScalarExpr> entries_; // row-major dim x dim (symmetric)
    Box domain_;
};

std::string format_point(std::span<const double> x);

} // namespace tsb
