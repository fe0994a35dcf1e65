// Curvature-form representatives of characteristic classes: alternating
// forms stored on sorted index combinations, curvature of connection-matrix
// fields via F = dA + A ^ A, the Pfaffian (Euler form), trace polynomials
// (Pontryagin forms) and a Gauss-Bonnet quadrature used to validate the
// Euler-form machinery.
#pragma once

#include "tsb/bundle.hpp"

namespace tsb {

// Alternating k-form with coefficients over sorted k-subsets of {0..dim-1}
// in lexicographic order.
class AltForm {
  public:
    AltForm() = default;
    AltForm(int dim, int degree);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    std::size_t size() const { return c_.size(); }
    double &operator[](std::size_t i) { return c_[i]; }
    double operator[](std::size_t i) const { return c_[i]; }

    double &coeff(std::span<const int> sorted_idx);
    double coeff(std::span<const int> sorted_idx) const;

    AltForm wedge(const AltForm &other) const;
    AltForm &add_scaled(const AltForm &other, double s);
    AltForm &scale(double s);
    double max_abs() const;

    static const std::vector<std::vector<int>> &subsets(int dim, int degree);

  private:
    int dim_ = 0, degree_ = 0;
    Vec c_;
};

// rank x rank matrix of 2-forms in an orthonormal frame of the bundle.
struct CurvatureTwoForm {
    int rank = 0, dim = 0;
    std::vector<AltForm> omega; // row-major rank x rank

    AltForm &at(int a, int b) { return omega[static_cast<std::size_t>(a) * rank + b]; }
    const AltForm &at(int a, int b) const {
        return omega[static_cast<std::size_t>(a) * rank + b];
    }
    // max over entries of |Omega_ab + Omega_ba|
    double antisymmetry_defect() const;
};

// Curvature of the tangent bundle of M at x (orthonormal frame from the
// Cholesky factor of the base metric).
CurvatureTwoForm base_tm_curvature_form(const ChartedManifold &M, const ConnectionSpec &spec,
                                        std::span<const double> x);

// Curvature of the pullback bundle pi*TM over the 2m-chart of TM, computed
// from its own connection-matrix field (A_{x^i} = Gamma_i, A_{u^i} = 0).
CurvatureTwoForm pullback_tm_curvature_form(const ChartedManifold &M,
                                            const ConnectionSpec &spec,
                                            std::span<const double> z);

// Curvature of the direct-sum connection on TTM = pi*TM + pi*TM.
CurvatureTwoForm ttm_product_curvature_form(const ChartedManifold &M,
                                            const ConnectionSpec &spec,
                                            std::span<const double> z);

// Pfaffian of the curvature matrix over (2 pi)^{rank/2}; rank must be even.
AltForm euler_form(const CurvatureTwoForm &curv);

// p_1 = -tr(Omega ^ Omega) / (8 pi^2); p_2 from the degree-4 invariant
// polynomial. Throws for j < 1 or 2j > rank.
AltForm pontryagin_form(const CurvatureTwoForm &curv, int j);

// Frame rotation Omega -> Q^T Omega Q (Q orthogonal).
CurvatureTwoForm rotate_frame(const CurvatureTwoForm &curv, const Mat &Q);

// Interprets a form on the base chart as a form on the 2m-chart (pullback
// through the bundle projection).
AltForm pullback_form_to_tm(const AltForm &base_form);

struct GaussBonnetResult {
    double value = 0;          // integral estimate including the tail term
    double tail = 0;           // analytic tail beyond the coordinate radius
    double error_estimate = 0; // from a half-resolution recomputation
    bool warning = false;      // grid too coarse for the 1e-3 target
};

// (1/2pi) integral of the Euler 2-form over the coordinate disk of radius
// rho_max, plus the analytic tail of the stereographic sphere chart. m = 2.
GaussBonnetResult gauss_bonnet_integral(const ChartedManifold &M, double rho_max = 50.0,
                                        int n_r = 800, int n_theta = 16);

} // namespace tsb
