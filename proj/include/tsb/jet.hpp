// Second-order forward-mode jets: value, gradient and full Hessian propagated
// together through arithmetic and the elementary functions. The gradient and
// Hessian arrays are updated through the tsb::simd kernels.
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsb {

// Domain violation during evaluation (ln of non-positive, division by zero,
// ...). Raised instead of letting NaN propagate.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string &msg) : std::runtime_error(msg) {}
};

class Jet {
  public:
    Jet() = default;
    static Jet constant(int n, double v);
    static Jet variable(int n, int index, double v);

    int dim() const { return n_; }
    double value() const { return v_; }
    double grad(int i) const { return d_[i]; }
    double hess(int i, int j) const { return d_[n_ + i * n_ + j]; }

    double *grad_data() { return d_.data(); }
    const double *grad_data() const { return d_.data(); }
    double *hess_data() { return d_.data() + n_; }
    const double *hess_data() const { return d_.data() + n_; }

    Jet &operator+=(const Jet &r);
    Jet &operator-=(const Jet &r);
    Jet &operator*=(const Jet &r);
    Jet &operator/=(const Jet &r);
    Jet &operator+=(double c) { v_ += c; return *this; }
    Jet &operator-=(double c) { v_ -= c; return *this; }
    Jet &operator*=(double c);
    Jet &operator/=(double c);

    friend Jet operator+(Jet a, const Jet &b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet &b) { a -= b; return a; }
    friend Jet operator*(const Jet &a, const Jet &b);
    friend Jet operator/(const Jet &a, const Jet &b);
    friend Jet operator+(Jet a, double c) { a += c; return a; }
    friend Jet operator+(double c, Jet a) { a += c; return a; }
    friend Jet operator-(Jet a, double c) { a -= c; return a; }
    friend Jet operator-(double c, const Jet &a);
    friend Jet operator*(Jet a, double c) { a *= c; return a; }
    friend Jet operator*(double c, Jet a) { a *= c; return a; }
    friend Jet operator/(Jet a, double c) { a /= c; return a; }
    friend Jet operator/(double c, const Jet &a);
    friend Jet operator-(const Jet &a);

    // f(u) by chain rule: f0 = f(u), f1 = f'(u), f2 = f''(u).
    Jet chain(double f0, double f1, double f2) const;

  private:
    Jet(int n, double v) : n_(n), v_(v), d_(static_cast<std::size_t>(n) * (n + 1), 0.0) {}

    int n_ = 0;
    double v_ = 0;
    std::vector<double> d_; // gradient [n] followed by row-major Hessian [n*n]
};

Jet exp(const Jet &a);
Jet log(const Jet &a);
Jet sin(const Jet &a);
Jet cos(const Jet &a);
Jet sqrt(const Jet &a);
Jet tanh(const Jet &a);
Jet pow(const Jet &a, const Jet &b);
Jet pow(const Jet &a, double e);
Jet powi(const Jet &a, long long e);

// Evaluation result exposed to callers that want plain arrays.
struct JetValue {
    double value = 0;
    std::vector<double> gradient;       // length m
    std::vector<double> hessian;        // m*m row-major, symmetric
};

JetValue to_jet_value(const Jet &j);

// Seeds the coordinate jets for a point.
std::vector<Jet> seed_point(std::span<const double> x);

} // namespace tsb
