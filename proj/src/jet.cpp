#include "tsb/jet.hpp"

#include <cmath>

#include "tsb/simd.hpp"

namespace tsb {

namespace {

void check_same_dim(const Jet &a, const Jet &b) {
    if (a.dim() != b.dim())
        throw std::logic_error("jet dimension mismatch: " + std::to_string(a.dim()) +
                               " vs " + std::to_string(b.dim()));
}

} // namespace

Jet Jet::constant(int n, double v) { return Jet(n, v); }

Jet Jet::variable(int n, int index, double v) {
    Jet j(n, v);
    j.d_[index] = 1.0;
    return j;
}

Jet &Jet::operator+=(const Jet &r) {
    check_same_dim(*this, r);
    v_ += r.v_;
    simd::active().axpy(d_.size(), d_.data(), 1.0, r.d_.data());
    return *this;
}

Jet &Jet::operator-=(const Jet &r) {
    check_same_dim(*this, r);
    v_ -= r.v_;
    simd::active().axpy(d_.size(), d_.data(), -1.0, r.d_.data());
    return *this;
}

Jet &Jet::operator*=(double c) {
    v_ *= c;
    simd::active().scale(d_.size(), d_.data(), c);
    return *this;
}

Jet &Jet::operator/=(double c) {
    if (c == 0.0) throw DomainError("division by zero");
    return *this *= (1.0 / c);
}

Jet operator*(const Jet &a, const Jet &b) {
    check_same_dim(a, b);
    const int n = a.n_;
    const auto &k = simd::active();
    Jet out(n, a.v_ * b.v_);
    // grad: a.v * b.g + b.v * a.g
    k.lincomb2(n, out.grad_data(), a.v_, b.grad_data(), b.v_, a.grad_data());
    // hess rows: a.v*bH_i + b.v*aH_i + a.g[i]*b.g + b.g[i]*a.g
    for (int i = 0; i < n; ++i)
        k.lincomb4(n, out.hess_data() + i * n, a.v_, b.hess_data() + i * n, b.v_,
                   a.hess_data() + i * n, a.grad(i), b.grad_data(), b.grad(i),
                   a.grad_data());
    return out;
}

Jet Jet::chain(double f0, double f1, double f2) const {
    const int n = n_;
    const auto &k = simd::active();
    Jet out(n, f0);
    k.lincomb2(n, out.grad_data(), f1, grad_data(), 0.0, grad_data());
    for (int i = 0; i < n; ++i)
        k.lincomb2(n, out.hess_data() + i * n, f1, hess_data() + i * n,
                   f2 * grad(i), grad_data());
    return out;
}

Jet &Jet::operator*=(const Jet &r) {
    *this = *this * r;
    return *this;
}

Jet &Jet::operator/=(const Jet &r) {
    *this = *this / r;
    return *this;
}

Jet operator/(const Jet &a, const Jet &b) {
    if (b.value() == 0.0) throw DomainError("division by zero");
    const double iv = 1.0 / b.value();
    return a * b.chain(iv, -iv * iv, 2.0 * iv * iv * iv);
}

Jet operator-(double c, const Jet &a) {
    Jet out = -a;
    out += c;
    return out;
}

Jet operator/(double c, const Jet &a) {
    if (a.value() == 0.0) throw DomainError("division by zero");
    const double iv = 1.0 / a.value();
    return a.chain(c * iv, -c * iv * iv, 2.0 * c * iv * iv * iv);
}

Jet operator-(const Jet &a) {
    Jet out = a;
    out *= -1.0;
    return out;
}

Jet exp(const Jet &a) {
    const double e = std::exp(a.value());
    return a.chain(e, e, e);
}

Jet log(const Jet &a) {
    if (a.value() <= 0.0)
        throw DomainError("ln of non-positive value " + std::to_string(a.value()));
    const double iv = 1.0 / a.value();
    return a.chain(std::log(a.value()), iv, -iv * iv);
}

Jet sin(const Jet &a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return a.chain(s, c, -s);
}

Jet cos(const Jet &a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return a.chain(c, -s, -c);
}

Jet sqrt(const Jet &a) {
    if (a.value() < 0.0)
        throw DomainError("sqrt of negative value " + std::to_string(a.value()));
    if (a.value() == 0.0) throw DomainError("sqrt at zero is not differentiable");
    const double r = std::sqrt(a.value());
    return a.chain(r, 0.5 / r, -0.25 / (r * a.value()));
}

Jet tanh(const Jet &a) {
    const double t = std::tanh(a.value());
    const double sech2 = 1.0 - t * t;
    return a.chain(t, sech2, -2.0 * t * sech2);
}

Jet powi(const Jet &a, long long e) {
    if (e == 0) return Jet::constant(a.dim(), 1.0);
    if (e < 0) return 1.0 / powi(a, -e);
    Jet acc = Jet::constant(a.dim(), 1.0);
    Jet base = a;
    long long k = e;
    while (k > 0) {
        if (k & 1) acc = acc * base;
        if (k >>= 1) base = base * base;
    }
    return acc;
}

Jet pow(const Jet &a, double e) {
    double ip;
    if (std::modf(e, &ip) == 0.0 && std::abs(ip) <= 64) return powi(a, (long long)ip);
    if (a.value() <= 0.0)
        throw DomainError("pow with non-positive base " + std::to_string(a.value()) +
                          " and non-integer exponent");
    return exp(e * log(a));
}

Jet pow(const Jet &a, const Jet &b) {
    if (a.value() <= 0.0)
        throw DomainError("pow with non-positive base " + std::to_string(a.value()));
    return exp(b * log(a));
}

JetValue to_jet_value(const Jet &j) {
    const int n = j.dim();
    JetValue out;
    out.value = j.value();
    out.gradient.assign(j.grad_data(), j.grad_data() + n);
    out.hessian.assign(j.hess_data(), j.hess_data() + n * n);
    return out;
}

std::vector<Jet> seed_point(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    std::vector<Jet> vars;
    vars.reserve(n);
    for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(n, i, x[i]));
    return vars;
}

} // namespace tsb
