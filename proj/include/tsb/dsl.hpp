// Scalar fields on the base manifold (weights, radii, conformal factors) come
// from a small expression language over x1..xm. Evaluation is generic over
// the numeric carrier, so plugging tsb::Jet in yields value/gradient/Hessian.
//
// Grammar (EBNF, also in docs/grammar.md):
//   expr   = term { ("+" | "-") term } ;
//   term   = unary { ("*" | "/") unary } ;
//   unary  = "-" unary | power ;
//   power  = atom [ "^" unary ] ;
//   atom   = NUMBER | VARIABLE | FUNCTION "(" expr ")" | "(" expr ")" ;
// Precedence: ^  >  unary minus  >  * /  >  + -.  ^ is right-associative.
// FUNCTION is one of exp, ln, sin, cos, sqrt, tanh; VARIABLE is x1..xm.
#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tsb/jet.hpp"

namespace tsb {

struct ParseError : std::runtime_error {
    ParseError(int line, int col, const std::string &msg)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                             ": " + msg),
          line(line), col(col) {}
    int line, col;
};

enum class BuiltinFn { Exp, Ln, Sin, Cos, Sqrt, Tanh };

struct ExprNode {
    enum class Kind { Literal, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
    Kind kind;
    double literal = 0;
    int var = 0; // 0-based variable index
    BuiltinFn fn = BuiltinFn::Exp;
    std::shared_ptr<const ExprNode> lhs, rhs;
};

namespace detail {

inline double carrier_exp(double x) { return std::exp(x); }
inline double carrier_ln(double x) {
    if (x <= 0.0) throw DomainError("ln of non-positive value " + std::to_string(x));
    return std::log(x);
}
inline double carrier_sin(double x) { return std::sin(x); }
inline double carrier_cos(double x) { return std::cos(x); }
inline double carrier_sqrt(double x) {
    if (x < 0.0) throw DomainError("sqrt of negative value " + std::to_string(x));
    return std::sqrt(x);
}
inline double carrier_tanh(double x) { return std::tanh(x); }
inline double carrier_div(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
}
inline double carrier_pow(double a, double e) {
    double ip;
    if (std::modf(e, &ip) == 0.0) return std::pow(a, e);
    if (a <= 0.0)
        throw DomainError("pow with non-positive base " + std::to_string(a) +
                          " and non-integer exponent");
    return std::pow(a, e);
}
inline double carrier_pow_lit(double a, double e) { return carrier_pow(a, e); }
inline double carrier_const(double v, double /*like*/) { return v; }

inline Jet carrier_exp(const Jet &x) { return exp(x); }
inline Jet carrier_ln(const Jet &x) { return log(x); }
inline Jet carrier_sin(const Jet &x) { return sin(x); }
inline Jet carrier_cos(const Jet &x) { return cos(x); }
inline Jet carrier_sqrt(const Jet &x) { return sqrt(x); }
inline Jet carrier_tanh(const Jet &x) { return tanh(x); }
inline Jet carrier_div(const Jet &a, const Jet &b) { return a / b; }
inline Jet carrier_pow(const Jet &a, const Jet &e) { return pow(a, e); }
inline Jet carrier_pow_lit(const Jet &a, double e) { return pow(a, e); }
inline Jet carrier_const(double v, const Jet &like) {
    return Jet::constant(like.dim(), v);
}

template <class T>
T eval_node(const ExprNode &n, std::span<const T> vars) {
    using K = ExprNode::Kind;
    switch (n.kind) {
    case K::Literal: return carrier_const(n.literal, vars[0]);
    case K::Variable: return vars[n.var];
    case K::Neg: return -eval_node(*n.lhs, vars);
    case K::Add: return eval_node(*n.lhs, vars) + eval_node(*n.rhs, vars);
    case K::Sub: return eval_node(*n.lhs, vars) - eval_node(*n.rhs, vars);
    case K::Mul: return eval_node(*n.lhs, vars) * eval_node(*n.rhs, vars);
    case K::Div: return carrier_div(eval_node(*n.lhs, vars), eval_node(*n.rhs, vars));
    case K::Pow:
        // Literal exponents keep negative bases legal (integer power route).
        if (n.rhs->kind == K::Literal)
            return carrier_pow_lit(eval_node(*n.lhs, vars), n.rhs->literal);
        return carrier_pow(eval_node(*n.lhs, vars), eval_node(*n.rhs, vars));
    case K::Call: {
        T a = eval_node(*n.lhs, vars);
        switch (n.fn) {
        case BuiltinFn::Exp: return carrier_exp(a);
        case BuiltinFn::Ln: return carrier_ln(a);
        case BuiltinFn::Sin: return carrier_sin(a);
        case BuiltinFn::Cos: return carrier_cos(a);
        case BuiltinFn::Sqrt: return carrier_sqrt(a);
        case BuiltinFn::Tanh: return carrier_tanh(a);
        }
        break;
    }
    }
    throw std::logic_error("corrupt expression node");
}

} // namespace detail

class ScalarExpr {
  public:
    ScalarExpr() : ScalarExpr(constant(0.0)) {}

    static ScalarExpr constant(double v);
    // Parses source for a chart of the given dimension; variable indices
    // beyond the dimension are rejected.
    static ScalarExpr parse(const std::string &source, int dim);

    template <class T>
    T eval(std::span<const T> vars) const {
        if (vars.empty())
            throw std::logic_error("eval requires at least one variable binding");
        if (static_cast<int>(vars.size()) < max_var_)
            throw std::logic_error("expression needs " + std::to_string(max_var_) +
                                   " variables, got " + std::to_string(vars.size()));
        T out = detail::eval_node(*root_, vars);
        if (!std::isfinite(scalar_of(out)))
            throw DomainError("expression evaluated to a non-finite value");
        return out;
    }

    double eval_value(std::span<const double> x) const { return eval<double>(x); }
    JetValue eval_jet(std::span<const double> x) const;

    std::string pretty() const;
    bool is_constant() const { return max_var_ == 0; }
    int declared_dim() const { return dim_; }

    struct Builder; // programmatic construction (internal metric factors)

  private:
    ScalarExpr(std::shared_ptr<const ExprNode> root, int dim, int max_var)
        : root_(std::move(root)), dim_(dim), max_var_(max_var) {}

    static double scalar_of(double v) { return v; }
    static double scalar_of(const Jet &v) { return v.value(); }

    std::shared_ptr<const ExprNode> root_;
    int dim_ = 0;
    int max_var_ = 0; // number of variables actually referenced (max index + 1)

    friend struct ScalarExprAccess;
};

// Internal access for tests and builders.
struct ScalarExprAccess {
    static const ExprNode &root(const ScalarExpr &e) { return *e.root_; }
    static ScalarExpr make(std::shared_ptr<const ExprNode> root, int dim, int max_var) {
        return ScalarExpr(std::move(root), dim, max_var);
    }
};

} // namespace tsb
