#include "tsb/dsl.hpp"

#include <cctype>
#include <cstdio>
#include <optional>

namespace tsb {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_literal(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Literal;
    n->literal = v;
    return n;
}

NodePtr make_node(ExprNode::Kind k, NodePtr l, NodePtr r = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

struct Token {
    enum class Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
    Type type;
    double number = 0;
    std::string text;
    int line = 1, col = 1;
};

const char *token_name(Token::Type t) {
    switch (t) {
    case Token::Type::Number: return "number";
    case Token::Type::Ident: return "identifier";
    case Token::Type::Plus: return "'+'";
    case Token::Type::Minus: return "'-'";
    case Token::Type::Star: return "'*'";
    case Token::Type::Slash: return "'/'";
    case Token::Type::Caret: return "'^'";
    case Token::Type::LParen: return "'('";
    case Token::Type::RParen: return "')'";
    case Token::Type::Comma: return "','";
    case Token::Type::End: return "end of input";
    }
    return "?";
}

class Lexer {
  public:
    explicit Lexer(const std::string &src) : src_(src) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.type = Token::Type::End;
            return t;
        }
        char c = src_[pos_];
        switch (c) {
        case '+': advance(); t.type = Token::Type::Plus; return t;
        case '-': advance(); t.type = Token::Type::Minus; return t;
        case '*': advance(); t.type = Token::Type::Star; return t;
        case '/': advance(); t.type = Token::Type::Slash; return t;
        case '^': advance(); t.type = Token::Type::Caret; return t;
        case '(': advance(); t.type = Token::Type::LParen; return t;
        case ')': advance(); t.type = Token::Type::RParen; return t;
        case ',': advance(); t.type = Token::Type::Comma; return t;
        default: break;
        }
        if (std::isdigit((unsigned char)c) || c == '.') return lex_number(t);
        if (std::isalpha((unsigned char)c) || c == '_') {
            t.type = Token::Type::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_')) {
                t.text += src_[pos_];
                advance();
            }
            return t;
        }
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }

  private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) advance();
    }

    Token lex_number(Token &t) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit((unsigned char)src_[pos_]) || src_[pos_] == '.'))
            advance();
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            int save_line = line_, save_col = col_;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
            if (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) {
                while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) advance();
            } else {
                pos_ = save; // bare 'e' belongs to the next token
                line_ = save_line;
                col_ = save_col;
            }
        }
        const std::string text = src_.substr(start, pos_ - start);
        try {
            t.number = std::stod(text);
        } catch (const std::exception &) {
            throw ParseError(t.line, t.col, "malformed number '" + text + "'");
        }
        t.type = Token::Type::Number;
        return t;
    }

    const std::string &src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

std::optional<BuiltinFn> builtin_by_name(const std::string &name) {
    if (name == "exp") return BuiltinFn::Exp;
    if (name == "ln") return BuiltinFn::Ln;
    if (name == "sin") return BuiltinFn::Sin;
    if (name == "cos") return BuiltinFn::Cos;
    if (name == "sqrt") return BuiltinFn::Sqrt;
    if (name == "tanh") return BuiltinFn::Tanh;
    return std::nullopt;
}

const char *fn_name(BuiltinFn f) {
    switch (f) {
    case BuiltinFn::Exp: return "exp";
    case BuiltinFn::Ln: return "ln";
    case BuiltinFn::Sin: return "sin";
    case BuiltinFn::Cos: return "cos";
    case BuiltinFn::Sqrt: return "sqrt";
    case BuiltinFn::Tanh: return "tanh";
    }
    return "?";
}

// Parses "x<k>" into a 0-based index, if the identifier has that shape.
std::optional<int> variable_index(const std::string &name) {
    if (name.size() < 2 || name[0] != 'x') return std::nullopt;
    if (name[1] == '0') return std::nullopt;
    int idx = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit((unsigned char)name[i])) return std::nullopt;
        idx = idx * 10 + (name[i] - '0');
        if (idx > 1000) return std::nullopt;
    }
    return idx - 1;
}

class Parser {
  public:
    Parser(const std::string &src, int dim) : lexer_(src), dim_(dim) { bump(); }

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        expect(Token::Type::End, "operator or end of input");
        return e;
    }

    int max_var() const { return max_var_; }

  private:
    void bump() { tok_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string &expected) {
        throw ParseError(tok_.line, tok_.col,
                         "syntax error: expected " + expected + ", got " +
                             token_name(tok_.type) +
                             (tok_.type == Token::Type::Ident ? " '" + tok_.text + "'" : ""));
    }

    void expect(Token::Type t, const std::string &expected) {
        if (tok_.type != t) fail(expected);
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        while (tok_.type == Token::Type::Plus || tok_.type == Token::Type::Minus) {
            auto k = tok_.type == Token::Type::Plus ? ExprNode::Kind::Add : ExprNode::Kind::Sub;
            bump();
            e = make_node(k, e, parse_term());
        }
        return e;
    }

    NodePtr parse_term() {
        NodePtr e = parse_unary();
        while (tok_.type == Token::Type::Star || tok_.type == Token::Type::Slash) {
            auto k = tok_.type == Token::Type::Star ? ExprNode::Kind::Mul : ExprNode::Kind::Div;
            bump();
            e = make_node(k, e, parse_unary());
        }
        return e;
    }

    NodePtr parse_unary() {
        if (tok_.type == Token::Type::Minus) {
            bump();
            return make_node(ExprNode::Kind::Neg, parse_unary());
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (tok_.type == Token::Type::Caret) {
            bump();
            return make_node(ExprNode::Kind::Pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_atom() {
        switch (tok_.type) {
        case Token::Type::Number: {
            NodePtr n = make_literal(tok_.number);
            bump();
            return n;
        }
        case Token::Type::LParen: {
            bump();
            NodePtr e = parse_expr();
            expect(Token::Type::RParen, "')'");
            bump();
            return e;
        }
        case Token::Type::Ident: {
            const Token ident = tok_;
            bump();
            if (tok_.type == Token::Type::LParen) {
                auto fn = builtin_by_name(ident.text);
                if (!fn)
                    throw ParseError(ident.line, ident.col,
                                     "unknown function '" + ident.text + "'");
                bump();
                std::vector<NodePtr> args;
                args.push_back(parse_expr());
                while (tok_.type == Token::Type::Comma) {
                    bump();
                    args.push_back(parse_expr());
                }
                expect(Token::Type::RParen, "')'");
                bump();
                if (args.size() != 1)
                    throw ParseError(ident.line, ident.col,
                                     "arity mismatch: " + ident.text + " takes 1 argument, got " +
                                         std::to_string(args.size()));
                auto n = std::make_shared<ExprNode>();
                n->kind = ExprNode::Kind::Call;
                n->fn = *fn;
                n->lhs = args[0];
                return n;
            }
            if (auto idx = variable_index(ident.text)) {
                if (*idx >= dim_)
                    throw ParseError(ident.line, ident.col,
                                     "variable " + ident.text + " out of range for dimension " +
                                         std::to_string(dim_));
                max_var_ = std::max(max_var_, *idx + 1);
                auto n = std::make_shared<ExprNode>();
                n->kind = ExprNode::Kind::Variable;
                n->var = *idx;
                return n;
            }
            throw ParseError(ident.line, ident.col,
                             "unknown identifier '" + ident.text + "'");
        }
        default:
            fail("number, variable, function call or '('");
        }
    }

    Lexer lexer_;
    Token tok_;
    int dim_;
    int max_var_ = 0;
};

// Precedence levels used by the printer; parentheses are inserted whenever a
// child binds looser than its context so the printed tree re-parses exactly.
int node_prec(const ExprNode &n) {
    using K = ExprNode::Kind;
    switch (n.kind) {
    case K::Add:
    case K::Sub: return 1;
    case K::Mul:
    case K::Div: return 2;
    case K::Neg: return 3;
    case K::Pow: return 4;
    default: return 5;
    }
}

void render(const ExprNode &n, int min_prec, std::string &out) {
    const int prec = node_prec(n);
    const bool parens = prec < min_prec;
    if (parens) out += '(';
    using K = ExprNode::Kind;
    switch (n.kind) {
    case K::Literal: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", n.literal);
        out += buf;
        break;
    }
    case K::Variable:
        out += 'x';
        out += std::to_string(n.var + 1);
        break;
    case K::Neg:
        out += '-';
        render(*n.lhs, 3, out);
        break;
    case K::Add:
        render(*n.lhs, 1, out);
        out += " + ";
        render(*n.rhs, 2, out);
        break;
    case K::Sub:
        render(*n.lhs, 1, out);
        out += " - ";
        render(*n.rhs, 2, out);
        break;
    case K::Mul:
        render(*n.lhs, 2, out);
        out += "*";
        render(*n.rhs, 3, out);
        break;
    case K::Div:
        render(*n.lhs, 2, out);
        out += "/";
        render(*n.rhs, 3, out);
        break;
    case K::Pow:
        render(*n.lhs, 5, out);
        out += "^";
        render(*n.rhs, 3, out);
        break;
    case K::Call:
        out += fn_name(n.fn);
        out += '(';
        render(*n.lhs, 0, out);
        out += ')';
        break;
    }
    if (parens) out += ')';
}

} // namespace

ScalarExpr ScalarExpr::constant(double v) {
    return ScalarExprAccess::make(make_literal(v), 0, 0);
}

ScalarExpr ScalarExpr::parse(const std::string &source, int dim) {
    Parser p(source, dim);
    NodePtr root = p.parse_all();
    return ScalarExprAccess::make(std::move(root), dim, p.max_var());
}

JetValue ScalarExpr::eval_jet(std::span<const double> x) const {
    std::vector<Jet> vars = seed_point(x);
    return to_jet_value(eval<Jet>(vars));
}

std::string ScalarExpr::pretty() const {
    std::string out;
    render(*root_, 0, out);
    return out;
}

} // namespace tsb
