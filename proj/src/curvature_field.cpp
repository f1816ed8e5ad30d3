#include "delpmc/curvature_field.hpp"

#include <cctype>
#include <cmath>
#include <random>

#include "delpmc/errors.hpp"
#include "delpmc/numerics.hpp"

namespace delpmc {

namespace detail {

struct ExprNode {
    enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Cos, Sin, Exp };
    Kind kind;
    double value = 0.0;
    int var = 0; // 0:x 1:y 2:z 3:eps
    std::unique_ptr<ExprNode> lhs, rhs;

    double eval(const double* v) const {
        switch (kind) {
            case Kind::Const: return value;
            case Kind::Var: return v[var];
            case Kind::Add: return lhs->eval(v) + rhs->eval(v);
            case Kind::Sub: return lhs->eval(v) - rhs->eval(v);
            case Kind::Mul: return lhs->eval(v) * rhs->eval(v);
            case Kind::Div: return lhs->eval(v) / rhs->eval(v);
            case Kind::Pow: return std::pow(lhs->eval(v), rhs->eval(v));
            case Kind::Neg: return -lhs->eval(v);
            case Kind::Cos: return std::cos(lhs->eval(v));
            case Kind::Sin: return std::sin(lhs->eval(v));
            case Kind::Exp: return std::exp(lhs->eval(v));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::unique_ptr<ExprNode>;

NodePtr make(ExprNode::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_unique<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& src) : s_(src) {}

    NodePtr parse() {
        auto e = expression();
        skip_ws();
        if (pos_ < s_.size())
            throw ParseError("unexpected trailing input", pos_ + 1);
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expression() {
        auto lhs = term();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            auto rhs = term();
            lhs = make(c == '+' ? ExprNode::Kind::Add : ExprNode::Kind::Sub,
                       std::move(lhs), std::move(rhs));
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            auto rhs = unary();
            lhs = make(c == '*' ? ExprNode::Kind::Mul : ExprNode::Kind::Div,
                       std::move(lhs), std::move(rhs));
        }
    }

    NodePtr unary() {
        if (peek() == '-') {
            ++pos_;
            return make(ExprNode::Kind::Neg, unary());
        }
        return power();
    }

    NodePtr power() {
        auto base = atom();
        if (peek() == '^') {
            ++pos_;
            return make(ExprNode::Kind::Pow, std::move(base), unary());
        }
        return base;
    }

    NodePtr atom() {
        const char c = peek();
        if (c == '\0') throw ParseError("unexpected end of expression", s_.size() + 1);
        if (c == '(') {
            ++pos_;
            auto e = expression();
            if (peek() != ')') throw ParseError("missing ')'", pos_ + 1);
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_ + 1);
    }

    NodePtr number() {
        const size_t start = pos_;
        size_t used = 0;
        double value;
        try {
            value = std::stod(s_.substr(start), &used);
        } catch (const std::exception&) {
            throw ParseError("malformed number", start + 1);
        }
        pos_ = start + used;
        auto n = make(ExprNode::Kind::Const);
        n->value = value;
        return n;
    }

    NodePtr identifier() {
        const size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "x" || name == "y" || name == "z" || name == "eps") {
            auto n = make(ExprNode::Kind::Var);
            n->var = name == "x" ? 0 : name == "y" ? 1 : name == "z" ? 2 : 3;
            return n;
        }
        ExprNode::Kind kind;
        if (name == "cos") kind = ExprNode::Kind::Cos;
        else if (name == "sin") kind = ExprNode::Kind::Sin;
        else if (name == "exp") kind = ExprNode::Kind::Exp;
        else throw ParseError("unknown identifier '" + name + "'", start + 1);
        if (peek() != '(')
            throw ParseError("'" + name + "' expects a parenthesized argument", pos_ + 1);
        ++pos_;
        auto arg = expression();
        if (peek() != ')') throw ParseError("missing ')'", pos_ + 1);
        ++pos_;
        return make(kind, std::move(arg));
    }
};

} // namespace
} // namespace detail

CurvatureField CurvatureField::parse(const std::string& expr) {
    CurvatureField f;
    f.source_ = expr;
    f.root_ = detail::Parser(expr).parse();

    // sampled validation: (H1), affinity in eps, evenness in z
    std::mt19937 rng(0x5eedu);
    std::uniform_real_distribution<double> coord(-2.0, 2.0), epsd(-1.0, 1.0);
    bool affine = true, even = true;
    for (int i = 0; i < 100; ++i) {
        const double x = coord(rng), y = coord(rng), z = coord(rng);
        const double h0 = f.eval(0.0, x, y, z);
        if (std::abs(h0 - 1.0) > 1e-12)
            throw ContractError(
                "curvature field violates (H1): value at eps=0 differs from 1 "
                "(got " + std::to_string(h0) + ")");
        const double slope = f.eval(1.0, x, y, z) - 1.0;
        for (double e : {-1.5, -0.5, 0.5, 2.0}) {
            const double v = f.eval(e, x, y, z);
            if (std::abs(v - 1.0 - e * slope) > 1e-10 * std::max(1.0, std::abs(v)))
                affine = false;
        }
        const double e = epsd(rng);
        const double v1 = f.eval(e, x, y, z), v2 = f.eval(e, x, y, -z);
        if (std::abs(v1 - v2) > 1e-12 * std::max(1.0, std::abs(v1))) even = false;
    }
    f.perturbative_ = affine;
    f.even_in_z_ = even;
    return f;
}

double CurvatureField::eval(double eps, double x, double y, double z) const {
    const double v[4] = {x, y, z, eps};
    return root_->eval(v);
}

double CurvatureField::htilde(double x, double y, double z) const {
    if (!perturbative_)
        throw DomainError(
            "htilde: field is not perturbative (eps does not enter affinely)");
    return eval(1.0, x, y, z) - 1.0;
}

Vec3 CurvatureField::eval_Q(double x, double y, double z) const {
    if (!perturbative_)
        throw DomainError("eval_Q: requires a perturbative field (H = 1 + eps*Htilde)");
    const double qx =
        0.5 * integrate([&](double s) { return htilde(s, y, z); }, 0.0, x, 1e-12);
    const double qy =
        0.5 * integrate([&](double s) { return htilde(x, s, z); }, 0.0, y, 1e-12);
    return {qx, qy, 0.0};
}

} // namespace delpmc
