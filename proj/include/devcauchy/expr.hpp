#pragma once

// Expression language in one variable `t`:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)*        (right associative, folded)
//   primary := number | 'pi' | 't' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | exp | log | sqrt | sinh | cosh
//
// Evaluation is available as a plain double or as a third-order jet (value and the first
// three derivatives with respect to t).

#include "errors.hpp"
#include "jet.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace devcauchy {

struct Jet3 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh };

inline std::string_view func_name(Func f)
{
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    }
    return "?";
}

class Expr {
public:
    enum class Kind { Num, Pi, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

    Expr() : Expr(make(Kind::Num)) {}

    static Expr num(double v)
    {
        if (v < 0.0) return -num(-v);
        return make(Kind::Num, Expr(nullptr), Expr(nullptr), v);
    }
    static Expr pi() { return make(Kind::Pi); }
    static Expr var() { return make(Kind::Var); }
    static Expr pow(const Expr& base, int exponent)
    {
        return make(Kind::Pow, base, Expr(nullptr), 0.0, exponent);
    }
    static Expr call(Func f, const Expr& arg)
    {
        return make(Kind::Call, arg, Expr(nullptr), 0.0, 1, f);
    }

    friend Expr operator-(const Expr& a) { return make(Kind::Neg, a); }
    friend Expr operator+(const Expr& a, const Expr& b) { return make(Kind::Add, a, b); }
    friend Expr operator-(const Expr& a, const Expr& b) { return make(Kind::Sub, a, b); }
    friend Expr operator*(const Expr& a, const Expr& b) { return make(Kind::Mul, a, b); }
    friend Expr operator/(const Expr& a, const Expr& b) { return make(Kind::Div, a, b); }

    Kind kind() const { return node_->kind; }
    double number() const { return node_->value; }
    int exponent() const { return node_->exponent; }
    Func func() const { return node_->func; }
    Expr lhs() const { return Expr(node_->a); }
    Expr rhs() const { return Expr(node_->b); }

    friend bool operator==(const Expr& x, const Expr& y) { return equal(x.node_.get(), y.node_.get()); }

    double eval(double t) const { return checked(eval_node(*node_, t)); }

    Jet3 eval_jet(double t) const
    {
        const ScalarJet j = jet_node(*node_, t);
        for (double x : j.d) checked(x);
        return {j.d[0], j.d[1], j.d[2], j.d[3]};
    }

    ScalarJet eval_scalar_jet(double t) const
    {
        const ScalarJet j = jet_node(*node_, t);
        for (double x : j.d) checked(x);
        return j;
    }

    bool depends_on_t() const { return depends(*node_); }

    std::string print() const
    {
        std::string out;
        print_node(*node_, out);
        return out;
    }

private:
    struct Node {
        Kind kind = Kind::Num;
        double value = 0.0;
        int exponent = 1;
        Func func = Func::Sin;
        std::shared_ptr<const Node> a, b;
    };

    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Expr make(Kind k, const Expr& a = Expr(nullptr), const Expr& b = Expr(nullptr), double value = 0.0,
                     int exponent = 1, Func func = Func::Sin)
    {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = a.node_;
        n->b = b.node_;
        n->value = value;
        n->exponent = exponent;
        n->func = func;
        return Expr(std::shared_ptr<const Node>(std::move(n)));
    }

    static bool equal(const Node* x, const Node* y)
    {
        if (x == y) return true;
        if (!x || !y || x->kind != y->kind) return false;
        switch (x->kind) {
        case Kind::Num: return x->value == y->value;
        case Kind::Pi:
        case Kind::Var: return true;
        case Kind::Pow: return x->exponent == y->exponent && equal(x->a.get(), y->a.get());
        case Kind::Call: return x->func == y->func && equal(x->a.get(), y->a.get());
        case Kind::Neg: return equal(x->a.get(), y->a.get());
        default: return equal(x->a.get(), y->a.get()) && equal(x->b.get(), y->b.get());
        }
    }

    static double checked(double x)
    {
        if (!std::isfinite(x)) throw Error(ErrorKind::EvalDomain, "expression produced a non-finite value");
        return x;
    }

    static bool depends(const Node& n)
    {
        if (n.kind == Kind::Var) return true;
        return (n.a && depends(*n.a)) || (n.b && depends(*n.b));
    }

    static double int_pow(double x, int e)
    {
        if (e < 0 && x == 0.0) throw Error(ErrorKind::EvalDomain, "negative power of zero");
        double r = 1.0, b = x;
        unsigned k = static_cast<unsigned>(e < 0 ? -e : e);
        while (k) {
            if (k & 1u) r *= b;
            b *= b;
            k >>= 1u;
        }
        return e < 0 ? 1.0 / r : r;
    }

    static double apply(Func f, double x)
    {
        switch (f) {
        case Func::Sin: return std::sin(x);
        case Func::Cos: return std::cos(x);
        case Func::Tan:
            if (std::cos(x) == 0.0) throw Error(ErrorKind::EvalDomain, "tan at a pole");
            return std::tan(x);
        case Func::Exp: return std::exp(x);
        case Func::Log:
            if (!(x > 0.0)) throw Error(ErrorKind::EvalDomain, "log of a non-positive value");
            return std::log(x);
        case Func::Sqrt:
            if (x < 0.0) throw Error(ErrorKind::EvalDomain, "sqrt of a negative value");
            return std::sqrt(x);
        case Func::Sinh: return std::sinh(x);
        case Func::Cosh: return std::cosh(x);
        }
        return 0.0;
    }

    static double eval_node(const Node& n, double t)
    {
        switch (n.kind) {
        case Kind::Num: return n.value;
        case Kind::Pi: return std::numbers::pi;
        case Kind::Var: return t;
        case Kind::Neg: return -eval_node(*n.a, t);
        case Kind::Add: return eval_node(*n.a, t) + eval_node(*n.b, t);
        case Kind::Sub: return eval_node(*n.a, t) - eval_node(*n.b, t);
        case Kind::Mul: return eval_node(*n.a, t) * eval_node(*n.b, t);
        case Kind::Div: {
            const double den = eval_node(*n.b, t);
            if (den == 0.0) throw Error(ErrorKind::EvalDomain, "division by zero");
            return eval_node(*n.a, t) / den;
        }
        case Kind::Pow: return int_pow(eval_node(*n.a, t), n.exponent);
        case Kind::Call: return apply(n.func, eval_node(*n.a, t));
        }
        return 0.0;
    }

    static ScalarJet jet_node(const Node& n, double t)
    {
        switch (n.kind) {
        case Kind::Num: return constant_jet(n.value);
        case Kind::Pi: return constant_jet(std::numbers::pi);
        case Kind::Var: {
            ScalarJet j = constant_jet(t);
            j.d[1] = 1.0;
            return j;
        }
        case Kind::Neg: return -jet_node(*n.a, t);
        case Kind::Add: return jet_node(*n.a, t) + jet_node(*n.b, t);
        case Kind::Sub: return jet_node(*n.a, t) - jet_node(*n.b, t);
        case Kind::Mul: return jet_node(*n.a, t) * jet_node(*n.b, t);
        case Kind::Div: {
            const ScalarJet den = jet_node(*n.b, t);
            if (den.d[0] == 0.0) throw Error(ErrorKind::EvalDomain, "division by zero");
            return jet_node(*n.a, t) * reciprocal(den);
        }
        case Kind::Pow: {
            const ScalarJet a = jet_node(*n.a, t);
            const int e = n.exponent;
            const double x = a.d[0];
            if (e < 0 && x == 0.0) throw Error(ErrorKind::EvalDomain, "negative power of zero");
            auto term = [&](int k) {
                double c = 1.0;
                for (int i = 0; i < k; ++i) c *= static_cast<double>(e - i);
                return c == 0.0 ? 0.0 : c * int_pow(x, e - k);
            };
            return compose(a, int_pow(x, e), term(1), term(2), term(3));
        }
        case Kind::Call: {
            const ScalarJet a = jet_node(*n.a, t);
            const double x = a.d[0];
            switch (n.func) {
            case Func::Sin: return compose(a, std::sin(x), std::cos(x), -std::sin(x), -std::cos(x));
            case Func::Cos: return compose(a, std::cos(x), -std::sin(x), -std::cos(x), std::sin(x));
            case Func::Tan: {
                const double c = std::cos(x);
                if (c == 0.0) throw Error(ErrorKind::EvalDomain, "tan at a pole");
                const double tn = std::tan(x), s2 = 1.0 / (c * c);
                return compose(a, tn, s2, 2.0 * s2 * tn, 2.0 * s2 * s2 + 4.0 * s2 * tn * tn);
            }
            case Func::Exp: {
                const double ex = std::exp(x);
                return compose(a, ex, ex, ex, ex);
            }
            case Func::Log: {
                if (!(x > 0.0)) throw Error(ErrorKind::EvalDomain, "log of a non-positive value");
                return compose(a, std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
            }
            case Func::Sqrt: {
                if (!(x > 0.0)) throw Error(ErrorKind::EvalDomain, "sqrt derivatives need a positive argument");
                return sqrt(a);
            }
            case Func::Sinh: return compose(a, std::sinh(x), std::cosh(x), std::sinh(x), std::cosh(x));
            case Func::Cosh: return compose(a, std::cosh(x), std::sinh(x), std::cosh(x), std::sinh(x));
            }
            break;
        }
        }
        return constant_jet(0.0);
    }

    static int precedence(Kind k)
    {
        switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
        }
    }

    static void print_child(const Node& c, bool parens, std::string& out)
    {
        if (parens) out += '(';
        print_node(c, out);
        if (parens) out += ')';
    }

    static void print_node(const Node& n, std::string& out)
    {
        const int p = precedence(n.kind);
        switch (n.kind) {
        case Kind::Num: {
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, n.value);
            out.append(buf, res.ptr);
            return;
        }
        case Kind::Pi: out += "pi"; return;
        case Kind::Var: out += "t"; return;
        case Kind::Neg:
            out += '-';
            print_child(*n.a, precedence(n.a->kind) < p, out);
            return;
        case Kind::Pow:
            print_child(*n.a, precedence(n.a->kind) <= p, out);
            out += '^';
            out += std::to_string(n.exponent);
            return;
        case Kind::Call:
            out += func_name(n.func);
            print_child(*n.a, true, out);
            return;
        default: {
            print_child(*n.a, precedence(n.a->kind) < p, out);
            const char* op = n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - " : n.kind == Kind::Mul ? "*" : "/";
            out += op;
            print_child(*n.b, precedence(n.b->kind) <= p, out);
            return;
        }
        }
    }

    std::shared_ptr<const Node> node_;

    friend class ExprParser;
};

class ExprParser {
public:
    explicit ExprParser(std::string_view src) : src_(src) {}

    Expr parse()
    {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ < src_.size()) fail({"operator", "end of input"});
        return e;
    }

private:
    [[noreturn]] void fail(std::vector<std::string> expected)
    {
        skip_ws();
        std::string found = pos_ >= src_.size() ? "end of input" : "'" + std::string(1, src_[pos_]) + "'";
        throw SyntaxError(pos_, std::move(expected), found);
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_sum()
    {
        Expr lhs = parse_product();
        while (true) {
            if (accept('+')) lhs = lhs + parse_product();
            else if (accept('-')) lhs = lhs - parse_product();
            else return lhs;
        }
    }

    Expr parse_product()
    {
        Expr lhs = parse_unary();
        while (true) {
            if (accept('*')) lhs = lhs * parse_unary();
            else if (accept('/')) lhs = lhs / parse_unary();
            else return lhs;
        }
    }

    Expr parse_unary()
    {
        if (accept('-')) return -parse_unary();
        return parse_power();
    }

    Expr parse_power()
    {
        Expr base = parse_primary();
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '^') {
            std::vector<long long> chain;
            while (accept('^')) chain.push_back(parse_int_exponent());
            long long e = chain.back();
            for (std::size_t i = chain.size() - 1; i-- > 0;) {
                const long long b = chain[i];
                if (e < 0) throw SyntaxError(pos_, {"non-negative integer exponent"}, "negative exponent in a power chain");
                long long r = 1;
                for (long long k = 0; k < e; ++k) {
                    r *= b;
                    if (r > 1024 || r < -1024) throw SyntaxError(pos_, {"exponent with magnitude at most 1024"}, "overflowing exponent");
                }
                e = r;
            }
            if (e > 1024 || e < -1024) throw SyntaxError(pos_, {"exponent with magnitude at most 1024"}, "overflowing exponent");
            return Expr::pow(base, static_cast<int>(e));
        }
        return base;
    }

    long long parse_int_exponent()
    {
        skip_ws();
        bool neg = false;
        if (pos_ < src_.size() && src_[pos_] == '-') {
            neg = true;
            ++pos_;
            skip_ws();
        }
        const std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
        if (pos_ == start) {
            pos_ = start;
            fail({"integer exponent"});
        }
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
            pos_ = start;
            fail({"integer exponent"});
        }
        long long v = 0;
        for (std::size_t i = start; i < pos_; ++i) {
            v = v * 10 + (src_[i] - '0');
            if (v > 1024) throw SyntaxError(start, {"exponent with magnitude at most 1024"}, "overflowing exponent");
        }
        return neg ? -v : v;
    }

    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    Expr parse_primary()
    {
        skip_ws();
        static const std::vector<std::string> expected = {"number", "'t'", "'pi'", "function", "'('", "'-'"};
        if (pos_ >= src_.size()) fail(expected);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = parse_sum();
            if (!accept(')')) fail({"')'"});
            return inner;
        }
        if (is_digit(c) || c == '.') return parse_number();
        if (is_alpha(c)) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
            const std::string_view id = src_.substr(start, pos_ - start);
            if (id == "t") return Expr::var();
            if (id == "pi") return Expr::pi();
            static constexpr Func funcs[] = {Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt, Func::Sinh, Func::Cosh};
            for (Func f : funcs) {
                if (id == func_name(f)) {
                    if (!accept('(')) fail({"'('"});
                    Expr arg = parse_sum();
                    if (!accept(')')) fail({"')'"});
                    return Expr::call(f, arg);
                }
            }
            throw SyntaxError(start, expected, "identifier '" + std::string(id) + "'");
        }
        fail(expected);
    }

    Expr parse_number()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && is_digit(src_[p])) {
                while (p < src_.size() && is_digit(src_[p])) ++p;
                pos_ = p;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".") {
            pos_ = start;
            fail({"number"});
        }
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || !std::isfinite(v)) {
            pos_ = start;
            fail({"number"});
        }
        return Expr::num(v);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

inline Expr parse(std::string_view source) { return ExprParser(source).parse(); }

inline std::string print(const Expr& e) { return e.print(); }

inline Jet3 eval_jet(const Expr& e, double t) { return e.eval_jet(t); }

} // namespace devcauchy
