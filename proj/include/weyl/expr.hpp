#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "weyl/error.hpp"
#include "weyl/jet.hpp"

namespace weyl {

/**
 * Expression AST for metric components, scales and curves.
 *
 * Grammar (documented in docs/expression-grammar.md):
 *
 *   expr   := term { ('+'|'-') term }
 *   term   := unary { ('*'|'/') unary }
 *   unary  := '-' unary | power
 *   power  := atom [ '^' unary ]
 *   atom   := number | identifier | identifier '(' expr ')' | '(' expr ')'
 *
 * '^' binds tighter than unary minus, so -x^2 parses as -(x^2) while x^-2
 * keeps the usual meaning. Only smooth elementary functions are accepted;
 * abs, sign and floor are rejected at parse time.
 */
enum class ExprKind { Number, Symbol, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh, Atan };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    double number = 0.0;   // Number
    std::string symbol;    // Symbol
    Func func = Func::Sin; // Call
    ExprPtr lhs, rhs;      // children (rhs unused for Neg/Call)
    std::size_t begin = 0, end = 0; // byte span in the source text
};

namespace detail {

inline const std::map<std::string, Func>& function_table() {
    static const std::map<std::string, Func> table = {
        {"sin", Func::Sin},   {"cos", Func::Cos},   {"tan", Func::Tan},
        {"exp", Func::Exp},   {"log", Func::Log},   {"sqrt", Func::Sqrt},
        {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"tanh", Func::Tanh},
        {"atan", Func::Atan},
    };
    return table;
}

inline const char* function_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Sinh: return "sinh";
        case Func::Cosh: return "cosh";
        case Func::Tanh: return "tanh";
        case Func::Atan: return "atan";
    }
    return "?";
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr parse() {
        auto e = expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    ExprPtr make(ExprKind k, std::size_t b, std::size_t e, ExprPtr l = nullptr, ExprPtr r = nullptr) {
        auto node = std::make_shared<Expr>();
        node->kind = k;
        node->lhs = std::move(l);
        node->rhs = std::move(r);
        node->begin = b;
        node->end = e;
        return node;
    }

    ExprPtr expr() {
        auto lhs = term();
        for (;;) {
            skip_ws();
            if (eat('+')) {
                auto rhs = term();
                std::size_t b = lhs->begin, e = rhs->end;
                lhs = make(ExprKind::Add, b, e, lhs, rhs);
            } else if (eat('-')) {
                auto rhs = term();
                std::size_t b = lhs->begin, e = rhs->end;
                lhs = make(ExprKind::Sub, b, e, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    ExprPtr term() {
        auto lhs = unary();
        for (;;) {
            skip_ws();
            if (eat('*')) {
                auto rhs = unary();
                std::size_t b = lhs->begin, e = rhs->end;
                lhs = make(ExprKind::Mul, b, e, lhs, rhs);
            } else if (eat('/')) {
                auto rhs = unary();
                std::size_t b = lhs->begin, e = rhs->end;
                lhs = make(ExprKind::Div, b, e, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    ExprPtr unary() {
        skip_ws();
        std::size_t b = pos_;
        if (eat('-')) {
            auto operand = unary();
            return make(ExprKind::Neg, b, operand->end, operand);
        }
        return power();
    }

    ExprPtr power() {
        auto base = atom();
        skip_ws();
        if (eat('^')) {
            auto exponent = unary(); // allows x^-2 and right association x^y^z
            std::size_t b = base->begin, e = exponent->end;
            return make(ExprKind::Pow, b, e, base, exponent);
        }
        return base;
    }

    ExprPtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of expression");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '(') {
            ++pos_;
            auto e = expr();
            if (!eat(')')) throw ParseError(pos_, "expected ')'");
            return e;
        }
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    ExprPtr number() {
        std::size_t b = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // 'e' starts an identifier, not an exponent
            }
        }
        double v = 0.0;
        try {
            v = std::stod(std::string(text_.substr(b, pos_ - b)));
        } catch (const std::exception&) {
            throw ParseError(b, "malformed number");
        }
        auto node = make(ExprKind::Number, b, pos_);
        const_cast<Expr*>(node.get())->number = v;
        return node;
    }

    ExprPtr identifier() {
        std::size_t b = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(b, pos_ - b));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            if (name == "abs" || name == "sign" || name == "floor")
                throw ParseError(b, "non-smooth function '" + name + "' is not supported");
            auto it = function_table().find(name);
            if (it == function_table().end())
                throw ParseError(b, "unknown function '" + name + "'");
            ++pos_;
            auto arg = expr();
            if (!eat(')')) throw ParseError(pos_, "expected ')'");
            auto node = make(ExprKind::Call, b, pos_, arg);
            const_cast<Expr*>(node.get())->func = it->second;
            return node;
        }
        if (name == "pi") {
            auto node = make(ExprKind::Number, b, pos_);
            const_cast<Expr*>(node.get())->number = 3.14159265358979323846;
            return node;
        }
        auto node = make(ExprKind::Symbol, b, pos_);
        const_cast<Expr*>(node.get())->symbol = std::move(name);
        return node;
    }
};

} // namespace detail

/// Parse expression text into an AST. Throws ParseError with a byte offset.
inline ExprPtr parse(std::string_view text) { return detail::Parser(text).parse(); }

/// Collect the distinct symbol names referenced by an expression.
inline void collect_symbols(const ExprPtr& e, std::vector<std::string>& out) {
    if (!e) return;
    if (e->kind == ExprKind::Symbol) {
        for (const auto& s : out)
            if (s == e->symbol) return;
        out.push_back(e->symbol);
        return;
    }
    collect_symbols(e->lhs, out);
    collect_symbols(e->rhs, out);
}

/// Print an AST back to expression text (fully parenthesised).
inline std::string to_string(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Number: {
            std::ostringstream os;
            os.precision(17);
            os << e->number;
            return os.str();
        }
        case ExprKind::Symbol: return e->symbol;
        case ExprKind::Neg: return "(-" + to_string(e->lhs) + ")";
        case ExprKind::Add: return "(" + to_string(e->lhs) + "+" + to_string(e->rhs) + ")";
        case ExprKind::Sub: return "(" + to_string(e->lhs) + "-" + to_string(e->rhs) + ")";
        case ExprKind::Mul: return "(" + to_string(e->lhs) + "*" + to_string(e->rhs) + ")";
        case ExprKind::Div: return "(" + to_string(e->lhs) + "/" + to_string(e->rhs) + ")";
        case ExprKind::Pow: return "(" + to_string(e->lhs) + "^" + to_string(e->rhs) + ")";
        case ExprKind::Call:
            return std::string(detail::function_name(e->func)) + "(" + to_string(e->lhs) + ")";
    }
    return {};
}

/// Structural equality modulo source spans (for parse/print round trips).
inline bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Number: return a->number == b->number;
        case ExprKind::Symbol: return a->symbol == b->symbol;
        case ExprKind::Call:
            return a->func == b->func && equal(a->lhs, b->lhs);
        default: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
}

/**
 * Binding of symbols for evaluation: the first `coords.size()` names are jet
 * variables in declaration order, everything in `params` is a constant.
 */
struct EvalContext {
    std::vector<std::string> coords;
    std::map<std::string, double> params;
};

namespace detail {

template <class T>
struct EvalOps;

// Double-valued evaluation (used by finite-difference oracles and sampling).
template <>
struct EvalOps<double> {
    static double constant(double v, const EvalContext&, std::span<const double>) { return v; }
    static double coordinate(int var, const EvalContext&, std::span<const double> x) {
        return x[static_cast<std::size_t>(var)];
    }
};

template <>
struct EvalOps<Jet> {
    static Jet constant(double v, const EvalContext& ctx, std::span<const double>) {
        return Jet::constant(static_cast<int>(ctx.coords.size()), order, v);
    }
    static Jet coordinate(int var, const EvalContext& ctx, std::span<const double> x) {
        return Jet::coordinate(static_cast<int>(ctx.coords.size()), order, var,
                               x[static_cast<std::size_t>(var)]);
    }
    static thread_local int order;
};

inline thread_local int EvalOps<Jet>::order = 0;

inline double pow_dispatch(double base, double p) {
    if (p == std::floor(p) && std::abs(p) < 1e9) {
        if (base == 0.0 && p < 0) throw DomainError("negative power of zero value");
        return std::pow(base, p);
    }
    if (!(base > 0.0)) throw DomainError("power of non-positive base");
    return std::pow(base, p);
}
inline Jet pow_dispatch(const Jet& base, double p) {
    if (p == std::floor(p) && std::abs(p) < 1e9) return powi(base, static_cast<long long>(p));
    return pow(base, p);
}
inline double exp_general(double base, double expo) {
    if (!(base > 0.0)) throw DomainError("power of non-positive base");
    return std::pow(base, expo);
}
inline Jet exp_general(const Jet& base, const Jet& expo) { return exp(expo * log(base)); }

inline double call_dispatch(Func f, double a) {
    switch (f) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tan: return std::tan(a);
        case Func::Exp: return std::exp(a);
        case Func::Log:
            if (!(a > 0.0)) throw DomainError("log of non-positive value");
            return std::log(a);
        case Func::Sqrt:
            if (!(a > 0.0)) throw DomainError("sqrt of non-positive value");
            return std::sqrt(a);
        case Func::Sinh: return std::sinh(a);
        case Func::Cosh: return std::cosh(a);
        case Func::Tanh: return std::tanh(a);
        case Func::Atan: return std::atan(a);
    }
    throw Error("corrupt function node");
}
inline Jet call_dispatch(Func f, const Jet& a) {
    switch (f) {
        case Func::Sin: return sin(a);
        case Func::Cos: return cos(a);
        case Func::Tan: return tan(a);
        case Func::Exp: return exp(a);
        case Func::Log: return log(a);
        case Func::Sqrt: return sqrt(a);
        case Func::Sinh: return sinh(a);
        case Func::Cosh: return cosh(a);
        case Func::Tanh: return tanh(a);
        case Func::Atan: return atan(a);
    }
    throw Error("corrupt function node");
}

template <class T>
T eval_impl(const Expr* e, const EvalContext& ctx, std::span<const double> x,
            std::string_view source) {
    auto subexpr = [&]() -> std::string {
        if (source.empty() || e->end > source.size()) return {};
        return std::string(source.substr(e->begin, e->end - e->begin));
    };
    switch (e->kind) {
        case ExprKind::Number: return EvalOps<T>::constant(e->number, ctx, x);
        case ExprKind::Symbol: {
            for (std::size_t i = 0; i < ctx.coords.size(); ++i)
                if (ctx.coords[i] == e->symbol)
                    return EvalOps<T>::coordinate(static_cast<int>(i), ctx, x);
            auto it = ctx.params.find(e->symbol);
            if (it == ctx.params.end())
                throw SpecError("unknown identifier '" + e->symbol + "'");
            return EvalOps<T>::constant(it->second, ctx, x);
        }
        case ExprKind::Neg: return -eval_impl<T>(e->lhs.get(), ctx, x, source);
        case ExprKind::Add:
            return eval_impl<T>(e->lhs.get(), ctx, x, source) +
                   eval_impl<T>(e->rhs.get(), ctx, x, source);
        case ExprKind::Sub:
            return eval_impl<T>(e->lhs.get(), ctx, x, source) -
                   eval_impl<T>(e->rhs.get(), ctx, x, source);
        case ExprKind::Mul:
            return eval_impl<T>(e->lhs.get(), ctx, x, source) *
                   eval_impl<T>(e->rhs.get(), ctx, x, source);
        case ExprKind::Div: {
            T num = eval_impl<T>(e->lhs.get(), ctx, x, source);
            T den = eval_impl<T>(e->rhs.get(), ctx, x, source);
            try {
                return num / den;
            } catch (const DomainError& err) {
                throw DomainError(err.what(), subexpr());
            }
        }
        case ExprKind::Pow: {
            T base = eval_impl<T>(e->lhs.get(), ctx, x, source);
            // Constant exponents keep integer semantics (negative bases allowed).
            const Expr* ex = e->rhs.get();
            bool negated = false;
            while (ex->kind == ExprKind::Neg) { negated = !negated; ex = ex->lhs.get(); }
            if (ex->kind == ExprKind::Number) {
                double p = negated ? -ex->number : ex->number;
                try {
                    return pow_dispatch(base, p);
                } catch (const DomainError& err) {
                    throw DomainError(err.what(), subexpr());
                }
            }
            T expo = eval_impl<T>(e->rhs.get(), ctx, x, source);
            try {
                return exp_general(base, expo);
            } catch (const DomainError& err) {
                throw DomainError(err.what(), subexpr());
            }
        }
        case ExprKind::Call: {
            T arg = eval_impl<T>(e->lhs.get(), ctx, x, source);
            try {
                return call_dispatch(e->func, arg);
            } catch (const DomainError& err) {
                throw DomainError(err.what(), subexpr());
            }
        }
    }
    throw Error("corrupt expression node");
}

} // namespace detail

/// Evaluate to a plain double at coordinates x.
inline double eval(const ExprPtr& e, const EvalContext& ctx, std::span<const double> x,
                   std::string_view source = {}) {
    return detail::eval_impl<double>(e.get(), ctx, x, source);
}

/// Evaluate to a jet of the given truncation order at coordinates x.
inline Jet eval_jet(const ExprPtr& e, const EvalContext& ctx, std::span<const double> x,
                    int order, std::string_view source = {}) {
    detail::EvalOps<Jet>::order = order;
    return detail::eval_impl<Jet>(e.get(), ctx, x, source);
}

} // namespace weyl
